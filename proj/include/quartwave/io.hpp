// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON reports, CSV tables and raw field files. Needs nlohmann/json on the
// include path as <json.hpp> (the vendor/ directory).

#include "quartwave/common.hpp"
#include "quartwave/dual_solver.hpp"
#include "quartwave/exponent_region.hpp"
#include "quartwave/fourier_grid.hpp"
#include "quartwave/green_function.hpp"
#include "quartwave/symbol_geometry.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace quartwave::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Text and numbers

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw InputError("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

/// Comma-separated table built in memory.
class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) : cols_(header.size()) { line(header); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        for (double v : values) cells.push_back(format_double(v));
        line(cells);
    }
    void row(const std::vector<std::string>& cells) { line(cells); }
    void comment(const std::string& text) { text_ += "# " + text + "\n"; }

    const std::string& str() const { return text_; }
    void save(const std::filesystem::path& path) const { write_text(path, text_); }

private:
    void line(const std::vector<std::string>& cells) {
        if (cells.size() != cols_) throw InputError("CSV row width does not match the header");
        for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
        text_ += "\n";
    }
    std::size_t cols_;
    std::string text_;
};

// ---------------------------------------------------------------------------
// JSON conversions

inline json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

inline double to_number(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
        throw InputError("expected a number, got \"" + s + "\"");
    }
    return j.get<double>();
}

inline json to_json(const Rational& r) { return json::array({r.numerator(), r.denominator()}); }

inline Rational rational_from_json(const json& j) {
    return Rational(j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>());
}

inline json to_json(const ModelParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"vmag", p.v_mag}, {"dim", p.dim}};
}

inline ModelParams params_from_json(const json& j) {
    ModelParams p;
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.v_mag = j.at("vmag").get<double>();
    p.dim = j.at("dim").get<int>();
    return p;
}

inline json to_json(const AssumptionReport& r) {
    return {{"all_hold", r.all_hold()},
            {"first_failure", r.first_failure()},
            {"A1", {{"holds", r.a1.holds}, {"witness", r.a1.witness}}},
            {"A2",
             {{"holds", r.a2.holds},
              {"resultant", r.a2.resultant},
              {"scale", r.a2.scale},
              {"common_real_roots", r.a2.common_real_roots},
              {"discrepancy", r.a2.discrepancy}}},
            {"A3", {{"holds", r.a3.holds}, {"violated", r.a3.violated}}}};
}

inline json to_json(const RegimeClassification& r) {
    json j{{"regime", to_string(r.regime)}, {"k", r.k_count}, {"warnings", r.warnings}};
    j["p1"] = r.p1 ? to_json(*r.p1) : json(nullptr);
    j["p1_value"] = r.p1 ? json(to_double(*r.p1)) : json(nullptr);
    return j;
}

inline json to_json(const RegionPolygon& poly) {
    json verts = json::array();
    for (const auto& [x, y] : poly.vertices) verts.push_back({{"x", to_json(x)}, {"y", to_json(y)}});
    return {{"kind", to_string(poly.kind)}, {"k", poly.k_count}, {"dim", poly.dim}, {"vertices", verts}};
}

inline RegionPolygon region_from_json(const json& j) {
    RegionPolygon poly;
    const auto kind = j.at("kind").get<std::string>();
    poly.kind = kind == "Gamma" ? RegionKind::Gamma : kind == "GammaDual" ? RegionKind::GammaDual : RegionKind::PentagonHull;
    poly.k_count = j.at("k").get<int>();
    poly.dim = j.at("dim").get<int>();
    for (const auto& v : j.at("vertices")) poly.vertices.emplace_back(rational_from_json(v.at("x")), rational_from_json(v.at("y")));
    return poly;
}

inline json to_json(const CutoffSpec& c) { return {{"rho", c.rho}, {"c1", c.c1}, {"order", c.order}}; }

inline CutoffSpec cutoff_from_json(const json& j) {
    return {j.at("rho").get<double>(), j.at("c1").get<double>(), j.at("order").get<int>()};
}

inline json to_json(const FourierGrid& g) {
    return {{"dim", g.dim}, {"half_length", g.half_length}, {"points", g.points}};
}

inline FourierGrid grid_from_json(const json& j) {
    return {j.at("dim").get<int>(), j.at("half_length").get<double>(), j.at("points").get<int>()};
}

inline json to_json(const SolverConfig& c) {
    return {{"epsilon_schedule", c.epsilon_schedule},
            {"max_iterations", c.max_iterations},
            {"gradient_tolerance", c.gradient_tolerance},
            {"initial_step", c.initial_step},
            {"min_step", c.min_step},
            {"max_step", c.max_step},
            {"nonmonotone_window", c.nonmonotone_window},
            {"seed", c.seed},
            {"path_points", c.path_points},
            {"seed_width", c.seed_width},
            {"seed_band", c.seed_band},
            {"center", c.center},
            {"tune_lattice", c.tune_lattice},
            {"max_lattice_offset", c.max_lattice_offset}};
}

/// Missing keys keep their defaults.
inline SolverConfig solver_config_from_json(const json& j) {
    SolverConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("epsilon_schedule", c.epsilon_schedule);
    get("max_iterations", c.max_iterations);
    get("gradient_tolerance", c.gradient_tolerance);
    get("initial_step", c.initial_step);
    get("min_step", c.min_step);
    get("max_step", c.max_step);
    get("nonmonotone_window", c.nonmonotone_window);
    get("seed", c.seed);
    get("path_points", c.path_points);
    get("seed_width", c.seed_width);
    get("seed_band", c.seed_band);
    get("center", c.center);
    get("tune_lattice", c.tune_lattice);
    get("max_lattice_offset", c.max_lattice_offset);
    return c;
}

inline json to_json(const StageReport& s) {
    return {{"epsilon", s.epsilon},         {"iterations", s.iterations},       {"J", number(s.J)},
            {"gradient_norm", number(s.gradient_norm)}, {"pde_residual", number(s.pde_residual)},
            {"boundary_mass", number(s.boundary_mass)}, {"converged", s.converged}};
}

/// Everything except the fields themselves.
inline json to_json(const CriticalPointReport& r) {
    json stages = json::array();
    for (const auto& s : r.stages) stages.push_back(to_json(s));
    return {{"converged", r.converged},
            {"message", r.message},
            {"p", r.p},
            {"p1", r.p1},
            {"epsilon", r.epsilon},
            {"J", number(r.J)},
            {"J_extrapolated", number(r.J_extrapolated)},
            {"path_level", number(r.path_level)},
            {"gradient_norm", number(r.gradient_norm)},
            {"pde_residual", number(r.pde_residual)},
            {"dual_norm", number(r.dual_norm)},
            {"boundary_mass", number(r.boundary_mass)},
            {"boundary_mass_profile", number(r.boundary_mass_profile)},
            {"seed", r.seed},
            {"carrier", r.carrier},
            {"grid", to_json(r.grid)},
            {"requested_half_length", r.requested_half_length},
            {"lattice_offset", r.lattice_offset},
            {"lattice_gap", r.lattice_gap},
            {"stages", stages}};
}

inline json to_json(const DecayFit& f) {
    return {{"slope", f.slope}, {"constant", f.constant}, {"radii", f.radii}, {"magnitudes", f.magnitudes}};
}

// ---------------------------------------------------------------------------
// Raw fields: little-endian float64 pairs (re, im), row-major with axis 0
// slowest, plus a JSON sidecar describing the layout.

inline std::filesystem::path sidecar_path(std::filesystem::path bin) { return bin.replace_extension(".json"); }

inline void write_field(const std::filesystem::path& bin, const FourierGrid& g, const Field& f, const json& meta = {}) {
    if (f.size() != g.size()) throw InputError("field size does not match the grid");
    std::string bytes(f.size() * 16, '\0');
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double parts[2] = {f[i].real(), f[i].imag()};
        for (int k = 0; k < 2; ++k) {
            auto u = std::bit_cast<std::uint64_t>(parts[k]);
            if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
            std::memcpy(&bytes[16 * i + 8 * k], &u, 8);
        }
    }
    write_text(bin, bytes);
    json side{{"format", "complex128 little-endian, interleaved (re, im)"},
              {"layout", "row-major, axis 0 slowest; axis 0 is the direction of V"},
              {"shape", std::vector<int>(g.dim, g.points)},
              {"grid", to_json(g)},
              {"coordinate", "x_i = (i - points/2) * 2 * half_length / points"},
              {"data", bin.filename().string()},
              {"meta", meta}};
    write_json(sidecar_path(bin), side);
}

struct FieldFile {
    FourierGrid grid;
    Field field;
    json meta;
};

inline FieldFile read_field(const std::filesystem::path& bin) {
    const json side = read_json(sidecar_path(bin));
    FieldFile out{grid_from_json(side.at("grid")), {}, side.value("meta", json::object())};
    const std::string bytes = read_text(bin);
    if (bytes.size() != out.grid.size() * 16) throw InputError("field file size does not match its sidecar");
    out.field.resize(out.grid.size());
    for (std::size_t i = 0; i < out.field.size(); ++i) {
        double parts[2];
        for (int k = 0; k < 2; ++k) {
            std::uint64_t u;
            std::memcpy(&u, &bytes[16 * i + 8 * k], 8);
            if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
            parts[k] = std::bit_cast<double>(u);
        }
        out.field[i] = {parts[0], parts[1]};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plot tables

/// Principal curvatures sampled inside each profile branch.
inline Csv curvature_table(const ModelParams& p, int samples_per_branch = 64) {
    Csv csv({"branch", "sign", "t", "h", "kappa_rot", "kappa_profile"});
    const auto branches = profile_branches(p);
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        for (int i = 0; i < samples_per_branch; ++i) {
            // interior Chebyshev-like points avoid the endpoint singularity
            const double th = pi * (i + 0.5) / samples_per_branch;
            const double t = 0.5 * (br.lo() + br.hi()) - 0.5 * (br.hi() - br.lo()) * std::cos(th);
            try {
                const auto c = curvatures(br, t, p.dim);
                csv.row({std::to_string(b), to_string(br.sign()), format_double(t), format_double(br.h(t)),
                         format_double(c.kappa_rot), format_double(c.kappa_profile)});
            } catch (const AxisPointError&) {
            }
        }
    }
    return csv;
}

inline Csv region_vertex_table(const RegionPolygon& poly) {
    Csv csv({"vertex", "x", "y", "x_num", "x_den", "y_num", "y_den"});
    for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
        const auto& [x, y] = poly.vertices[i];
        csv.row({std::to_string(i), format_double(to_double(x)), format_double(to_double(y)),
                 std::to_string(x.numerator()), std::to_string(x.denominator()), std::to_string(y.numerator()),
                 std::to_string(y.denominator())});
    }
    return csv;
}

/// Membership on cell centres ((2i+1)/2n, (2j+1)/2n) of the unit square.
inline Csv region_grid_table(int dim, int k, int n = 100) {
    if (n < 1) throw InputError("raster resolution must be positive");
    const auto hull = pentagon_hull(dim, k);
    Csv csv({"x", "y", "full_admissible", "in_hull", "in_gamma", "in_gamma_dual"});
    const auto g = gamma_polygon(dim, k), gd = gamma_dual_polygon(dim, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Rational x(2 * i + 1, 2 * n), y(2 * j + 1, 2 * n);
            const auto e = ExponentPair::from_xy(x, y);
            csv.row({format_double(to_double(x)), format_double(to_double(y)),
                     std::to_string(full_admissible(e, dim, k) ? 1 : 0),
                     std::to_string(strictly_inside(hull, x, y) ? 1 : 0), std::to_string(strictly_inside(g, x, y) ? 1 : 0),
                     std::to_string(strictly_inside(gd, x, y) ? 1 : 0)});
        }
    return csv;
}

/// Rows x_1..x_N, Re G, Im G, |G|, error.
inline Csv green_table(const std::vector<GreenSample>& samples, int dim) {
    std::vector<std::string> header;
    for (int d = 0; d < dim; ++d) header.push_back("x" + std::to_string(d + 1));
    for (const char* h : {"re_G", "im_G", "abs_G", "error"}) header.emplace_back(h);
    Csv csv(header);
    for (const auto& s : samples) {
        std::vector<double> row(s.x.begin(), s.x.end());
        const Complex g = s.total();
        row.insert(row.end(), {g.real(), g.imag(), std::abs(g), s.error()});
        csv.row(row);
    }
    return csv;
}

/// Field values along axis `axis` through the grid centre.
inline Csv field_slice_table(const FourierGrid& g, const Field& f, int axis) {
    if (axis < 0 || axis >= g.dim) throw InputError("slice axis out of range");
    Csv csv({"x", "re", "im", "abs"});
    std::size_t stride = 1;
    for (int d = g.dim - 1; d > axis; --d) stride *= g.points;
    std::size_t base = 0;
    for (int d = 0; d < g.dim; ++d) {
        std::size_t s = 1;
        for (int e = g.dim - 1; e > d; --e) s *= g.points;
        if (d != axis) base += static_cast<std::size_t>(g.points / 2) * s;
    }
    for (int i = 0; i < g.points; ++i) {
        const Complex v = f[base + i * stride];
        csv.row({g.coordinate(i), v.real(), v.imag(), std::abs(v)});
    }
    return csv;
}

} // namespace quartwave::io
