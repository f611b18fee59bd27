// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "quartwave/io.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <charconv>
#include <filesystem>
#include <random>
#include <sstream>

using namespace quartwave;
namespace fs = std::filesystem;
using json_t = io::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("quartwave_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> bits;
    int checked = 0;
    while (checked < 5000) {
        const double v = std::bit_cast<double>(bits(rng));
        if (!std::isfinite(v)) continue;
        const auto text = io::format_double(v);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        EXPECT_EQ(back, v) << text;
        ++checked;
    }
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(20.0), "20");
    EXPECT_EQ(io::format_double(INFINITY), "inf");
}

TEST(JsonRoundTrip, Inputs) {
    const ModelParams p{1.0, 2.0, 0.3, 3};
    const auto p2 = io::params_from_json(json_t::parse(io::to_json(p).dump()));
    EXPECT_EQ(p2.alpha, p.alpha);
    EXPECT_EQ(p2.beta, p.beta);
    EXPECT_EQ(p2.v_mag, p.v_mag);
    EXPECT_EQ(p2.dim, p.dim);

    const FourierGrid g{2, 40.578, 256};
    const auto g2 = io::grid_from_json(json_t::parse(io::to_json(g).dump()));
    EXPECT_EQ(g2.dim, g.dim);
    EXPECT_EQ(g2.half_length, g.half_length);
    EXPECT_EQ(g2.points, g.points);

    const CutoffSpec c{0.37, 0.123456789, 3};
    const auto c2 = io::cutoff_from_json(json_t::parse(io::to_json(c).dump()));
    EXPECT_EQ(c2.rho, c.rho);
    EXPECT_EQ(c2.c1, c.c1);
    EXPECT_EQ(c2.order, c.order);

    SolverConfig s;
    s.epsilon_schedule = {0.3, 0.01 / 3.0};
    s.seed = 0xfeedfacecafebeefull;
    s.center = {1.5, -2.25};
    s.tune_lattice = false;
    const auto j = io::to_json(s);
    const auto s2 = io::solver_config_from_json(json_t::parse(j.dump()));
    EXPECT_EQ(io::to_json(s2), j);
    EXPECT_EQ(s2.seed, s.seed);
}

TEST(JsonRoundTrip, SolverConfigKeepsDefaultsForMissingKeys) {
    const auto s = io::solver_config_from_json(json_t::parse(R"({"max_iterations": 7})"));
    EXPECT_EQ(s.max_iterations, 7);
    EXPECT_EQ(io::to_json(s)["epsilon_schedule"], io::to_json(SolverConfig{})["epsilon_schedule"]);
}

TEST(JsonRoundTrip, ReportsReparseToIdenticalValues) {
    std::vector<json_t> reports;
    for (const ModelParams p : {ModelParams{-1.0, 0.0, 0.0, 3}, ModelParams{1.0, 2.0, 1.0, 3}, ModelParams{-1.0, 0.0, 0.1, 2}}) {
        reports.push_back(io::to_json(assess_assumptions(p)));
        reports.push_back(io::to_json(classify_regime(p)));
    }
    for (int n : {3, 24, 34})
        for (int k = 1; k < n; k += 5) {
            const auto hull = pentagon_hull(n, k);
            const auto j = io::to_json(hull);
            reports.push_back(j);
            const auto back = io::region_from_json(json_t::parse(j.dump()));
            EXPECT_EQ(back.vertices, hull.vertices);
            EXPECT_EQ(back.kind, hull.kind);
        }
    StageReport st{1e-3, 42, 2.5, 1e-10, 4e-5, 0.2, true};
    reports.push_back(io::to_json(st));
    CriticalPointReport r;
    r.J = 1.0 / 3.0;
    r.J_extrapolated = NAN;
    r.stages = {st, st};
    reports.push_back(io::to_json(r));
    for (const auto& j : reports) {
        const auto text = j.dump();
        EXPECT_EQ(json_t::parse(text), j);
        EXPECT_EQ(json_t::parse(text).dump(), text);
    }
    EXPECT_TRUE(std::isnan(io::to_number(io::to_json(r)["J_extrapolated"])));
    EXPECT_EQ(io::to_number(io::to_json(r)["J"]), 1.0 / 3.0);
}

TEST(Csv, RejectsRaggedRows) {
    io::Csv csv({"a", "b"});
    EXPECT_THROW(csv.row(std::vector<double>{1.0}), InputError);
    csv.row(std::vector<double>{1.0, 0.5});
    csv.comment("note");
    EXPECT_EQ(csv.str(), "a,b\n1,0.5\n# note\n");
}

TEST(Csv, TablesAreDeterministic) {
    const ModelParams p{1.0, 2.0, 1.0, 3};
    EXPECT_EQ(io::curvature_table(p).str(), io::curvature_table(p).str());
    EXPECT_EQ(io::region_grid_table(34, 4, 40).str(), io::region_grid_table(34, 4, 40).str());
    const auto a = green_values({-1.0, 0.0, 0.1, 2}, default_cutoff({-1.0, 0.0, 0.1, 2}), {{30.0, 0.0}, {0.0, 25.0}});
    const auto b = green_values({-1.0, 0.0, 0.1, 2}, default_cutoff({-1.0, 0.0, 0.1, 2}), {{30.0, 0.0}, {0.0, 25.0}});
    EXPECT_EQ(io::green_table(a, 2).str(), io::green_table(b, 2).str());
}

TEST(Csv, RegionRasterMatchesMembership) {
    const auto csv = io::region_grid_table(24, 12, 10).str();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    const auto hull = pentagon_hull(24, 12);
    while (std::getline(in, line)) {
        const int i = rows / 10, j = rows % 10;
        const bool inside = strictly_inside(hull, Rational(2 * i + 1, 20), Rational(2 * j + 1, 20));
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        ASSERT_EQ(cells.size(), 6u);
        EXPECT_EQ(cells[3], inside ? "1" : "0");
        ++rows;
    }
    EXPECT_EQ(rows, 100);
}

TEST(Csv, CurvatureTableOnSphereIsUnit) {
    const auto csv = io::curvature_table({-1.0, 0.0, 0.0, 3}, 16).str();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        EXPECT_NEAR(std::stod(cells[4]), 1.0, 1e-9);
        EXPECT_NEAR(std::stod(cells[5]), 1.0, 1e-9);
        ++rows;
    }
    EXPECT_GT(rows, 10);
}

TEST(FieldFile, BinaryRoundTripIsExact) {
    const auto dir = scratch_dir("field");
    const FourierGrid g{2, 12.5, 64};
    Field f(g.size());
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (auto& c : f) c = {n(rng), n(rng)};
    f[0] = {-0.0, std::numeric_limits<double>::denorm_min()};
    io::write_field(dir / "u.bin", g, f, {{"tag", "x"}});
    const auto back = io::read_field(dir / "u.bin");
    EXPECT_EQ(back.grid.points, g.points);
    EXPECT_EQ(back.grid.half_length, g.half_length);
    EXPECT_EQ(back.meta["tag"], "x");
    ASSERT_EQ(back.field.size(), f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.field[i].real()), std::bit_cast<std::uint64_t>(f[i].real()));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.field[i].imag()), std::bit_cast<std::uint64_t>(f[i].imag()));
    }
}

TEST(FieldFile, LittleEndianInterleavedLayout) {
    const auto dir = scratch_dir("layout");
    const FourierGrid g{1, 1.0, 64};
    Field f(g.size(), Complex(0.0, 0.0));
    f[0] = {1.0, -2.0};
    io::write_field(dir / "f.bin", g, f);
    const auto bytes = io::read_text(dir / "f.bin");
    ASSERT_EQ(bytes.size(), 64u * 16u);
    // 1.0 = 0x3FF0000000000000, -2.0 = 0xC000000000000000
    EXPECT_EQ(static_cast<unsigned char>(bytes[7]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 0xF0);
    EXPECT_EQ(static_cast<unsigned char>(bytes[15]), 0xC0);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(bytes[i], '\0');
}

TEST(FieldFile, RejectsMismatchedSizes) {
    const auto dir = scratch_dir("bad");
    const FourierGrid g{2, 10.0, 64};
    EXPECT_THROW(io::write_field(dir / "f.bin", g, Field(10)), InputError);
    io::write_field(dir / "f.bin", g, Field(g.size()));
    io::write_text(dir / "f.bin", std::string(32, '\0'));
    EXPECT_THROW(io::read_field(dir / "f.bin"), InputError);
    EXPECT_THROW(io::read_field(dir / "missing.bin"), InputError);
}

TEST(FieldSlice, PicksCentreLine) {
    const FourierGrid g{2, 8.0, 64};
    Field f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = g.point(i);
        f[i] = {x[0] + 100.0 * x[1], 0.0};
    }
    const auto along0 = io::field_slice_table(g, f, 0).str();
    const auto along1 = io::field_slice_table(g, f, 1).str();
    // x = -L on the first data row; the other coordinate is 0 at the centre.
    EXPECT_NE(along0.find("\n-8,-8,0,8\n"), std::string::npos);
    EXPECT_NE(along1.find("\n-8,-800,0,800\n"), std::string::npos);
    EXPECT_THROW(io::field_slice_table(g, f, 2), InputError);
}

TEST(ReadJson, MalformedInputIsAnInputError) {
    const auto dir = scratch_dir("json");
    io::write_text(dir / "bad.json", "{\"alpha\": ");
    EXPECT_THROW(io::read_json(dir / "bad.json"), InputError);
}
