// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end.
//
//   quartwave_cli classify --alpha A --beta B --vmag V --dim N [--out DIR]
//   quartwave_cli region   --dim N --k K [--resolution R] [--out DIR]
//   quartwave_cli green    --alpha A --beta B --vmag V --dim N [--xmin --xmax --count --direction ...]
//   quartwave_cli solve    --alpha A --beta B --vmag V --dim N --p P [--points --half-length --eps ...]
//
// Every subcommand also takes --config FILE.json; keys are option names
// (dashes or underscores), and flags given on the command line win.
// Exit codes: 0 ok, 1 usage or input error, 2 assumption violation,
// 3 non-convergence. QUARTWAVE_THREADS sets the FFT thread count.

#include "quartwave/dual_solver.hpp"
#include "quartwave/exponent_region.hpp"
#include "quartwave/green_function.hpp"
#include "quartwave/io.hpp"
#include "quartwave/symbol_geometry.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
namespace qw = quartwave;
using qw::io::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAssumption = 2, kNonConvergence = 3 };

struct ModelArgs {
    double alpha = -1.0, beta = 0.0, vmag = 0.0;
    int dim = 2;
    qw::ModelParams params() const { return {alpha, beta, vmag, dim}; }
};

void add_model_options(CLI::App* app, ModelArgs& m) {
    app->add_option("--alpha", m.alpha, "constant term of the symbol")->capture_default_str();
    app->add_option("--beta", m.beta, "coefficient of |xi|^2")->capture_default_str();
    app->add_option("--vmag", m.vmag, "drift speed |V|, along the first axis")->capture_default_str();
    app->add_option("--dim", m.dim, "space dimension N")->capture_default_str();
}

std::string json_scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

// Fill every option not given on the command line from the config object.
void apply_config(CLI::App* app, const json& cfg) {
    if (!cfg.is_object()) throw qw::InputError("config file must hold a JSON object");
    for (CLI::Option* opt : app->get_options()) {
        if (opt->count() > 0 || opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        std::string alt = name;
        std::replace(alt.begin(), alt.end(), '-', '_');
        const json* v = cfg.contains(name) ? &cfg[name] : cfg.contains(alt) ? &cfg[alt] : nullptr;
        if (!v || name == "config") continue;
        if (v->is_array()) {
            for (const auto& e : *v) opt->add_result(json_scalar_text(e));
        } else {
            opt->add_result(json_scalar_text(*v));
        }
        opt->run_callback();
    }
}

fs::path prepare_out(const std::string& dir) {
    fs::path out(dir);
    fs::create_directories(out);
    return out;
}

// ---------------------------------------------------------------------------

int run_classify(const ModelArgs& m, const fs::path& out) {
    const auto p = m.params();
    qw::validate(p);
    const auto report = qw::assess_assumptions(p);
    json j{{"params", qw::io::to_json(p)}, {"assumptions", qw::io::to_json(report)}};
    if (!report.all_hold()) {
        qw::io::write_json(out / "classify.json", j);
        std::cerr << "assumption " << report.first_failure() << " fails for the given coefficients\n";
        return kAssumption;
    }
    const auto regime = qw::classify_regime(p);
    j["regime"] = qw::io::to_json(regime);
    j["critical_values"] = qw::critical_values(p);
    j["flat_locus"] = p.v_mag > 0.0 ? json(qw::flat_locus(p)) : json::array();
    qw::io::write_json(out / "classify.json", j);
    if (p.dim >= 2) qw::io::curvature_table(p).save(out / "curvature.csv");

    std::cout << "regime " << qw::to_string(regime.regime) << "\n"
              << "k " << regime.k_count << "\n";
    if (regime.p1)
        std::cout << "p1 " << regime.p1->numerator() << (regime.p1->denominator() != 1 ? "/" + std::to_string(regime.p1->denominator()) : "")
                  << "\n";
    else
        std::cout << "p1 none (N <= k)\n";
    for (const auto& w : regime.warnings) std::cout << "warning: " << w << "\n";
    return kOk;
}

int run_region(int dim, int k, int resolution, const fs::path& out) {
    qw::check_region_args(dim, k);
    const auto hull = qw::pentagon_hull(dim, k);
    const auto c = qw::interpolation_constants(dim, k);
    json j{{"dim", dim},
           {"k", k},
           {"pentagon_hull", qw::io::to_json(hull)},
           {"gamma", qw::io::to_json(qw::gamma_polygon(dim, k))},
           {"gamma_dual", qw::io::to_json(qw::gamma_dual_polygon(dim, k))},
           {"interpolation_constants", {{"A", qw::io::to_json(c.A)}, {"B", qw::io::to_json(c.B)}}},
           {"dual_line_threshold", qw::io::to_json(qw::dual_line_threshold(k))}};
    qw::io::write_json(out / "region.json", j);
    qw::io::region_vertex_table(hull).save(out / "region_vertices.csv");
    qw::io::region_grid_table(dim, k, resolution).save(out / "region_grid.csv");
    for (const auto& [x, y] : hull.vertices)
        std::cout << x.numerator() << "/" << x.denominator() << " " << y.numerator() << "/" << y.denominator() << "\n";
    return kOk;
}

struct GreenArgs {
    double xmin = 20.0, xmax = 200.0;
    int count = 16;
    std::vector<double> direction;
    std::optional<double> rho, c1;
    int order = 2;
};

int run_green(const ModelArgs& m, const GreenArgs& g, const fs::path& out) {
    const auto p = m.params();
    qw::validate(p);
    auto cut = qw::default_cutoff(p, g.order);
    if (g.rho) cut.rho = *g.rho;
    if (g.c1) cut.c1 = *g.c1;
    std::vector<double> dir = g.direction;
    if (dir.empty()) {
        dir.assign(p.dim, 0.0);
        dir[0] = 1.0;
    }
    if (static_cast<int>(dir.size()) != p.dim) throw qw::InputError("--direction needs N components");

    const auto fit = qw::green_decay_fit(p, cut, dir, g.xmin, g.xmax, g.count);
    auto csv = qw::io::green_table(fit.samples, p.dim);
    csv.comment("decay_fit slope=" + qw::io::format_double(fit.slope) +
                " constant=" + qw::io::format_double(fit.constant));
    csv.save(out / "green.csv");

    json j{{"params", qw::io::to_json(p)}, {"cutoff", qw::io::to_json(cut)}, {"direction", dir},
           {"decay_fit", qw::io::to_json(fit)}};
    qw::io::write_json(out / "green.json", j);
    std::cout << "decay slope " << fit.slope << " constant " << fit.constant << "\n";
    return kOk;
}

struct SolveArgs {
    double p = 0.0;
    int points = 0;
    double half_length = 40.0;
    std::vector<double> eps;
    int max_iter = 5000;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    bool no_tune = false;
};

int run_solve(const ModelArgs& m, const SolveArgs& s, const fs::path& out) {
    const auto params = m.params();
    qw::validate(params);
    qw::FourierGrid grid{params.dim, s.half_length, s.points > 0 ? s.points : (params.dim >= 3 ? 64 : 256)};
    qw::SolverConfig cfg;
    if (!s.eps.empty()) cfg.epsilon_schedule = s.eps;
    cfg.max_iterations = s.max_iter;
    cfg.gradient_tolerance = s.tol;
    cfg.seed = s.seed;
    cfg.tune_lattice = !s.no_tune;

    const auto rep = qw::mountain_pass_search(grid, params, s.p, cfg);

    json j{{"params", qw::io::to_json(params)}, {"config", qw::io::to_json(cfg)}, {"report", qw::io::to_json(rep)}};
    qw::io::write_json(out / "solve.json", j);
    const json meta{{"params", qw::io::to_json(params)}, {"p", s.p}, {"J", qw::io::number(rep.J)},
                    {"pde_residual", qw::io::number(rep.pde_residual)}, {"epsilon", rep.epsilon}};
    qw::io::write_field(out / "profile_u.bin", rep.grid, rep.u, meta);
    qw::io::write_field(out / "dual_v.bin", rep.grid, rep.v, meta);
    for (int axis = 0; axis < rep.grid.dim; ++axis)
        qw::io::field_slice_table(rep.grid, rep.u, axis).save(out / ("profile_u_axis" + std::to_string(axis) + ".csv"));

    std::cout << "converged " << (rep.converged ? "yes" : "no") << "\n"
              << "J " << rep.J << " (extrapolated " << rep.J_extrapolated << ")\n"
              << "pde_residual " << rep.pde_residual << "\n"
              << "gradient_norm " << rep.gradient_norm << "\n"
              << "boundary_mass " << rep.boundary_mass << "\n";
    if (!rep.converged) {
        std::cerr << "solver did not converge: " << rep.message << "\n";
        return kNonConvergence;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drift-perturbed fourth-order dispersion: geometry, exponent regions, Green function, standing waves"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file with option values");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    };

    ModelArgs model;
    auto* classify = app.add_subcommand("classify", "check the assumptions on the symbol and classify its zero set");
    add_model_options(classify, model);
    common(classify);

    int rdim = 0, rk = 0, resolution = 100;
    auto* region = app.add_subcommand("region", "exponent regions: vertices and a membership raster");
    region->add_option("--dim", rdim, "space dimension N")->required();
    region->add_option("--k", rk, "number of nonvanishing principal curvatures")->required();
    region->add_option("--resolution", resolution, "raster cells per axis")->capture_default_str();
    common(region);

    GreenArgs gargs;
    double rho = 0.0, c1 = 0.0;
    auto* green = app.add_subcommand("green", "evaluate the outgoing Green function along a ray and fit its decay");
    add_model_options(green, model);
    green->add_option("--xmin", gargs.xmin, "smallest radius")->capture_default_str();
    green->add_option("--xmax", gargs.xmax, "largest radius")->capture_default_str();
    green->add_option("--count", gargs.count, "number of log-spaced radii")->capture_default_str();
    green->add_option("--direction", gargs.direction, "ray direction (N numbers, default first axis)");
    auto* rho_opt = green->add_option("--rho", rho, "cutoff half-width in the normal variable");
    auto* c1_opt = green->add_option("--c1", c1, "symbol cutoff level");
    green->add_option("--order", gargs.order, "cutoff smoothness")->capture_default_str();
    common(green);

    SolveArgs sargs;
    auto* solve = app.add_subcommand("solve", "find a standing wave by the dual variational method");
    add_model_options(solve, model);
    solve->add_option("--p", sargs.p, "nonlinearity exponent")->required();
    solve->add_option("--points", sargs.points, "grid points per axis (default 256, or 64 in 3D)");
    solve->add_option("--half-length", sargs.half_length, "box half-length L")->capture_default_str();
    solve->add_option("--eps", sargs.eps, "decreasing absorption schedule");
    solve->add_option("--max-iter", sargs.max_iter, "iterations per absorption stage")->capture_default_str();
    solve->add_option("--tol", sargs.tol, "gradient norm tolerance")->capture_default_str();
    solve->add_option("--seed", sargs.seed, "seed for the initial guess")->capture_default_str();
    solve->add_flag("--no-tune", sargs.no_tune, "keep L as given instead of moving lattice points off the zero set");
    common(solve);

    // Required options may come from the config file, so enforce them after merging.
    auto defer_required = [](CLI::App* sub, std::vector<std::pair<CLI::App*, CLI::Option*>>& req) {
        for (CLI::Option* o : sub->get_options())
            if (o->get_required()) {
                req.emplace_back(sub, o);
                o->required(false);
            }
    };
    std::vector<std::pair<CLI::App*, CLI::Option*>> required;
    defer_required(region, required);
    defer_required(solve, required);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (const char* t = std::getenv("QUARTWAVE_THREADS")) {
            const int n = std::atoi(t);
            if (n < 1) throw qw::InputError("QUARTWAVE_THREADS must be a positive integer");
            qw::set_fft_threads(n);
        }
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) apply_config(sub, qw::io::read_json(config_path));
        for (const auto& [owner, o] : required)
            if (owner == sub && o->count() == 0)
                throw qw::InputError("missing required option " + o->get_name());
        const fs::path out = prepare_out(out_dir);

        if (sub == classify) return run_classify(model, out);
        if (sub == region) return run_region(rdim, rk, resolution, out);
        if (sub == green) {
            if (rho_opt->count()) gargs.rho = rho;
            if (c1_opt->count()) gargs.c1 = c1;
            return run_green(model, gargs, out);
        }
        return run_solve(model, sargs, out);
    } catch (const qw::AssumptionViolation& e) {
        std::cerr << "assumption " << e.assumption() << " violated: " << e.what() << "\n";
        return kAssumption;
    } catch (const qw::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const qw::NonConvergence& e) {
        std::cerr << "did not converge: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const qw::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    }
}
