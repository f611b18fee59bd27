// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

// Library tour for one planar model: classify the zero set of the symbol,
// evaluate the outgoing Green function along the drift axis, then find a
// standing wave on a small grid and save it.
//
//   drift_standing_wave [output-dir]

#include "quartwave/dual_solver.hpp"
#include "quartwave/green_function.hpp"
#include "quartwave/io.hpp"
#include "quartwave/symbol_geometry.hpp"

#include <iostream>

namespace qw = quartwave;

int main(int argc, char** argv) {
    const std::filesystem::path out = argc > 1 ? argv[1] : "drift_standing_wave_out";
    const qw::ModelParams model{-1.0, 0.0, 0.1, 2};

    const auto regime = qw::classify_regime(model);
    std::cout << "regime " << qw::to_string(regime.regime) << ", k = " << regime.k_count
              << ", p1 = " << qw::to_double(*regime.p1) << "\n";

    const auto cut = qw::default_cutoff(model);
    for (double r : {25.0, 50.0, 100.0}) {
        const auto g = qw::green_value(model, cut, std::vector<double>{r, 0.0});
        std::cout << "G(" << r << ", 0) = " << g.total() << "  |G| sqrt(r) = " << std::abs(g.total()) * std::sqrt(r) << "\n";
    }

    const qw::FourierGrid grid{2, 20.0, 64};
    const auto rep = qw::mountain_pass_search(grid, model, 7.0);
    std::cout << "standing wave: J = " << rep.J << ", residual = " << rep.pde_residual
              << ", converged = " << std::boolalpha << rep.converged << "\n";

    qw::io::write_json(out / "report.json", qw::io::to_json(rep));
    qw::io::write_field(out / "u.bin", rep.grid, rep.u);
    qw::io::field_slice_table(rep.grid, rep.u, 0).save(out / "u_axis0.csv");
    std::cout << "wrote " << out.string() << "\n";
    return rep.converged ? 0 : 3;
}
