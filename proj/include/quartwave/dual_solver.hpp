// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dual variational solver on a periodic box.
//
// With v = |u|^{p-2} u the equation F(D) u = |u|^{p-2} u becomes
// R v = |v|^{p'-2} v, the critical-point equation of
//
//   J(v) = |v|_{p'}^{p'} / p' - (1/2) Re <v, R_eps v>,
//
// where R_eps has the multiplier 1/(F - i eps). Only the real part of that
// multiplier, K = F / (F^2 + eps^2), enters J, so J stays real at eps > 0.

#include "quartwave/common.hpp"
#include "quartwave/fourier_grid.hpp"
#include "quartwave/symbol_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace quartwave {

/// Grid, symbol values on the lattice and FFT plans; shared read-only between states.
class SpectralModel {
public:
    SpectralModel(const FourierGrid& g, const ModelParams& p) : grid_(g), params_(p), fft_(g) {
        validate(p);
        check_resolution(g, p);
        symbol_ = symbol_on_lattice(g, p);
    }

    const FourierGrid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    const std::vector<double>& symbol() const { return symbol_; }

    Field forward(Field f) const {
        fft_.forward(f);
        return f;
    }
    Field backward(Field f) const {
        fft_.backward(f);
        const double s = 1.0 / static_cast<double>(f.size());
        for (auto& c : f) c *= s;
        return f;
    }

    /// Inverse transform of m(F(xi)) f^(xi).
    template <class M>
    Field apply(const Field& f, M&& m) const {
        Field h = forward(f);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] *= m(symbol_[i]);
        return backward(std::move(h));
    }

private:
    FourierGrid grid_;
    ModelParams params_;
    FftPlan fft_;
    std::vector<double> symbol_;
};

inline std::shared_ptr<const SpectralModel> make_spectral_model(const FourierGrid& g, const ModelParams& p) {
    return std::make_shared<const SpectralModel>(g, p);
}

namespace detail {

inline void check_epsilon(double eps) {
    if (!(eps > 0.0)) throw InputError("epsilon must be positive: F - i eps vanishes on M at eps = 0");
}

inline double symmetric_multiplier(double f, double eps) { return f / (f * f + eps * eps); }

} // namespace detail

/// Multiplier 1/(F - i eps).
inline Field resolvent_apply(const SpectralModel& m, double eps, const Field& f) {
    detail::check_epsilon(eps);
    return m.apply(f, [eps](double F) { return Complex(1.0, 0.0) / Complex(F, -eps); });
}

/// Multiplier 1/(F + i eps), the adjoint of resolvent_apply.
inline Field resolvent_apply_conj(const SpectralModel& m, double eps, const Field& f) {
    detail::check_epsilon(eps);
    return m.apply(f, [eps](double F) { return Complex(1.0, 0.0) / Complex(F, eps); });
}

/// (R + R*) / 2, multiplier F / (F^2 + eps^2).
inline Field symmetric_resolvent_apply(const SpectralModel& m, double eps, const Field& f) {
    detail::check_epsilon(eps);
    return m.apply(f, [eps](double F) { return Complex(detail::symmetric_multiplier(F, eps), 0.0); });
}

inline Field resolvent_apply(const FourierGrid& g, const ModelParams& p, double eps, const Field& f) {
    return resolvent_apply(SpectralModel(g, p), eps, f);
}

/// sum conj(a) b dV
inline Complex inner(const FourierGrid& g, const Field& a, const Field& b) {
    if (a.size() != b.size()) throw InputError("fields of different size");
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc * g.cell_volume();
}

inline double power_integral(const FourierGrid& g, const Field& v, double q) {
    double acc = 0.0;
    for (const auto& c : v) acc += std::pow(std::abs(c), q);
    return acc * g.cell_volume();
}

inline double l2_norm(const FourierGrid& g, const Field& v) { return std::sqrt(power_integral(g, v, 2.0)); }

inline double sobolev_critical_exponent(int dim) { return dim <= 4 ? INFINITY : 2.0 * dim / (dim - 4.0); }

/// p must lie in (p1, 2N/(N-4)_+); returns p1.
inline double check_exponent(const ModelParams& params, double p) {
    const auto regime = classify_regime(params);
    if (!regime.p1) throw InputError("no finite threshold p1 for this model (k = 0)");
    const double p1 = to_double(*regime.p1);
    if (!(p > p1)) {
        std::ostringstream msg;
        msg << "exponent p = " << p << " must exceed the threshold p1 = " << p1;
        throw InputError(msg.str());
    }
    if (!(p < sobolev_critical_exponent(params.dim))) {
        std::ostringstream msg;
        msg << "exponent p = " << p << " must be below 2N/(N-4) = " << sobolev_critical_exponent(params.dim);
        throw InputError(msg.str());
    }
    return p1;
}

struct DualState {
    std::shared_ptr<const SpectralModel> model;
    double p = 7.0;
    double epsilon = 1e-2;
    Field v;

    double dual_exponent() const { return p / (p - 1.0); }
    const FourierGrid& grid() const { return model->grid(); }
};

inline void validate(const DualState& s) {
    if (!s.model) throw InputError("state has no spectral model");
    if (!(s.p > 2.0)) throw InputError("exponent p must exceed 2");
    detail::check_epsilon(s.epsilon);
    if (s.v.size() != s.grid().size()) throw InputError("field size does not match the grid");
}

/// <v, R_eps v> by Parseval; the imaginary part is the absorption term.
inline Complex resolvent_pairing(const DualState& s) {
    validate(s);
    const Field h = s.model->forward(s.v);
    const auto& F = s.model->symbol();
    Complex acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) acc += std::norm(h[i]) / Complex(F[i], -s.epsilon);
    return acc * s.grid().cell_volume() / static_cast<double>(h.size());
}

/// <v, (R + R*)/2 v> computed in physical space; real up to rounding.
inline Complex symmetric_pairing(const DualState& s) {
    validate(s);
    return inner(s.grid(), s.v, symmetric_resolvent_apply(*s.model, s.epsilon, s.v));
}

inline double dual_functional(const DualState& s) {
    validate(s);
    const double q = s.dual_exponent();
    return power_integral(s.grid(), s.v, q) / q - 0.5 * resolvent_pairing(s).real();
}

namespace detail {

// (|v|^2 + delta^2)^{(q-2)/2} v with delta = 1e-12 max|v|
inline Field nonlinear_part(const Field& v, double q) {
    double vmax = 0.0;
    for (const auto& c : v) vmax = std::max(vmax, std::abs(c));
    Field out(v.size());
    if (vmax == 0.0) return out;
    const double d2 = 1e-24 * vmax * vmax;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::pow(std::norm(v[i]) + d2, 0.5 * (q - 2.0)) * v[i];
    return out;
}

} // namespace detail

/// Gradient of J for the real inner product Re <., .>.
inline Field dual_gradient(const DualState& s) {
    validate(s);
    Field g = detail::nonlinear_part(s.v, s.dual_exponent());
    const Field kv = symmetric_resolvent_apply(*s.model, s.epsilon, s.v);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= kv[i];
    return g;
}

/// L2 norm (with cell volume) of the gradient.
inline double gradient_norm(const DualState& s) { return l2_norm(s.grid(), dual_gradient(s)); }

/// Relative L2 norm of F(D) u - |u|^{p-2} u, with F(D) applied spectrally.
inline double pde_residual(const SpectralModel& m, const Field& u, double p) {
    if (u.size() != m.grid().size()) throw InputError("field size does not match the grid");
    Field lin = m.apply(u, [](double F) { return Complex(F, 0.0); });
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Complex nl = std::pow(std::abs(u[i]), p - 2.0) * u[i];
        num += std::norm(lin[i] - nl);
        den += std::norm(nl);
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline double pde_residual(const FourierGrid& g, const ModelParams& params, const Field& u, double p) {
    return pde_residual(SpectralModel(g, params), u, p);
}

/// Share of sum |f|^2 on points with some |x_d| in the outer eighth of the box.
inline double boundary_mass_fraction(const FourierGrid& g, const Field& f) {
    double edge = 0.0, total = 0.0;
    const double cut = 0.875 * g.half_length;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = g.point(i);
        const double w = std::norm(f[i]);
        total += w;
        for (int d = 0; d < g.dim; ++d)
            if (std::abs(x[d]) >= cut) {
                edge += w;
                break;
            }
    }
    return total == 0.0 ? 0.0 : edge / total;
}

struct SolverConfig {
    std::vector<double> epsilon_schedule{1e-1, 1e-2, 1e-3, 1e-4};
    int max_iterations = 5000;          // per epsilon stage
    double gradient_tolerance = 1e-9;   // on the L2 gradient norm
    double initial_step = 0.1;
    double min_step = 1e-4;
    double max_step = 1.0;
    int nonmonotone_window = 10;        // J may rise above the max of this many previous values only by rounding
    std::uint64_t seed = 0;             // 0: carrier along +xi_1; otherwise a random carrier direction
    int path_points = 64;
    double seed_width = 0.3;            // Gaussian width of the seed around its carrier, in xi
    double seed_band = 0.5;             // seed supported where 0 < F < seed_band
    std::vector<double> center;         // seed centre in x (default: origin)
    Field initial_guess;                // replaces the seed when non-empty (continuation)
    bool tune_lattice = true;
    double max_lattice_offset = 0.015;  // relative stretch of L allowed when tuning
};

inline void validate(const SolverConfig& c) {
    if (c.epsilon_schedule.empty()) throw InputError("epsilon schedule is empty");
    for (std::size_t i = 0; i < c.epsilon_schedule.size(); ++i) {
        if (!(c.epsilon_schedule[i] > 0.0)) throw InputError("epsilon schedule must be positive");
        if (i > 0 && !(c.epsilon_schedule[i] < c.epsilon_schedule[i - 1]))
            throw InputError("epsilon schedule must be strictly decreasing");
    }
    if (c.max_iterations < 1 || !(c.gradient_tolerance > 0.0)) throw InputError("need max_iterations >= 1 and a positive tolerance");
    if (!(c.min_step > 0.0) || !(c.max_step >= c.min_step) || !(c.initial_step > 0.0)) throw InputError("bad step-size parameters");
    if (c.path_points < 2 || c.nonmonotone_window < 1) throw InputError("need path_points >= 2 and a positive window");
    if (!(c.seed_width > 0.0) || !(c.seed_band > 0.0)) throw InputError("seed width and band must be positive");
}

struct StageReport {
    double epsilon = 0.0;
    int iterations = 0;
    double J = 0.0;
    double gradient_norm = 0.0;
    double pde_residual = 0.0;
    double boundary_mass = 0.0;
    bool converged = false;
};

struct CriticalPointReport {
    bool converged = false;
    std::string message;
    double p = 0.0;
    double p1 = 0.0;
    double epsilon = 0.0;           // last epsilon reached
    double J = 0.0;                 // mountain-pass level estimate c at that epsilon
    double J_extrapolated = 0.0;    // Richardson in eps^2 over the last two stages
    double path_level = 0.0;        // max of J on the initial straight path
    double gradient_norm = 0.0;
    double pde_residual = 0.0;
    double dual_norm = 0.0;         // |v|_{p'}
    double boundary_mass = 0.0;     // of |v|^2
    double boundary_mass_profile = 0.0;  // of |u|^2
    std::uint64_t seed = 0;
    std::array<double, 3> carrier{0, 0, 0};
    FourierGrid grid;
    double requested_half_length = 0.0;
    double lattice_offset = 0.0;
    double lattice_gap = 0.0;
    std::vector<StageReport> stages;
    Field u;                        // (R + R*)/2 v at the last epsilon
    Field v;
};

namespace detail {

/// Largest r with F(r d) = 0 for the unit direction d.
inline double carrier_radius(const ModelParams& p, const std::array<double, 3>& d) {
    double best = -1.0;
    for (double r : num::real_roots({p.alpha, -p.v_mag * d[0], -p.beta, 0.0, 1.0}))
        if (r > 0.0 && r > best) best = r;
    if (best <= 0.0) throw NumericalError("seed direction does not meet M");
    return best;
}

inline std::array<double, 3> seed_direction(int dim, std::uint64_t seed) {
    std::array<double, 3> d{1.0, 0.0, 0.0};
    if (seed == 0) return d;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += (d[i] = n01(rng)) * d[i];
    for (int i = 0; i < dim; ++i) d[i] /= std::sqrt(s);
    return d;
}

// Gaussian bump around a carrier on M, restricted to the outer band 0 < F < band
// so that <w, K w> > 0 and the ray through w rises and then falls.
inline Field seed_field(const SpectralModel& m, const SolverConfig& c, std::array<double, 3>& carrier) {
    const auto& g = m.grid();
    const auto d = seed_direction(g.dim, c.seed);
    const double r0 = carrier_radius(m.params(), d);
    for (int i = 0; i < 3; ++i) carrier[i] = r0 * d[i];
    std::array<double, 3> shift{0, 0, 0};
    for (int i = 0; i < g.dim; ++i) shift[i] = g.half_length + (i < static_cast<int>(c.center.size()) ? c.center[i] : 0.0);
    Field h(g.size());
    bool any = false;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double F = m.symbol()[i];
        if (!(F > 0.0 && F < c.seed_band)) continue;
        const auto k = g.wavevector(i);
        double d2 = 0.0, phase = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            d2 += (k[a] - carrier[a]) * (k[a] - carrier[a]);
            phase -= k[a] * shift[a];
        }
        const double amp = std::exp(-0.5 * d2 / (c.seed_width * c.seed_width));
        if (amp < 1e-300) continue;
        h[i] = amp * std::polar(1.0, phase);
        any = true;
    }
    if (!any) throw NumericalError("no lattice frequency in the seed band; refine the grid or widen seed_band");
    return m.backward(std::move(h));
}

/// Descent state kept in sync: v, K v and the pieces of J.
struct Iterate {
    Field v, kv;
    double A = 0.0;  // |v|_{p'}^{p'}
    double B = 0.0;  // <v, K v>
    double J(double q) const { return A / q - 0.5 * B; }
};

inline Iterate make_iterate(const SpectralModel& m, double eps, double q, Field v) {
    Iterate it;
    it.kv = symmetric_resolvent_apply(m, eps, v);
    it.A = power_integral(m.grid(), v, q);
    it.B = inner(m.grid(), v, it.kv).real();
    it.v = std::move(v);
    return it;
}

/// Rescale onto the ray maximum t = (A/B)^{1/(2-q)}; B <= 0 means the ray never comes down.
inline bool project_to_ray_max(Iterate& it, double q) {
    if (!(it.B > 0.0) || !(it.A > 0.0) || !std::isfinite(it.A) || !std::isfinite(it.B)) return false;
    const double t = std::pow(it.A / it.B, 1.0 / (2.0 - q));
    for (auto& c : it.v) c *= t;
    for (auto& c : it.kv) c *= t;
    it.A *= std::pow(t, q);
    it.B *= t * t;
    return true;
}

} // namespace detail

/// Mountain-pass search on the periodic box with epsilon continuation.
///
/// For this J every ray t -> t v rises, peaks once and falls to -infinity,
/// so paths can be taken as rays through points of the ray-maximum set.
/// Deforming the path means moving that point downhill along the set, which
/// is what the preconditioned Barzilai-Borwein descent below does.
inline CriticalPointReport mountain_pass_search(const FourierGrid& grid_in, const ModelParams& params, double p,
                                                const SolverConfig& config = {}) {
    validate(config);
    validate(params);
    validate(grid_in);
    if (grid_in.dim != params.dim) throw InputError("grid and model dimensions differ");
    CriticalPointReport rep;
    rep.p = p;
    rep.p1 = check_exponent(params, p);
    rep.seed = config.seed;
    rep.requested_half_length = grid_in.half_length;

    FourierGrid grid = grid_in;
    if (config.tune_lattice) {
        const auto t = tune_half_length(grid_in, params, config.max_lattice_offset);
        grid = t.grid;
        rep.lattice_offset = t.relative_offset;
    }
    rep.grid = grid;
    rep.lattice_gap = lattice_gap(grid, params);
    const SpectralModel model(grid, params);
    const double q = p / (p - 1.0);

    // straight path 0 -> e = T w with J(e) < 0, sampled to locate its maximum
    const double eps0 = config.epsilon_schedule.front();
    Field start;
    if (config.initial_guess.empty()) {
        start = detail::seed_field(model, config, rep.carrier);
    } else {
        if (config.initial_guess.size() != grid.size()) throw InputError("initial guess does not match the grid");
        start = config.initial_guess;
    }
    auto it = detail::make_iterate(model, eps0, q, std::move(start));
    if (!(it.B > 0.0)) throw NumericalError("seed has <w, K w> <= 0; no mountain pass along its ray");
    double T = 1.0;
    while (std::pow(T, q) * it.A / q - 0.5 * T * T * it.B >= 0.0) T *= 2.0;
    rep.path_level = -INFINITY;
    for (int k = 1; k <= config.path_points; ++k) {
        const double t = T * k / config.path_points;
        rep.path_level = std::max(rep.path_level, std::pow(t, q) * it.A / q - 0.5 * t * t * it.B);
    }

    const auto& g = model.grid();
    auto grad_of = [&](const detail::Iterate& x) {
        Field gr = detail::nonlinear_part(x.v, q);
        for (std::size_t i = 0; i < gr.size(); ++i) gr[i] -= x.kv[i];
        return gr;
    };

    bool all_ok = true;
    for (double eps : config.epsilon_schedule) {
        it = detail::make_iterate(model, eps, q, std::move(it.v));
        if (!detail::project_to_ray_max(it, q)) throw NumericalError("state left the mountain-pass region (<v, K v> <= 0)");
        StageReport st;
        st.epsilon = eps;
        double step = config.initial_step;
        Field prev_v, prev_pg;
        std::deque<double> history{it.J(q)};
        Field gr = grad_of(it);
        double gnorm = l2_norm(g, gr);
        int iter = 0;
        for (; iter < config.max_iterations && gnorm >= config.gradient_tolerance; ++iter) {
            // diagonal preconditioner: inverse of the Hessian of the |v|^{p'} term
            double vmax = 0.0;
            for (const auto& c : it.v) vmax = std::max(vmax, std::abs(c));
            const double d2 = 1e-24 * vmax * vmax;
            Field pg(gr.size());
            for (std::size_t i = 0; i < gr.size(); ++i)
                pg[i] = gr[i] * std::pow(std::norm(it.v[i]) + d2, 0.5 * (2.0 - q)) / (q - 1.0);
            if (!prev_v.empty()) {
                Field sv(pg.size()), yv(pg.size());
                for (std::size_t i = 0; i < pg.size(); ++i) {
                    sv[i] = it.v[i] - prev_v[i];
                    yv[i] = pg[i] - prev_pg[i];
                }
                const double sy = inner(g, sv, yv).real();
                if (sy > 0.0) step = inner(g, sv, sv).real() / sy;
                step = std::clamp(step, config.min_step, config.max_step);
            }
            const double ref = *std::max_element(history.begin(), history.end());
            detail::Iterate trial;
            bool accepted = false;
            for (int tries = 0; tries < 40 && !accepted; ++tries) {
                Field y(it.v.size());
                for (std::size_t i = 0; i < y.size(); ++i) y[i] = it.v[i] - step * pg[i];
                trial = detail::make_iterate(model, eps, q, std::move(y));
                accepted = detail::project_to_ray_max(trial, q) && trial.J(q) <= ref + 1e-12 * std::abs(ref);
                if (!accepted) step *= 0.25;
            }
            if (!accepted) break;
            prev_v = std::move(it.v);
            prev_pg = std::move(pg);
            it = std::move(trial);
            history.push_back(it.J(q));
            if (static_cast<int>(history.size()) > config.nonmonotone_window) history.pop_front();
            gr = grad_of(it);
            gnorm = l2_norm(g, gr);
        }
        st.iterations = iter;
        st.J = it.J(q);
        st.gradient_norm = gnorm;
        st.pde_residual = pde_residual(model, it.kv, p);
        st.boundary_mass = boundary_mass_fraction(g, it.v);
        st.converged = gnorm < config.gradient_tolerance;
        rep.stages.push_back(st);
        rep.epsilon = eps;
        if (!st.converged) {
            all_ok = false;
            std::ostringstream msg;
            msg << "gradient norm " << gnorm << " above tolerance " << config.gradient_tolerance << " after " << iter
                << " iterations at eps = " << eps;
            rep.message = msg.str();
            break;
        }
    }

    const auto& last = rep.stages.back();
    rep.converged = all_ok;
    rep.J = last.J;
    rep.gradient_norm = last.gradient_norm;
    rep.pde_residual = last.pde_residual;
    rep.J_extrapolated = rep.J;
    if (rep.stages.size() >= 2) {
        const auto& a = rep.stages[rep.stages.size() - 2];
        const double e1 = a.epsilon * a.epsilon, e2 = last.epsilon * last.epsilon;
        rep.J_extrapolated = (last.J * e1 - a.J * e2) / (e1 - e2);
    }
    rep.dual_norm = std::pow(it.A, 1.0 / q);
    rep.boundary_mass = boundary_mass_fraction(g, it.v);
    rep.boundary_mass_profile = boundary_mass_fraction(g, it.kv);
    rep.u = std::move(it.kv);
    rep.v = std::move(it.v);
    if (rep.converged && !(rep.J > 0.0)) throw NumericalError("rejected candidate: J <= 0 at the critical point");
    if (rep.converged) rep.message = "converged";
    return rep;
}

} // namespace quartwave
