/*
 * Copyright 2026 The quartwave Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Outgoing Green function of F(D) for N = 2, 3:
//
//   G(x) = integral of e^{i x.xi} / (F(xi) - i0) d xi,
//
// with no (2 pi)^{-N} factor. Near M = {F = 0} the integral is written over
// the level sets M_tau (coarea), far from M it is an ordinary oscillatory
// integral.

#include "quartwave/common.hpp"
#include "quartwave/numerics.hpp"
#include "quartwave/symbol_geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

namespace quartwave {

// ---------------------------------------------------------------------------
// Cutoffs

/// C^order polynomial smoothstep: 0 at s <= 0, 1 at s >= 1.
inline double smoothstep(double s, int order) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const int n = order;
    double acc = 0.0, binom_a = 1.0;  // binom_a = C(n + k, k)
    for (int k = 0; k <= n; ++k) {
        if (k > 0) binom_a = binom_a * (n + k) / k;
        double binom_b = 1.0;  // C(2n + 1, n - k)
        for (int i = 1; i <= n - k; ++i) binom_b = binom_b * (2 * n + 2 - i) / i;
        acc += binom_a * binom_b * std::pow(-s, k);
    }
    return std::pow(s, n + 1) * acc;
}

/// Even bump: 1 on |t| <= width/2, 0 on |t| >= width.
inline double plateau_bump(double t, double width, int order) {
    const double s = (std::abs(t) - 0.5 * width) / (0.5 * width);
    return 1.0 - smoothstep(s, order);
}

struct CutoffSpec {
    double rho = 0.5;  // chi lives on [-rho, rho] in the tau variable
    double c1 = 0.25;  // psi(F) = 1 for |F| <= c1, 0 for |F| >= 2 c1
    int order = 2;

    double chi(double tau) const { return plateau_bump(tau, rho, order); }
    double psi(double f) const { return plateau_bump(f, 2.0 * c1, order); }
};

inline void validate(const CutoffSpec& c) {
    if (!(c.rho > 0.0) || !(c.c1 > 0.0) || c.order < 1) throw InputError("cutoff needs rho > 0, c1 > 0, order >= 1");
}

/// Levels where the level sets change topology, or where the profile pieces change.
inline std::vector<double> singular_levels(const ModelParams& p) {
    auto out = critical_values(p);
    if (p.beta >= 0.0) {
        const double base = p.alpha - 0.25 * p.beta * p.beta;
        const double shift = p.v_mag * std::sqrt(0.5 * p.beta);
        out.push_back(base + shift);
        out.push_back(base - shift);
    }
    return out;
}

/// rho = min(1, distance to the nearest singular level) / 2, c1 = rho / 2.
inline CutoffSpec default_cutoff(const ModelParams& p, int order = 2) {
    double m = 1.0;
    for (double v : singular_levels(p)) m = std::min(m, std::abs(v));
    if (!(m > 0.0)) throw AssumptionViolation("A3", "zero level is singular; no cutoff width available");
    return {0.5 * m, 0.25 * m, order};
}

// ---------------------------------------------------------------------------
// Level sets

namespace detail {

inline void check_green_dim(int dim) {
    if (dim != 2 && dim != 3) throw InputError("Green function evaluation supports N = 2 and N = 3 only");
}

inline void check_point(const ModelParams& p, std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.dim) throw InputError("point dimension does not match the model");
}

/// (x_1, |x~|): the symbol is rotation invariant about the first axis.
inline std::pair<double, double> axial_split(std::span<const double> x) {
    double t = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) t += x[i] * x[i];
    return {x[0], std::sqrt(t)};
}

/// Integral of e^{i s w_1} over the unit sphere S^{N-2}.
inline double sphere_average(int dim, double s) {
    return dim == 2 ? 2.0 * std::cos(s) : 2.0 * pi * num::bessel_j0(s);
}

inline double branch_hmax(const ProfileBranch& b) {
    double m = 0.0;
    for (int i = 1; i < 32; ++i) m = std::max(m, b.h(b.lo() + (b.hi() - b.lo()) * i / 32.0));
    return m;
}

/// z = mid - half cos(theta): removes the inverse square roots at both endpoints.
struct CosineMap {
    double mid, half;
    explicit CosineMap(const ProfileBranch& b) : mid(0.5 * (b.lo() + b.hi())), half(0.5 * (b.hi() - b.lo())) {}
    double z(double th) const { return mid - half * std::cos(th); }
    double dz(double th) const { return half * std::sin(th); }
};

/// Branch with h and D corrected so that they vanish exactly at the computed
/// endpoints. Without this an endpoint off by d loses O(sqrt(d)) of the
/// integral, which shows up as noise in tau.
struct FittedBranch {
    const ProfileBranch& b;
    double r_lo = 0.0, r_hi = 0.0, d_lo = 0.0, d_hi = 0.0;
    explicit FittedBranch(const ProfileBranch& br) : b(br) {
        (b.lo_kind() == EndpointKind::Axis ? r_lo : d_lo) = b.lo_kind() == EndpointKind::Axis ? b.radicand(b.lo()) : b.discriminant(b.lo());
        (b.hi_kind() == EndpointKind::Axis ? r_hi : d_hi) = b.hi_kind() == EndpointKind::Axis ? b.radicand(b.hi()) : b.discriminant(b.hi());
    }
    double lerp(double lo_v, double hi_v, double z) const {
        return (lo_v * (b.hi() - z) + hi_v * (z - b.lo())) / (b.hi() - b.lo());
    }
    double h(double z) const { return std::sqrt(std::max(b.radicand(z) - lerp(r_lo, r_hi, z), 0.0)); }
    double discriminant(double z) const { return b.discriminant(z) - lerp(d_lo, d_hi, z); }
};

/// Level-set branches with endpoints resolved to rounding level.
inline std::vector<ProfileBranch> level_branches(const ModelParams& p, double tau) {
    GeometryTolerances tol;
    tol.root = 1e-15;
    return profile_branches(p.shifted(tau), tol);
}

} // namespace detail

struct LevelSetNode {
    std::vector<double> point;
    double weight = 0.0;  // surface measure
    double grad_norm = 0.0;
};

struct LevelSetQuadrature {
    double tau = 0.0;
    std::vector<LevelSetNode> nodes;
    std::vector<ProfileBranch> branches;
    int panels = 0;       // Gauss panels per branch in the cosine variable
    int angular = 0;      // trapezoid nodes on S^{N-2}
};

/// Explicit nodes on M_tau: profile Gauss nodes times points of S^{N-2}.
inline LevelSetQuadrature level_set_quadrature(const ModelParams& p, double tau, int panels = 8, int angular = 32) {
    detail::check_green_dim(p.dim);
    if (panels < 1 || angular < 3) throw InputError("need panels >= 1 and angular >= 3");
    LevelSetQuadrature q;
    q.tau = tau;
    q.panels = panels;
    q.angular = p.dim == 2 ? 2 : angular;
    q.branches = detail::level_branches(p, tau);
    const auto& rule = num::gauss_rule<20>();
    for (const auto& b : q.branches) {
        const detail::CosineMap map(b);
        const double width = pi / panels;
        for (int k = 0; k < panels; ++k)
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                const double th = (k + 0.5) * width + 0.5 * width * rule.x[i];
                const double z = map.z(th), dz = map.dz(th);
                const double h = b.h(z), dh = b.dh(z);
                const double base = 0.5 * width * rule.w[i] * dz * std::sqrt(1.0 + dh * dh);
                const double gn = b.gradient_norm(z);
                if (p.dim == 2) {
                    for (double s : {1.0, -1.0}) q.nodes.push_back({{z, s * h}, base, gn});
                } else {
                    for (int a = 0; a < angular; ++a) {
                        const double phi = 2.0 * pi * a / angular;
                        q.nodes.push_back({{z, h * std::cos(phi), h * std::sin(phi)}, base * h * 2.0 * pi / angular, gn});
                    }
                }
            }
    }
    return q;
}

/// Sum of weight e^{i x.xi} / |grad F| over the nodes.
inline Complex integrate_phase(const LevelSetQuadrature& q, std::span<const double> x) {
    Complex acc = 0.0;
    for (const auto& n : q.nodes) {
        double ph = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ph += x[i] * n.point[i];
        acc += n.weight / n.grad_norm * Complex(std::cos(ph), std::sin(ph));
    }
    return acc;
}

struct PhaseOptions {
    double panel_scale = 1.0;  // multiplies the automatic panel count
};

/// a_x(tau): integral of e^{i x.xi} / |grad F| over M_tau.
///
/// The sphere S^{N-2} is integrated in closed form (2 cos or 2 pi J0); the
/// profile in the cosine variable with composite 20-point Gauss.
inline Complex level_set_phase(const ModelParams& p, std::span<const double> x, double tau,
                               const PhaseOptions& opt = {}) {
    detail::check_green_dim(p.dim);
    detail::check_point(p, x);
    const auto [x1, xt] = detail::axial_split(x);
    Complex acc = 0.0;
    for (const auto& b : detail::level_branches(p, tau)) {
        const detail::CosineMap map(b);
        const detail::FittedBranch fb(b);
        const double extent = std::abs(x1) * (b.hi() - b.lo()) + 2.0 * xt * detail::branch_hmax(b);
        const int panels = std::max(1, static_cast<int>(std::ceil(opt.panel_scale * (extent + 16.0) / 8.0)));
        auto f = [&](double th) {
            const double z = map.z(th);
            const double h = fb.h(z);
            const double d = fb.discriminant(z);
            if (!(d > 0.0)) throw NumericalError("level set degenerates: grad F vanishes on a node");
            const double radial = (p.dim == 2 ? 1.0 / h : 1.0) * detail::sphere_average(p.dim, h * xt);
            return Complex(std::cos(x1 * z), std::sin(x1 * z)) * (radial * map.dz(th) / (2.0 * std::sqrt(d)));
        };
        acc += num::composite_gauss<20>(f, 0.0, pi, panels);
    }
    return acc;
}

inline Complex level_set_phase(const ModelParams& p, const CutoffSpec& c, std::span<const double> x, double tau,
                               const PhaseOptions& opt = {}) {
    validate(c);
    if (std::abs(tau) > c.rho) throw InputError("level outside the cutoff support");
    return level_set_phase(p, x, tau, opt);
}

// ---------------------------------------------------------------------------
// Singular part

struct PvOptions {
    double tol = 1e-9;       // relative Gauss-Kronrod target
    unsigned max_depth = 15;
    double accept = 1e-6;    // relative error above which the result is rejected
    PhaseOptions phase{};
};

struct PvResult {
    Complex value;   // pv + i pi a(0)
    Complex pv;
    Complex a0;
    double error = 0.0;
};

namespace detail {

template <class F>
Complex gk_integrate(F&& f, double a, double b, const PvOptions& o, double& err, double& l1) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double e = 0.0, l = 0.0;
    const Complex v = GK::integrate(f, a, b, o.max_depth, o.tol, &e, &l);
    err += e;
    l1 += l;
    return v;
}

inline void check_accuracy(double err, double l1, const PvOptions& o, const char* what) {
    if (err > o.accept * std::max(l1, 1e-300)) {
        std::ostringstream msg;
        msg << what << ": estimated error " << err << " exceeds tolerance; refine the level grid";
        throw NumericalError(msg.str());
    }
}

} // namespace detail

/// pv of chi(tau) a(tau) / tau over [-rho, rho] plus i pi a(0), by the odd part of a.
inline PvResult pv_plus_delta(const std::function<Complex(double)>& a, const CutoffSpec& c, const PvOptions& o = {}) {
    validate(c);
    auto f = [&](double t) { return c.chi(t) * (a(t) - a(-t)) / t; };
    double err = 0.0, l1 = 0.0;
    // Rounding noise in a is amplified by 1/t, so adaptive refinement towards
    // 0 never settles; the innermost piece gets a fixed rule instead.
    const double t0 = c.rho / 64.0;
    const Complex inner = num::composite_gauss<20>(f, 0.0, t0, 1);
    err += std::abs(inner - num::composite_gauss<10>(f, 0.0, t0, 1));
    l1 += num::composite_gauss<20>([&](double t) { return std::abs(f(t)); }, 0.0, t0, 1);
    // chi is only C^order at rho/2
    const Complex pv = inner + detail::gk_integrate(f, t0, 0.5 * c.rho, o, err, l1) +
                       detail::gk_integrate(f, 0.5 * c.rho, c.rho, o, err, l1);
    detail::check_accuracy(err, l1, o, "principal value");
    const Complex a0 = a(0.0);
    return {pv + Complex(0.0, pi) * a0, pv, a0, err};
}

inline PvResult pv_plus_delta(const ModelParams& p, const CutoffSpec& c, std::span<const double> x,
                              const PvOptions& o = {}) {
    return pv_plus_delta([&](double t) { return level_set_phase(p, x, t, o.phase); }, c, o);
}

/// Integral of chi(tau) a(tau) / (tau - i eps) over [-rho, rho], by direct quadrature.
inline Complex absorbed_singular_part(const std::function<Complex(double)>& a, const CutoffSpec& c, double eps,
                                      const PvOptions& o = {}) {
    validate(c);
    if (!(eps > 0.0)) throw InputError("absorption must be positive");
    // +t and -t folded together; the odd part carries the same 1/t noise as the
    // pv, so the inner range again uses fixed rules, on panels graded at eps.
    auto f = [&](double t) {
        const Complex ap = a(t), am = a(-t);
        return c.chi(t) * ((ap - am) * t + Complex(0.0, eps) * (ap + am)) / (t * t + eps * eps);
    };
    const double t0 = c.rho / 64.0;
    std::vector<double> cuts{0.0};
    for (double s = eps; s < t0; s *= 10.0) cuts.push_back(s);
    cuts.push_back(t0);
    double err = 0.0, l1 = 0.0;
    Complex acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Complex fine = num::composite_gauss<20>(f, cuts[i], cuts[i + 1], 1);
        err += std::abs(fine - num::composite_gauss<10>(f, cuts[i], cuts[i + 1], 1));
        l1 += num::composite_gauss<20>([&](double t) { return std::abs(f(t)); }, cuts[i], cuts[i + 1], 1);
        acc += fine;
    }
    acc += detail::gk_integrate(f, t0, 0.5 * c.rho, o, err, l1) + detail::gk_integrate(f, 0.5 * c.rho, c.rho, o, err, l1);
    detail::check_accuracy(err, l1, o, "absorbed integral");
    return acc;
}

inline Complex absorbed_singular_part(const ModelParams& p, const CutoffSpec& c, std::span<const double> x, double eps,
                                      const PvOptions& o = {}) {
    return absorbed_singular_part([&](double t) { return level_set_phase(p, x, t, o.phase); }, c, eps, o);
}

// ---------------------------------------------------------------------------
// Smooth part
//
// (1 - chi(F)) / F decays like |xi|^{-4}, too slowly for a truncated box. With
// q = (|xi|^2 + a^2)^{-1} we subtract
//
//   w = q^2 + (beta + 2 a^2) q^3 + (3 a^4 + 3 a^2 beta + beta^2 - alpha) q^4 + |V| xi_1 q^4,
//
// which matches 1/F up to O(|xi|^{-9}) and has a closed-form transform, and
// integrate the remainder on a box.

struct SmoothPartOptions {
    double tail_tol = 1e-8;       // bound on the discarded remainder outside the box
    double max_radius = 400.0;
    double reference_scale = 1.0; // a
    double inner_width = 0.02;    // panel widths near M and far out
    double outer_width = 0.25;
    double phase_per_panel = 8.0; // radians of e^{i x xi} per 20-point panel
    double node_scale = 1.0;      // >1 refines every panel width
};

namespace detail {

/// Transform of (|xi|^2 + a^2)^{-m} in R^dim at |x| = R, and its R-derivative (m > dim / 2).
inline std::pair<double, double> power_transform(int dim, int m, double a, double R) {
    const double nu = m - 0.5 * dim;
    if (a * R < 1e-10)
        return {std::pow(pi, 0.5 * dim) * std::tgamma(nu) / std::tgamma(m) * std::pow(a, dim - 2 * m), 0.0};
    const double c = std::pow(2.0 * pi, 0.5 * dim) * std::pow(2.0, 1 - m) / std::tgamma(m) * std::pow(R / a, nu);
    return {c * std::cyl_bessel_k(nu, a * R), -a * c * std::cyl_bessel_k(std::abs(nu - 1.0), a * R)};
}

/// Transform of the subtracted reference at x = (x1, x~), |x~| = xt.
inline Complex reference_transform(const ModelParams& p, double a, double x1, double xt) {
    const double R = std::hypot(x1, xt), a2 = a * a;
    const double c3 = p.beta + 2.0 * a2;
    const double c4 = 3.0 * a2 * a2 + 3.0 * a2 * p.beta + p.beta * p.beta - p.alpha;
    const auto t4 = power_transform(p.dim, 4, a, R);
    Complex v = power_transform(p.dim, 2, a, R).first + c3 * power_transform(p.dim, 3, a, R).first + c4 * t4.first;
    // xi_1 g(|xi|) transforms to -i d/dx_1 of the radial transform
    if (R > 0.0) v += Complex(0.0, -p.v_mag * x1 / R * t4.second);
    return v;
}

inline std::vector<double> panel_edges(double lo, double hi, double width) {
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width - 1e-12)));
    std::vector<double> e(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = lo + (hi - lo) * i / n;
    return e;
}

struct Nodes {
    std::vector<double> x, w;
    void add_panels(const std::vector<double>& edges) {
        const auto& rule = num::gauss_rule<20>();
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            const double mid = 0.5 * (edges[k] + edges[k + 1]), half = 0.5 * (edges[k + 1] - edges[k]);
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                x.push_back(mid + half * rule.x[i]);
                w.push_back(half * rule.w[i]);
            }
        }
    }
};

} // namespace detail

/// Smooth part for a batch of points, sharing one quadrature grid.
class SmoothPartEvaluator {
public:
    SmoothPartEvaluator(const ModelParams& p, const CutoffSpec& c, const SmoothPartOptions& o = {})
        : p_(p), c_(c), o_(o) {
        detail::check_green_dim(p.dim);
        validate(c);
        // beyond r_in, F > rho on every ray
        double r_out = 1.0;
        for (double r : num::real_roots({p.alpha - c.rho, -p.v_mag, -p.beta, 0.0, 1.0}))
            r_out = std::max(r_out, r);
        r_in_ = r_out + 0.5;
        radius_ = choose_radius();
    }

    double radius() const { return radius_; }
    double tail_bound() const { return tail_at(radius_); }

    /// Remainder integrand (1 - chi(F)) / F - w at axial coordinate z and distance rho from the axis.
    double remainder(double z, double r) const {
        const double s = z * z + r * r;
        const double f = s * s - p_.beta * s + p_.alpha - p_.v_mag * z;
        const double cut = 1.0 - c_.chi(f);
        const double a2 = o_.reference_scale * o_.reference_scale;
        const double q = 1.0 / (s + a2), q2 = q * q;
        const double c4 = 3.0 * a2 * a2 + 3.0 * a2 * p_.beta + p_.beta * p_.beta - p_.alpha;
        const double w = q2 + (p_.beta + 2.0 * a2) * q2 * q + (c4 + p_.v_mag * z) * q2 * q2;
        return (cut == 0.0 ? 0.0 : cut / f) - w;
    }

    std::vector<Complex> evaluate(const std::vector<std::vector<double>>& xs) const {
        double m1 = 0.0, mt = 0.0;
        std::vector<std::pair<double, double>> split;
        for (const auto& x : xs) {
            detail::check_point(p_, x);
            split.push_back(detail::axial_split(x));
            m1 = std::max(m1, std::abs(split.back().first));
            mt = std::max(mt, split.back().second);
        }
        const auto zs = nodes(m1, true), rs = nodes(mt, false);

        // one transverse kernel per distinct |x~|
        std::map<double, std::size_t> kernel_of;
        std::vector<std::vector<double>> kernels;
        for (const auto& [x1, xt] : split) {
            if (kernel_of.count(xt)) continue;
            kernel_of[xt] = kernels.size();
            std::vector<double> k(rs.x.size());
            for (std::size_t j = 0; j < k.size(); ++j) {
                const double r = rs.x[j];
                k[j] = rs.w[j] * (p_.dim == 2 ? 2.0 * std::cos(xt * r) : 2.0 * pi * r * num::bessel_j0(xt * r));
            }
            kernels.push_back(std::move(k));
        }

        std::vector<Complex> acc(xs.size(), 0.0);
        std::vector<double> row(rs.x.size()), inner(kernels.size());
        for (std::size_t i = 0; i < zs.x.size(); ++i) {
            const double z = zs.x[i];
            for (std::size_t j = 0; j < rs.x.size(); ++j) row[j] = remainder(z, rs.x[j]);
            for (std::size_t k = 0; k < kernels.size(); ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j < row.size(); ++j) s += kernels[k][j] * row[j];
                inner[k] = s * zs.w[i];
            }
            for (std::size_t n = 0; n < xs.size(); ++n) {
                const double ph = split[n].first * z;
                acc[n] += inner[kernel_of.at(split[n].second)] * Complex(std::cos(ph), std::sin(ph));
            }
        }
        for (std::size_t n = 0; n < xs.size(); ++n)
            acc[n] += detail::reference_transform(p_, o_.reference_scale, split[n].first, split[n].second);
        return acc;
    }

private:
    double sphere_area() const { return p_.dim == 2 ? 2.0 * pi : 4.0 * pi; }

    static constexpr int decay = 9;

    // |remainder| <= C r^{-9} for r >= r0, with C sampled on the circle r = r0
    double tail_at(double R) const { return tail_c_ * sphere_area() * std::pow(R, p_.dim - decay) / (decay - p_.dim); }

    double choose_radius() {
        const double r0 = std::max(4.0, 2.0 * r_in_);
        double c = 0.0;
        for (int i = 0; i <= 64; ++i) {
            const double th = pi * i / 64.0;
            c = std::max(c, std::abs(remainder(r0 * std::cos(th), r0 * std::sin(th))));
        }
        // a small margin for the next order in 1/r
        tail_c_ = 2.0 * c * std::pow(r0, decay);
        double R = std::pow(tail_c_ * sphere_area() / ((decay - p_.dim) * o_.tail_tol), 1.0 / (decay - p_.dim));
        R = std::max(R, r0);
        if (R > o_.max_radius) {
            std::ostringstream msg;
            msg << "truncation box too small: tail bound " << tail_at(o_.max_radius) << " at radius " << o_.max_radius;
            throw NumericalError(msg.str());
        }
        return R;
    }

    detail::Nodes nodes(double freq, bool symmetric) const {
        const double cap = freq > 0.0 ? o_.phase_per_panel / freq : 1e300;
        const double wi = std::min(o_.inner_width, cap) / o_.node_scale;
        const double wo = std::min(o_.outer_width, cap) / o_.node_scale;
        detail::Nodes n;
        if (symmetric) n.add_panels(detail::panel_edges(-radius_, -r_in_, wo));
        n.add_panels(detail::panel_edges(symmetric ? -r_in_ : 0.0, r_in_, wi));
        n.add_panels(detail::panel_edges(r_in_, radius_, wo));
        return n;
    }

    ModelParams p_;
    CutoffSpec c_;
    SmoothPartOptions o_;
    double r_in_ = 0.0, radius_ = 0.0, tail_c_ = 0.0;
};

inline Complex smooth_part(const ModelParams& p, const CutoffSpec& c, std::span<const double> x,
                           const SmoothPartOptions& o = {}) {
    return SmoothPartEvaluator(p, c, o).evaluate({std::vector<double>(x.begin(), x.end())}).front();
}

// ---------------------------------------------------------------------------
// Full Green function

struct GreenOptions {
    PvOptions pv{};
    SmoothPartOptions smooth{};
};

struct GreenSample {
    std::vector<double> x;
    Complex g1;       // smooth part
    Complex g2;       // pv + i pi a_x(0)
    Complex pv;
    Complex a0;
    double g1_error = 0.0;  // tail bound of the truncated box
    double g2_error = 0.0;  // Gauss-Kronrod estimate
    Complex total() const { return g1 + g2; }
    double error() const { return g1_error + g2_error; }
};

inline void check_green_inputs(const ModelParams& p, std::span<const double> x) {
    detail::check_green_dim(p.dim);
    detail::check_point(p, x);
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) throw InputError("x must be nonzero");
    const auto report = assess_assumptions(p);
    if (!report.all_hold()) throw AssumptionViolation(report.first_failure(), "assumption " + report.first_failure() + " fails");
}

inline std::vector<GreenSample> green_values(const ModelParams& p, const CutoffSpec& c,
                                             const std::vector<std::vector<double>>& xs, const GreenOptions& o = {}) {
    for (const auto& x : xs) check_green_inputs(p, x);
    const SmoothPartEvaluator smooth(p, c, o.smooth);
    const auto g1 = smooth.evaluate(xs);
    std::vector<GreenSample> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto s = pv_plus_delta(p, c, xs[i], o.pv);
        out.push_back({xs[i], g1[i], s.value, s.pv, s.a0, smooth.tail_bound(), s.error});
    }
    return out;
}

inline GreenSample green_value(const ModelParams& p, const CutoffSpec& c, std::span<const double> x,
                               const GreenOptions& o = {}) {
    return green_values(p, c, {std::vector<double>(x.begin(), x.end())}, o).front();
}

struct DecayFit {
    double slope = 0.0;
    double constant = 0.0;  // |G| ~ constant * |x|^slope
    std::vector<double> radii;
    std::vector<double> magnitudes;
    std::vector<GreenSample> samples;
};

/// Least-squares fit of log|G| against log|x| along a ray, log-spaced radii.
inline DecayFit green_decay_fit(const ModelParams& p, const CutoffSpec& c, std::vector<double> direction,
                                double r_min = 20.0, double r_max = 200.0, int count = 16, const GreenOptions& o = {}) {
    if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw InputError("need count >= 2 and 0 < r_min < r_max");
    double norm = 0.0;
    for (double d : direction) norm += d * d;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw InputError("direction must be nonzero");
    std::vector<std::vector<double>> xs;
    DecayFit fit;
    for (int i = 0; i < count; ++i) {
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (count - 1));
        std::vector<double> x(direction.size());
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = r * direction[k] / norm;
        xs.push_back(std::move(x));
        fit.radii.push_back(r);
    }
    std::vector<double> lx, ly;
    fit.samples = green_values(p, c, xs, o);
    for (const auto& s : fit.samples) fit.magnitudes.push_back(std::abs(s.total()));
    for (int i = 0; i < count; ++i) {
        lx.push_back(std::log(fit.radii[i]));
        ly.push_back(std::log(fit.magnitudes[i]));
    }
    const auto [slope, icpt] = num::linear_fit(lx, ly);
    fit.slope = slope;
    fit.constant = std::exp(icpt);
    return fit;
}

// ---------------------------------------------------------------------------
// Dyadic pieces (N = 2)
//
// eta(r) = 1 for r <= 1, 0 for r >= 2, eta_j(x) = eta(x / 2^j) - eta(x / 2^{j-1}).
// The transform of eta_j G_2, with G_2 the inverse transform of
// psi(F) / (F - i0), is the convolution H_j * psi(F) / (F - i0) where
// H_j(k) = 4^j h(2^j |k|) - 4^{j-1} h(2^{j-1} |k|) and
// h(kappa) = (2 pi)^{-1} integral_0^2 eta(r) J0(kappa r) r dr.
//
// The convolution is a pv integral over levels tau of integrals over M_tau.
// H_j is cut off at |k| = 2 kappa_max / 2^j, so each target point only sees
// a small patch of a few level curves; all targets share one (tau, theta)
// grid with spacing proportional to 2^{-j}.

/// eta_j(r) = eta(r / 2^j) - eta(r / 2^{j-1}) with eta = 1 on [0, 1], 0 beyond 2.
inline double dyadic_window(int j, double r, int order = 2) {
    return plateau_bump(std::ldexp(r, -j), 2.0, order) - plateau_bump(std::ldexp(r, 1 - j), 2.0, order);
}

struct DyadicOptions {
    int surface_samples = 8;     // points sampled on each M_sigma for the max
    double kernel_cutoff = 12.0; // h(kappa) tapered to 0 at this kappa
    double resolution = 1.0;     // >1 refines the tau and theta grids
};

namespace detail {

class DyadicKernel {
public:
    DyadicKernel(int order, double kappa_max) : kmax_(kappa_max) {
        const int n = static_cast<int>(kappa_max / step_) + 2;
        table_.resize(n);
        const auto& rule = num::gauss_rule<20>();
        for (int i = 0; i < n; ++i) {
            const double k = i * step_;
            // plateau part in closed form, transition by quadrature
            double v = k == 0.0 ? 0.5 : num::bessel_j1(k) / k;
            const int panels = 4 + static_cast<int>(k / 4.0);
            for (int pnl = 0; pnl < panels; ++pnl) {
                const double lo = 1.0 + static_cast<double>(pnl) / panels, hw = 0.5 / panels;
                for (std::size_t q = 0; q < rule.x.size(); ++q) {
                    const double r = lo + hw + hw * rule.x[q];
                    v += hw * rule.w[q] * plateau_bump(r, 2.0, order) * num::bessel_j0(k * r) * r;
                }
            }
            // taper so that H_j stays continuous where it is cut off
            table_[i] = v / (2.0 * pi) * (1.0 - smoothstep((k - 0.75 * kappa_max) / (0.25 * kappa_max), 2));
        }
    }

    /// h(kappa), linear interpolation in the table.
    double h(double kappa) const {
        if (kappa >= kmax_) return 0.0;
        const double u = kappa / step_;
        const auto i = static_cast<std::size_t>(u);
        const double f = u - i;
        return (1.0 - f) * table_[i] + f * table_[i + 1];
    }

    double H(int j, double dist) const {
        const double s = std::ldexp(1.0, j);
        return s * s * h(s * dist) - 0.25 * s * s * h(0.5 * s * dist);
    }

    /// H_j vanishes beyond this distance.
    double support(int j) const { return 2.0 * kmax_ / std::ldexp(1.0, j); }

private:
    double kmax_;
    double step_ = 1.0 / 256.0;
    std::vector<double> table_;
};

inline const DyadicKernel& dyadic_kernel(int order, double kappa_max) {
    static std::mutex m;
    static std::map<std::pair<int, double>, std::unique_ptr<DyadicKernel>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto& k = cache[{order, kappa_max}];
    if (!k) k = std::make_unique<DyadicKernel>(order, kappa_max);
    return *k;
}

struct CurveNode {
    double z, h, w;  // w = quadrature weight / |grad F| per unit length of the profile
};

/// Upper-half profile of M_tau on a Gauss grid with arc spacing about `spacing`.
inline std::vector<CurveNode> curve_nodes(const ModelParams& p, double tau, double spacing) {
    std::vector<CurveNode> out;
    const auto& rule = num::gauss_rule<20>();
    for (const auto& br : level_branches(p, tau)) {
        const CosineMap map(br);
        const FittedBranch fb(br);
        const double len = (br.hi() - br.lo()) + 2.0 * branch_hmax(br);
        const int panels = 2 + static_cast<int>(std::ceil(len / (20.0 * spacing)));
        const double width = pi / panels;
        for (int k = 0; k < panels; ++k)
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                const double th = (k + 0.5) * width + 0.5 * width * rule.x[i];
                const double z = map.z(th), h = fb.h(z);
                out.push_back({z, h, 0.5 * width * rule.w[i] * map.dz(th) / (2.0 * h * std::sqrt(fb.discriminant(z)))});
            }
    }
    std::sort(out.begin(), out.end(), [](const CurveNode& a, const CurveNode& b) { return a.z < b.z; });
    return out;
}

} // namespace detail

/// Integral over |sigma| <= 3 c1 / 4 of max over M_sigma of |transform of eta_j G_2|^2, divided by 2^j.
inline double dyadic_bound_probe(const ModelParams& p, const CutoffSpec& c, int j, const DyadicOptions& o = {}) {
    if (p.dim != 2) throw InputError("dyadic probe is implemented for N = 2");
    if (j < 1 || j > 12) throw InputError("dyadic index j must lie in [1, 12]");
    validate(c);
    const auto report = assess_assumptions(p);
    if (!report.all_hold()) throw AssumptionViolation(report.first_failure(), "assumption " + report.first_failure() + " fails");
    const double top = 2.0 * c.c1;  // psi support in the level variable
    if (top > c.rho * (1.0 + 1e-12)) throw InputError("psi support 2 c1 must fit inside the level range rho");

    const auto& kernel = detail::dyadic_kernel(c.order, o.kernel_cutoff);
    const double scale = std::ldexp(1.0, -j);
    const double reach = kernel.support(j);
    const CutoffSpec psi_cut{top, c.c1, c.order};  // chi of this spec is psi

    // targets: graded sigma panels (the integrand is about min(sigma^-2, 4^j)),
    // a few points on each M_sigma
    struct Target {
        double sigma, weight, xi1, xi2;
        Complex value{0.0};
    };
    std::vector<Target> targets;
    std::vector<double> edges{0.0};
    for (double e = scale; e < 0.75 * c.c1; e *= 2.0) edges.push_back(e);
    edges.push_back(0.75 * c.c1);
    const auto& srule = num::gauss_rule<7>();
    std::vector<std::pair<double, double>> sigmas;  // (sigma, weight)
    for (double side : {1.0, -1.0})
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            const double mid = 0.5 * (edges[k] + edges[k + 1]), hw = 0.5 * (edges[k + 1] - edges[k]);
            for (std::size_t i = 0; i < srule.x.size(); ++i) sigmas.push_back({side * (mid + hw * srule.x[i]), hw * srule.w[i]});
        }
    double gmax = 0.0;
    for (const auto& [sigma, weight] : sigmas) {
        const auto branches = detail::level_branches(p, sigma);
        const int per = std::max(2, o.surface_samples / std::max<int>(1, static_cast<int>(branches.size())));
        for (const auto& br : branches) {
            const detail::CosineMap map(br);
            for (int i = 0; i < per; ++i) {
                const double z = map.z(pi * (i + 0.5) / per);
                targets.push_back({sigma, weight, z, br.h(z)});
            }
            for (int i = 1; i < 16; ++i) gmax = std::max(gmax, br.gradient_norm(map.z(pi * i / 16.0)));
        }
    }
    // F changes by at most this much within the kernel support
    const double window = 1.5 * gmax * reach;

    // levels: symmetric Gauss grid on [-top, top] plus tau = 0 for the delta term
    // b(tau) varies on the level scale |grad F| 2^{-j}
    const double tau_panel = 2.0 * gmax * scale / o.resolution;
    const double spacing = 0.2 * scale / o.resolution;
    const int tpanels = static_cast<int>(std::ceil(top / tau_panel));
    const auto& trule = num::gauss_rule<10>();
    std::vector<std::pair<double, double>> levels{{0.0, 0.0}};  // (tau, weight of b(tau) in the pv sum)
    for (int k = 0; k < tpanels; ++k) {
        const double lo = top * k / tpanels, hw = 0.5 * top / tpanels;
        for (std::size_t i = 0; i < trule.x.size(); ++i) {
            const double t = lo + hw + hw * trule.x[i];
            const double w = hw * trule.w[i] * psi_cut.chi(t) / t;
            if (w == 0.0) continue;
            levels.push_back({t, w});
            levels.push_back({-t, -w});
        }
    }

    std::vector<std::size_t> order(targets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return targets[a].sigma < targets[b].sigma; });

    for (const auto& [tau, w] : levels) {
        // targets whose sigma lies within the window of this level
        auto first = std::lower_bound(order.begin(), order.end(), tau - window,
                                      [&](std::size_t i, double v) { return targets[i].sigma < v; });
        if (first == order.end() || targets[*first].sigma > tau + window) continue;
        const auto nodes = detail::curve_nodes(p, tau, spacing);
        const Complex factor = tau == 0.0 ? Complex(0.0, pi) : Complex(w, 0.0);
        for (auto it = first; it != order.end() && targets[*it].sigma <= tau + window; ++it) {
            auto& t = targets[*it];
            auto lo = std::lower_bound(nodes.begin(), nodes.end(), t.xi1 - reach,
                                       [](const detail::CurveNode& n, double v) { return n.z < v; });
            double b = 0.0;
            for (auto n = lo; n != nodes.end() && n->z <= t.xi1 + reach; ++n) {
                const double dz = t.xi1 - n->z;
                b += n->w * (kernel.H(j, std::hypot(dz, t.xi2 - n->h)) + kernel.H(j, std::hypot(dz, t.xi2 + n->h)));
            }
            t.value += factor * b;
        }
    }

    // max over each level, then the sigma quadrature
    std::map<double, std::pair<double, double>> best;  // sigma -> (weight, max |.|^2)
    for (const auto& t : targets) {
        auto& e = best[t.sigma];
        e.first = t.weight;
        e.second = std::max(e.second, std::norm(t.value));
    }
    double total = 0.0;
    for (const auto& [sigma, e] : best) total += e.first * e.second;
    return total / std::ldexp(1.0, j);
}

} // namespace quartwave
