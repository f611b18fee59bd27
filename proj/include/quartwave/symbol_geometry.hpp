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

// Geometry of the zero set M = {F = 0} of the symbol
//
//     F(xi) = |xi|^4 - beta |xi|^2 + alpha - |V| xi_1
//
// in the frame V = |V| e_1. M is a hypersurface of revolution about the
// xi_1 axis; its profile over the axial coordinate z splits into the two
// branches h_+ and h_- obtained by solving the quadratic in s = |xi|^2.

#include "quartwave/common.hpp"
#include "quartwave/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace quartwave {

struct ModelParams {
    double alpha = -1.0;
    double beta = 0.0;
    double v_mag = 0.0;
    int dim = 2;

    /// Parameters of the level set {F = tau}.
    ModelParams shifted(double tau) const { return {alpha - tau, beta, v_mag, dim}; }
};

inline void validate(const ModelParams& p) {
    if (p.dim < 2) throw InputError("dimension must be at least 2");
    if (!(p.v_mag >= 0.0)) throw InputError("|V| must be non-negative");
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.v_mag))
        throw InputError("model coefficients must be finite");
}

struct GeometryTolerances {
    double a2 = 1e-9;      // relative to the largest monomial of the resultant
    double a3 = 1e-9;      // relative to the largest term of each subcondition
    double root = 1e-12;   // bracketed root refinement
    double axis = 1e-9;    // h below this counts as an axis point
    double regime = 1e-9;  // equality test beta^2 - 4 alpha = 3 |V|^{4/3}
    double on_surface = 1e-8;
};

/// P(r) = r^4 - beta r^2 + alpha.
inline double radial_symbol(const ModelParams& p, double r) {
    const double r2 = r * r;
    return r2 * r2 - p.beta * r2 + p.alpha;
}

/// P'(r).
inline double radial_symbol_derivative(const ModelParams& p, double r) {
    return 4.0 * r * r * r - 2.0 * p.beta * r;
}

/// F restricted to the axis: q^4 - beta q^2 + alpha - |V| q.
inline double axis_symbol(const ModelParams& p, double q) { return radial_symbol(p, q) - p.v_mag * q; }

inline double eval_symbol(const ModelParams& p, std::span<const double> xi) {
    if (xi.size() != static_cast<std::size_t>(p.dim)) {
        std::ostringstream msg;
        msg << "point has " << xi.size() << " coordinates, expected " << p.dim;
        throw InputError(msg.str());
    }
    double r2 = 0.0;
    for (double c : xi) r2 += c * c;
    return r2 * r2 - p.beta * r2 + p.alpha - p.v_mag * xi[0];
}

// ---------------------------------------------------------------------------
// Assumption checks

struct A1Result {
    bool holds = false;
    std::vector<double> witness;  // point with F < 0 when holds
};

struct A2Result {
    bool holds = false;
    double resultant = 0.0;
    double scale = 0.0;  // largest monomial magnitude
    std::vector<double> common_real_roots;
    // resultant and the numerical root search disagree
    bool discrepancy = false;
};

struct A3Result {
    bool holds = false;
    std::vector<std::string> violated;  // "alpha", "axis_plus", "axis_minus"
};

struct AssumptionReport {
    A1Result a1;
    A2Result a2;
    A3Result a3;

    bool all_hold() const { return a1.holds && a2.holds && a3.holds; }

    /// Name of the first failing assumption, empty if none.
    std::string first_failure() const {
        if (!a1.holds) return "A1";
        if (!a2.holds) return "A2";
        if (!a3.holds) return "A3";
        return {};
    }
};

/// Real roots of 4q^3 - 2 beta q - |V|, the axial critical points of F.
inline std::vector<double> axis_critical_points(const ModelParams& p) {
    return num::real_roots({-p.v_mag, -2.0 * p.beta, 0.0, 4.0});
}

/// Minimizer of q^4 - beta q^2 + alpha - |V| q over q >= 0.
inline double axis_minimizer(const ModelParams& p) {
    double best = 0.0;
    double best_val = axis_symbol(p, 0.0);
    for (double q : axis_critical_points(p)) {
        if (q <= 0.0) continue;
        const double val = axis_symbol(p, q);
        if (val < best_val) {
            best = q;
            best_val = val;
        }
    }
    return best;
}

inline A1Result check_a1(const ModelParams& p) {
    validate(p);
    A1Result res;
    double witness_q = 0.0;
    if (p.alpha < 0.0) {
        res.holds = true;
        witness_q = axis_minimizer(p);
    } else if (p.alpha == 0.0) {
        // g(x) = x^3 - beta x also dips below zero when beta > 0
        res.holds = p.v_mag > 0.0 || p.beta > 0.0;
        witness_q = axis_minimizer(p);
    } else {
        const double xp = std::sqrt((p.beta + std::sqrt(p.beta * p.beta + 12.0 * p.alpha)) / 6.0);
        const double threshold = radial_symbol(p, xp) / xp;
        res.holds = p.v_mag > threshold;
        witness_q = xp;
    }
    if (res.holds) {
        res.witness.assign(static_cast<std::size_t>(p.dim), 0.0);
        res.witness[0] = witness_q;
    }
    return res;
}

/// Common real roots of 4q^3 - 2 beta q - |V| and q^4 - beta q^2 + alpha - |V| q.
inline std::vector<double> common_real_roots(const ModelParams& p, double tol = 1e-9) {
    std::vector<double> out;
    for (double q : axis_critical_points(p)) {
        const double q2 = q * q;
        const double scale = std::max({q2 * q2, std::abs(p.beta) * q2, std::abs(p.alpha),
                                       p.v_mag * std::abs(q), 1e-300});
        if (std::abs(axis_symbol(p, q)) <= tol * scale) out.push_back(q);
    }
    return out;
}

inline A2Result check_a2(const ModelParams& p, const GeometryTolerances& tol = {}) {
    validate(p);
    const double a = p.alpha, b = p.beta, v2 = p.v_mag * p.v_mag;
    const std::array<double, 6> terms = {256.0 * a * a * a,  -128.0 * a * a * b * b,
                                         4.0 * b * b * b * v2, -27.0 * v2 * v2,
                                         16.0 * a * b * b * b * b, -144.0 * a * b * v2};
    A2Result res;
    for (double t : terms) {
        res.resultant += t;
        res.scale = std::max(res.scale, std::abs(t));
    }
    res.holds = std::abs(res.resultant) > tol.a2 * res.scale;
    res.common_real_roots = common_real_roots(p);
    res.discrepancy = res.holds == !res.common_real_roots.empty();
    return res;
}

inline A3Result check_a3(const ModelParams& p, const GeometryTolerances& tol = {}) {
    validate(p);
    A3Result res;
    if (p.alpha == 0.0) res.violated.emplace_back("alpha");
    if (p.beta > 0.0) {
        // P' vanishes on the sphere |xi|^2 = beta/2; its two axis points must be off M
        const double r = std::sqrt(p.beta / 2.0);
        const double base = p.alpha - p.beta * p.beta / 4.0;
        const double shift = p.v_mag * r;
        const double scale = std::max({std::abs(p.alpha), p.beta * p.beta / 4.0, shift});
        if (std::abs(base + shift) <= tol.a3 * scale) res.violated.emplace_back("axis_plus");
        if (std::abs(base - shift) <= tol.a3 * scale) res.violated.emplace_back("axis_minus");
    }
    res.holds = res.violated.empty();
    return res;
}

inline AssumptionReport assess_assumptions(const ModelParams& p, const GeometryTolerances& tol = {}) {
    return {check_a1(p), check_a2(p, tol), check_a3(p, tol)};
}

// ---------------------------------------------------------------------------
// Regime

enum class Regime { AllCurved, OneFlatDirection };

inline const char* to_string(Regime r) {
    return r == Regime::AllCurved ? "AllCurved" : "OneFlatDirection";
}

/// 2(k+2)/k; no finite value for k = 0.
inline std::optional<Rational> critical_exponent(int k) {
    if (k <= 0) return std::nullopt;
    return Rational(2 * (k + 2), k);
}

struct RegimeClassification {
    Regime regime = Regime::AllCurved;
    int k_count = 0;
    std::optional<Rational> p1;
    std::vector<std::string> warnings;
};

inline RegimeClassification classify_regime(const ModelParams& p, const GeometryTolerances& tol = {}) {
    const auto report = assess_assumptions(p, tol);
    if (!report.all_hold()) {
        const auto name = report.first_failure();
        throw AssumptionViolation(name, "assumption " + name + " fails for the given coefficients");
    }
    RegimeClassification out;
    const double disc = p.beta * p.beta - 4.0 * p.alpha;
    bool all_curved = 8.0 * p.beta * p.v_mag * p.v_mag <= disc * disc;
    if (p.v_mag > 0.0) {
        const double v43 = std::pow(p.v_mag, 4.0 / 3.0);
        const double scale = std::max({p.beta * p.beta, 4.0 * std::abs(p.alpha), 3.0 * v43});
        if (std::abs(disc - 3.0 * v43) <= tol.regime * scale) {
            // the candidate flat circle lies on M only when e > 3/2
            const double e = p.beta / std::pow(p.v_mag, 2.0 / 3.0);
            all_curved = e <= 1.5;
            if (all_curved)
                out.warnings.emplace_back(
                    "equality branch with e <= 3/2: degenerate root lies off M, treated as all curved");
        }
    }
    out.regime = all_curved ? Regime::AllCurved : Regime::OneFlatDirection;
    out.k_count = all_curved ? p.dim - 1 : p.dim - 2;
    out.p1 = critical_exponent(out.k_count);
    if (!out.p1) out.warnings.emplace_back("k = 0: no finite critical exponent");
    return out;
}

// ---------------------------------------------------------------------------
// Profile branches

enum class BranchSign { Plus, Minus };
enum class EndpointKind { Axis, Junction };

inline const char* to_string(BranchSign s) { return s == BranchSign::Plus ? "plus" : "minus"; }
inline const char* to_string(EndpointKind k) { return k == EndpointKind::Axis ? "axis" : "junction"; }

/// One connected piece of a profile branch h_± over [lo, hi].
///
/// With D(z) = beta^2 - 4 alpha + 4|V| z and s_±(z) = (beta ± sqrt D)/2,
/// the radicand is r(z) = s(z) - z^2 and h = sqrt(r). Junction endpoints sit at
/// D = 0 where h_+ and h_- meet with a vertical tangent.
class ProfileBranch {
public:
    ProfileBranch(const ModelParams& p, BranchSign sign, double lo, double hi, EndpointKind lo_kind,
                  EndpointKind hi_kind)
        : alpha_(p.alpha), beta_(p.beta), v_(p.v_mag), sign_(sign), lo_(lo), hi_(hi),
          lo_kind_(lo_kind), hi_kind_(hi_kind) {}

    BranchSign sign() const { return sign_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    EndpointKind lo_kind() const { return lo_kind_; }
    EndpointKind hi_kind() const { return hi_kind_; }
    bool closes_on_axis() const { return lo_kind_ == EndpointKind::Axis && hi_kind_ == EndpointKind::Axis; }
    bool contains(double z) const { return z > lo_ && z < hi_; }

    double discriminant(double z) const { return beta_ * beta_ - 4.0 * alpha_ + 4.0 * v_ * z; }

    /// |xi|^2 on the branch.
    double radius_squared(double z) const {
        const double sq = std::sqrt(std::max(discriminant(z), 0.0));
        return 0.5 * (beta_ + sgn() * sq);
    }

    double radicand(double z) const { return radius_squared(z) - z * z; }

    double radicand_d1(double z) const {
        return sgn() * v_ / std::sqrt(discriminant(z)) - 2.0 * z;
    }

    double radicand_d2(double z) const {
        const double d = discriminant(z);
        return -sgn() * 2.0 * v_ * v_ / (d * std::sqrt(d)) - 2.0;
    }

    double h(double z) const { return std::sqrt(std::max(radicand(z), 0.0)); }

    double dh(double z) const { return radicand_d1(z) / (2.0 * h(z)); }

    double d2h(double z) const {
        const double r = radicand(z), r1 = radicand_d1(z), r2 = radicand_d2(z);
        return (2.0 * r2 * r - r1 * r1) / (4.0 * r * std::sqrt(r));
    }

    /// |grad F| at the profile point above z.
    double gradient_norm(double z) const {
        const double s = radius_squared(z);
        const double pp = 4.0 * s - 2.0 * beta_;  // P'(rho)/rho
        const double g1 = pp * z - v_;
        const double gr = pp * h(z);
        return std::hypot(g1, gr);
    }

private:
    double sgn() const { return sign_ == BranchSign::Plus ? 1.0 : -1.0; }

    double alpha_, beta_, v_;
    BranchSign sign_;
    double lo_, hi_;
    EndpointKind lo_kind_, hi_kind_;
};

/// Profile of M as a list of branch pieces; empty when M is empty.
inline std::vector<ProfileBranch> profile_branches(const ModelParams& p, const GeometryTolerances& tol = {}) {
    validate(p);
    std::vector<ProfileBranch> out;
    const double disc0 = p.beta * p.beta - 4.0 * p.alpha;

    if (p.v_mag == 0.0) {
        // concentric spheres |xi|^2 = s_±
        if (disc0 < 0.0) return out;
        const double sq = std::sqrt(disc0);
        for (auto sign : {BranchSign::Plus, BranchSign::Minus}) {
            const double s = 0.5 * (p.beta + (sign == BranchSign::Plus ? sq : -sq));
            if (s <= 0.0) continue;
            if (sign == BranchSign::Minus && sq == 0.0) continue;
            const double r = std::sqrt(s);
            out.emplace_back(p, sign, -r, r, EndpointKind::Axis, EndpointKind::Axis);
        }
        return out;
    }

    if (!check_a1(p).holds) return out;

    const double z_junction = -disc0 / (4.0 * p.v_mag);
    const double r_junction = 0.5 * p.beta - z_junction * z_junction;

    std::vector<double> roots_plus, roots_minus;
    for (double z : num::real_roots({p.alpha, -p.v_mag, -p.beta, 0.0, 1.0})) {
        if (z <= z_junction) continue;
        const auto sign = z * z >= 0.5 * p.beta ? BranchSign::Plus : BranchSign::Minus;
        const ProfileBranch probe(p, sign, z_junction, z, EndpointKind::Junction, EndpointKind::Axis);
        auto f = [&](double t) { return probe.radicand(t); };
        // widen a bracket around the polished quartic root; keep it if the radicand is tangent
        double refined = z;
        for (double delta = 1e-10 * std::max(1.0, std::abs(z)); delta < 1e-3; delta *= 10.0) {
            const double a = std::max(z_junction, z - delta), b = z + delta;
            if ((f(a) > 0) != (f(b) > 0)) {
                refined = num::bracket_root(f, a, b, tol.root);
                break;
            }
        }
        (sign == BranchSign::Plus ? roots_plus : roots_minus).push_back(refined);
    }

    for (auto sign : {BranchSign::Plus, BranchSign::Minus}) {
        auto& roots = sign == BranchSign::Plus ? roots_plus : roots_minus;
        std::sort(roots.begin(), roots.end());
        bool inside = r_junction > 0.0;
        double start = z_junction;
        auto start_kind = EndpointKind::Junction;
        for (double z : roots) {
            if (inside) {
                if (z > start) out.emplace_back(p, sign, start, z, start_kind, EndpointKind::Axis);
            } else {
                start = z;
                start_kind = EndpointKind::Axis;
            }
            inside = !inside;
        }
        if (inside) {
            std::ostringstream msg;
            msg << "profile branch " << to_string(sign) << " does not close: " << roots.size()
                << " axis crossings, junction radicand " << r_junction;
            throw NumericalError(msg.str());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Curvature

struct CurvatureSample {
    double t = 0.0;
    double kappa_rot = 0.0;      // shared by the N-2 rotational directions
    double kappa_profile = 0.0;  // along the profile curve
};

/// Principal curvatures at the profile point above t. Signs make the unit sphere +1.
inline CurvatureSample curvatures(const ProfileBranch& b, double t, int dim, const GeometryTolerances& tol = {}) {
    if (dim < 2) throw InputError("dimension must be at least 2");
    if (!b.contains(t)) {
        std::ostringstream msg;
        msg << "t = " << t << " outside the open branch domain (" << b.lo() << ", " << b.hi() << ")";
        throw InputError(msg.str());
    }
    const double h = b.h(t);
    if (h <= tol.axis) throw AxisPointError("profile touches the axis here; use axis_curvature");
    const double h1 = b.dh(t), h2 = b.d2h(t);
    const double w = 1.0 + h1 * h1;
    return {t, 1.0 / (h * std::sqrt(w)), -h2 / (w * std::sqrt(w))};
}

/// Common curvature of all N-1 directions at the axis point (t, 0, ..., 0) of M.
inline double axis_curvature(const ModelParams& p, double t, const GeometryTolerances& tol = {}) {
    validate(p);
    const double t2 = t * t;
    const double scale = std::max({t2 * t2, std::abs(p.beta) * t2, std::abs(p.alpha), p.v_mag * std::abs(t)});
    if (std::abs(axis_symbol(p, t)) > tol.on_surface * std::max(scale, 1e-300)) {
        std::ostringstream msg;
        msg << "axis point t = " << t << " is not on M (F = " << axis_symbol(p, t) << ")";
        throw InputError(msg.str());
    }
    if (t == 0.0) throw InputError("origin lies on M, which requires alpha = 0");
    const double pp = radial_symbol_derivative(p, std::abs(t));
    const double sign_t = t > 0.0 ? 1.0 : -1.0;
    return std::abs(pp / std::abs(t)) / std::abs(pp * sign_t - p.v_mag);
}

/// Values of F at its critical points.
inline std::vector<double> critical_values(const ModelParams& p) {
    validate(p);
    std::vector<double> out;
    if (p.v_mag == 0.0) {
        out.push_back(p.alpha);
        if (p.beta > 0.0) out.push_back(p.alpha - 0.25 * p.beta * p.beta);
        return out;
    }
    for (double q : axis_critical_points(p)) out.push_back(axis_symbol(p, q));
    return out;
}

/// Axial coordinates where the profile curvature of the minus branch vanishes.
///
/// Solves -3y^4 + 8e y^3 - 6 k y^2 + 12 y - 16 g = 0 in the scaled variable
/// y = sqrt(D) / |V|^{2/3}, with e = beta |V|^{-2/3}, k = (beta^2 - 4 alpha) |V|^{-4/3}
/// and g = e/2 - k^2/16, then keeps roots with 0 < y <= 1 that land inside a
/// minus-branch piece.
inline std::vector<double> flat_locus(const ModelParams& p, const GeometryTolerances& tol = {}) {
    validate(p);
    if (p.v_mag == 0.0)
        throw InputError("flat locus scaling needs |V| > 0; the |V| = 0 profiles are spheres");
    const double v13 = std::cbrt(p.v_mag);
    const double e = p.beta / (v13 * v13);
    const double ks = (p.beta * p.beta - 4.0 * p.alpha) / (v13 * v13 * v13 * v13);
    const double g = 0.5 * e - ks * ks / 16.0;

    const auto branches = profile_branches(p, tol);
    std::vector<double> out;
    for (double y : num::real_roots({-16.0 * g, 12.0, -6.0 * ks, 8.0 * e, -3.0})) {
        if (!(y > 0.0) || y > 1.0 + 1e-12) continue;
        const double z = v13 * (y * y - ks) / 4.0;
        for (const auto& b : branches) {
            if (b.sign() == BranchSign::Minus && b.contains(z) && b.h(z) > tol.axis) {
                out.push_back(z);
                break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
              out.end());
    return out;
}

} // namespace quartwave
