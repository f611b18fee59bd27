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

// Small numerical kernels shared by the modules: polynomial roots,
// bracketed root refinement and fixed-order Gauss panels.

#include "quartwave/common.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/Polynomials>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <math.h>
#include <sstream>
#include <utility>
#include <vector>

namespace quartwave::num {

/// Evaluate sum c[i] x^i (coefficients in ascending order).
inline double polyval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline std::vector<double> polyder(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
    return d;
}

/// Real roots of a polynomial with ascending coefficients, sorted.
///
/// Companion-matrix eigenvalues followed by Newton polishing. Roots whose
/// imaginary part is below `imag_tol` (relative to the root magnitude) count
/// as real; near-double roots may therefore be reported twice or not at all.
inline std::vector<double> real_roots(std::vector<double> c, double imag_tol = 1e-7) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    std::vector<double> out;
    if (c.size() <= 1) return out;
    if (c.size() == 2) {
        out.push_back(-c[0] / c[1]);
        return out;
    }
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) coeffs[static_cast<Eigen::Index>(i)] = c[i];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    const auto dc = polyder(c);
    for (const auto& z : solver.roots()) {
        if (std::abs(z.imag()) > imag_tol * std::max(1.0, std::abs(z))) continue;
        double x = z.real();
        for (int it = 0; it < 8; ++it) {
            const double d = polyval(dc, x);
            if (d == 0.0) break;
            const double step = polyval(c, x) / d;
            x -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Root of f in [a, b] with f(a) f(b) <= 0, refined to relative width `tol`.
inline double bracket_root(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream msg;
        msg << "root not bracketed on [" << a << ", " << b << "]: f(a)=" << fa << ", f(b)=" << fb;
        throw NumericalError(msg.str());
    }
    auto stop = [tol](double lo, double hi) {
        return std::abs(hi - lo) <= tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    };
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
    return 0.5 * (r.first + r.second);
}

/// Nodes and weights of a Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

template <unsigned Points>
inline const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, Points>;
        GaussRule r;
        const auto& a = G::abscissa();
        const auto& wt = G::weights();
        // boost stores the non-negative half of the symmetric rule
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) {
                r.x.push_back(0.0);
                r.w.push_back(wt[i]);
            } else {
                r.x.push_back(a[i]);
                r.w.push_back(wt[i]);
                r.x.push_back(-a[i]);
                r.w.push_back(wt[i]);
            }
        }
        return r;
    }();
    return rule;
}

/// Composite Gauss-Legendre quadrature of f over [a, b] with `panels` equal panels.
template <unsigned Points = 20, class F>
auto composite_gauss(F&& f, double a, double b, int panels) {
    const auto& rule = gauss_rule<Points>();
    using R = decltype(f(a));
    R acc{};
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        R part{};
        for (std::size_t i = 0; i < rule.x.size(); ++i)
            part += rule.w[i] * f(mid + 0.5 * width * rule.x[i]);
        acc += part * (0.5 * width);
    }
    return acc;
}

/// J0 and J1 from the C library; the <cmath> special functions are two orders slower.
inline double bessel_j0(double x) { return ::j0(x); }
inline double bessel_j1(double x) { return ::j1(x); }

/// Least-squares slope and intercept of y against x.
inline std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

} // namespace quartwave::num
