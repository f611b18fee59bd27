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

// Admissible exponent pairs (1/p, 1/q) for L^p -> L^q bounds of the
// near-surface part of the resolvent. Everything is exact rational
// arithmetic; boundaries are strict where the estimates are strict.

#include "quartwave/common.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace quartwave {

/// Exponent pair stored as x = 1/p, y = 1/q; q = infinity is y = 0.
class ExponentPair {
public:
    static ExponentPair from_xy(Rational x, Rational y) { return ExponentPair(x, y); }

    /// q = std::nullopt means q = infinity.
    static ExponentPair from_pq(Rational p, std::optional<Rational> q) {
        if (p < Rational(1)) throw InputError("p must be at least 1");
        if (q && *q < Rational(1)) throw InputError("q must be at least 1");
        return ExponentPair(1 / p, q ? 1 / *q : Rational(0));
    }

    const Rational& x() const { return x_; }
    const Rational& y() const { return y_; }
    Rational p() const { return 1 / x_; }
    bool q_infinite() const { return y_ == Rational(0); }
    std::optional<Rational> q() const {
        if (y_ == Rational(0)) return std::nullopt;
        return 1 / y_;
    }

    /// The pair (q', p'), i.e. (1 - y, 1 - x).
    ExponentPair dual() const { return ExponentPair(1 - y_, 1 - x_); }

    friend bool operator==(const ExponentPair&, const ExponentPair&) = default;

private:
    ExponentPair(Rational x, Rational y) : x_(x), y_(y) {
        if (x_ <= 0 || x_ > 1 || y_ < 0 || y_ > 1)
            throw InputError("exponent pair outside (0, 1] x [0, 1]");
    }
    Rational x_, y_;
};

using RationalPoint = std::pair<Rational, Rational>;

enum class RegionKind { Gamma, GammaDual, PentagonHull };

inline const char* to_string(RegionKind k) {
    switch (k) {
    case RegionKind::Gamma: return "Gamma";
    case RegionKind::GammaDual: return "GammaDual";
    default: return "PentagonHull";
    }
}

struct RegionPolygon {
    std::vector<RationalPoint> vertices;  // counter-clockwise
    RegionKind kind = RegionKind::PentagonHull;
    int k_count = 0;
    int dim = 0;
};

struct InterpolationConstants {
    Rational A;
    Rational B;
};

inline void check_region_args(int dim, int k) {
    if (dim < 2) throw InputError("dimension must be at least 2");
    if (k < 1 || k > dim - 1) {
        std::ostringstream msg;
        msg << "curvature count k = " << k << " outside [1, " << dim - 1 << "]";
        throw InputError(msg.str());
    }
}

inline InterpolationConstants interpolation_constants(int dim, int k) {
    check_region_args(dim, k);
    const Rational A(2 * dim + 2 + k, 2 * dim * (k + 2));
    const Rational B = Rational(3, 2) - Rational(k + 1, 2 * dim) - Rational(k + 4, 2 * (k + 2));
    return {A, B};
}

/// Bounds for the smooth part: 1/p - 1/q <= 1 (N < 4), < 1 (N = 4), <= 4/N (N > 4).
inline bool r1_admissible(const ExponentPair& e, int dim) {
    if (dim < 2) throw InputError("dimension must be at least 2");
    if (!(e.y() < e.x())) throw InputError("requires q > p");
    const Rational gap = e.x() - e.y();
    if (dim < 4) return gap <= 1;
    if (dim == 4) return gap < 1;
    return gap <= Rational(4, dim);
}

/// The two lines bounding Gamma: both are negative strictly inside.
inline std::pair<Rational, Rational> gamma_lines(const Rational& x, const Rational& y, int dim, int k) {
    const auto [A, B] = interpolation_constants(dim, k);
    const Rational base = A + y - x;
    const Rational first = base + (1 - 2 * y) * B;
    const Rational second = base + (Rational(2 * (k + 2), k) * x - Rational(k + 4, k)) * B;
    return {first, second};
}

/// Gamma: the region where the dyadic pieces sum geometrically.
inline bool gamma_inequalities(const ExponentPair& e, int dim, int k) {
    const auto [l1, l2] = gamma_lines(e.x(), e.y(), dim, k);
    return l1 < 0 && l2 < 0;
}

/// Gamma': the same conditions for the adjoint pair, written out directly.
inline bool gamma_dual_inequalities(const ExponentPair& e, int dim, int k) {
    const auto [A, B] = interpolation_constants(dim, k);
    const Rational base = A + e.y() - e.x();
    const Rational first = base + (2 * e.x() - 1) * B;
    const Rational second = base + (1 - Rational(2 * (k + 2), k) * e.y()) * B;
    return first < 0 && second < 0;
}

/// The three strict inequalities cutting out the pentagon, inside the unit square.
inline bool full_admissible(const ExponentPair& e, int dim, int k) {
    check_region_args(dim, k);
    const Rational& x = e.x();
    const Rational& y = e.y();
    if (x > 1 || y < 0) return false;
    const Rational c((k + 2) * (dim - k - 1), k * dim);
    const bool diagonal_gap = x - y > Rational(2, 2 + k);
    const bool upper = y + c * x < Rational(4 * dim + 2 * k * dim - 4 - 6 * k - k * k, 2 * k * dim);
    const bool lower = c * y + x > 1 - Rational(k, 2 * dim);
    return diagonal_gap && upper && lower;
}

inline RegionPolygon gamma_polygon(int dim, int k) {
    check_region_args(dim, k);
    const Rational P_x = 1 - Rational(k, 2 * dim);
    const Rational S_x(4 + 6 * k + k * k, 4 + 6 * k + 2 * k * k), S_y(k, 2 * (k + 1));
    return {{{P_x, 0}, {1, 0}, {1, Rational(k, 2 * dim)}, {S_x, S_y}}, RegionKind::Gamma, k, dim};
}

inline RegionPolygon gamma_dual_polygon(int dim, int k) {
    check_region_args(dim, k);
    const Rational P_x = 1 - Rational(k, 2 * dim);
    const Rational Sd_x(k + 2, 2 * (k + 1)), Sd_y(k * k, 4 + 6 * k + 2 * k * k);
    return {{{P_x, 0}, {1, 0}, {1, Rational(k, 2 * dim)}, {Sd_x, Sd_y}}, RegionKind::GammaDual, k, dim};
}

/// Convex hull of Gamma and Gamma': vertices P, Q, R, S, S'.
inline RegionPolygon pentagon_hull(int dim, int k) {
    check_region_args(dim, k);
    auto g = gamma_polygon(dim, k);
    const auto sd = gamma_dual_polygon(dim, k).vertices[3];
    g.vertices.push_back(sd);
    g.kind = RegionKind::PentagonHull;
    return g;
}

/// Diagonal p = q' threshold: admissible iff q > 2(k+2)/k.
inline Rational dual_line_threshold(int k) {
    if (k < 1) throw InputError("k must be at least 1");
    return Rational(2 * (k + 2), k);
}

/// Smallest dyadic growth exponent N(A + 1/q - 1/p + theta B) over the feasible theta.
inline Rational exponent_rate(const ExponentPair& e, int dim, int k) {
    const auto [A, B] = interpolation_constants(dim, k);
    const Rational& x = e.x();
    const Rational& y = e.y();
    if (x < Rational(k + 4, 2 * (k + 2)) || y > Rational(1, 2)) {
        std::ostringstream msg;
        msg << "infeasible exponents: need 1 <= p <= 2(k+2)/(k+4) and q >= 2, got 1/p = " << x << ", 1/q = " << y;
        throw InputError(msg.str());
    }
    const Rational theta = std::max(1 - 2 * y, (Rational(2 * (k + 2)) * x - (k + 4)) / k);
    return dim * (A + y - x + theta * B);
}

namespace detail {
inline Rational cross(const RationalPoint& o, const RationalPoint& a, const RationalPoint& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}
} // namespace detail

/// Strict interior test for a simple polygon (boundary points are outside).
inline bool strictly_inside(const RegionPolygon& poly, const Rational& x, const Rational& y) {
    const RationalPoint pt{x, y};
    const auto& v = poly.vertices;
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const auto& a = v[j];
        const auto& b = v[i];
        if (detail::cross(a, b, pt) == Rational(0) && std::min(a.first, b.first) <= x && x <= std::max(a.first, b.first) &&
            std::min(a.second, b.second) <= y && y <= std::max(a.second, b.second))
            return false;
        if ((a.second > y) != (b.second > y)) {
            const Rational x_cross = a.first + (y - a.second) * (b.first - a.first) / (b.second - a.second);
            if (x < x_cross) inside = !inside;
        }
    }
    return inside;
}

/// Twice the signed area; positive for counter-clockwise order.
inline Rational signed_area2(const RegionPolygon& poly) {
    Rational acc = 0;
    const auto& v = poly.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
        acc += v[j].first * v[i].second - v[i].first * v[j].second;
    return acc;
}

inline RationalPoint vertex_centroid(const RegionPolygon& poly) {
    Rational sx = 0, sy = 0;
    for (const auto& [x, y] : poly.vertices) {
        sx += x;
        sy += y;
    }
    const auto n = static_cast<std::int64_t>(poly.vertices.size());
    return {sx / n, sy / n};
}

} // namespace quartwave
