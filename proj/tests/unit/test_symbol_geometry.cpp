// Copyright 2026 The quartwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "quartwave/symbol_geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace quartwave;

namespace {

std::vector<double> axis_point(int dim, double z, double rho) {
    std::vector<double> xi(static_cast<std::size_t>(dim), 0.0);
    xi[0] = z;
    if (dim > 1) xi[1] = rho;
    return xi;
}

// Random triples from a box that covers every branch topology.
ModelParams random_params(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> ua(-2.0, 2.0), ub(-2.0, 3.0), uv(0.0, 2.5);
    return {ua(rng), ub(rng), uv(rng), dim};
}

// Brute-force min over x > 0 of (x^4 - beta x^2 + alpha)/x by dense scan plus golden refinement.
double brute_min_g(const ModelParams& p) {
    auto g = [&](double x) { return (x * x * x * x - p.beta * x * x + p.alpha) / x; };
    double best_x = 1e-6, best = g(best_x);
    for (int i = 1; i <= 20000; ++i) {
        const double x = 1e-4 * i;
        if (g(x) < best) best = g(x), best_x = x;
    }
    double lo = std::max(1e-8, best_x - 1e-4), hi = best_x + 1e-4;
    for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (g(m1) < g(m2) ? hi : lo) = (g(m1) < g(m2) ? m2 : m1);
    }
    return std::min(best, g(0.5 * (lo + hi)));
}

Rational two_case_p1(Regime r, int dim) {
    return r == Regime::AllCurved ? Rational(2 * (dim + 1), dim - 1) : Rational(2 * dim, dim - 2);
}

} // namespace

TEST(EvalSymbol, Examples) {
    const ModelParams sphere{-1, 0, 0, 3};
    EXPECT_DOUBLE_EQ(eval_symbol(sphere, std::vector<double>{1, 0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(eval_symbol(sphere, std::vector<double>{0, 0, 0}), -1.0);
    EXPECT_DOUBLE_EQ(eval_symbol({1, 2, 1, 3}, std::vector<double>{1, 0, 0}), -1.0);
}

TEST(EvalSymbol, DimensionMismatchThrows) {
    EXPECT_THROW(eval_symbol({-1, 0, 0, 3}, std::vector<double>{1, 0}), InputError);
}

TEST(Validate, RejectsBadParams) {
    EXPECT_THROW(validate({-1, 0, 0, 1}), InputError);
    EXPECT_THROW(validate({-1, 0, -0.1, 2}), InputError);
}

TEST(CheckA1, Examples) {
    const auto r = check_a1({-1, 0, 0, 2});
    EXPECT_TRUE(r.holds);
    EXPECT_LT(eval_symbol({-1, 0, 0, 2}, r.witness), 0.0);

    const double threshold = 1.7547653506033232811;  // min of (x^4+1)/x
    EXPECT_FALSE(check_a1({1, 0, threshold - 1e-9, 2}).holds);
    EXPECT_TRUE(check_a1({1, 0, threshold + 1e-9, 2}).holds);
    EXPECT_FALSE(check_a1({1, 0, 1, 2}).holds);

    const auto r2 = check_a1({1, 2, 1, 3});
    EXPECT_TRUE(r2.holds);
    EXPECT_LT(eval_symbol({1, 2, 1, 3}, r2.witness), 0.0);
}

TEST(CheckA1, ZeroAlpha) {
    EXPECT_TRUE(check_a1({0, 0, 0.5, 2}).holds);
    EXPECT_FALSE(check_a1({0, 0, 0, 2}).holds);
    EXPECT_FALSE(check_a1({0, -1, 0, 2}).holds);
    // |xi|^4 - |xi|^2 < 0 just inside the unit sphere
    EXPECT_TRUE(check_a1({0, 1, 0, 2}).holds);
}

TEST(CheckA1, WitnessIsNegativeOnRandomSweep) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto p = random_params(rng, 2 + i % 3);
        const auto r = check_a1(p);
        if (r.holds) EXPECT_LT(eval_symbol(p, r.witness), 0.0) << p.alpha << " " << p.beta << " " << p.v_mag;
    }
}

TEST(CheckA1, AgreesWithBruteForce) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        auto p = random_params(rng, 2);
        p.alpha = std::abs(p.alpha) + 1e-3;  // the only nontrivial case
        const double gmin = brute_min_g(p);
        if (std::abs(p.v_mag - gmin) < 1e-6) continue;
        EXPECT_EQ(check_a1(p).holds, p.v_mag > gmin) << p.alpha << " " << p.beta << " " << p.v_mag;
    }
}

TEST(CheckA2, Examples) {
    auto r = check_a2({1, 2, 1, 3});
    EXPECT_TRUE(r.holds);
    EXPECT_DOUBLE_EQ(r.resultant, -283.0);
    r = check_a2({-1, 0, 0, 3});
    EXPECT_TRUE(r.holds);
    EXPECT_DOUBLE_EQ(r.resultant, -256.0);
    r = check_a2({0, 0, 0, 3});
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.resultant, 0.0);
}

TEST(CheckA2, TangentAxisPointHasZeroResultant) {
    // (q-1)^2 (q^2 + 2q + c) style tangency: choose alpha so q = 1 is a double root
    // of q^4 - beta q^2 + alpha - |V| q with beta = 0: 4 - |V| = 0, 1 + alpha - |V| = 0.
    const ModelParams p{3, 0, 4, 2};
    const auto r = check_a2(p);
    EXPECT_FALSE(r.holds);
    ASSERT_EQ(r.common_real_roots.size(), 1u);
    EXPECT_NEAR(r.common_real_roots[0], 1.0, 1e-12);
    EXPECT_FALSE(r.discrepancy);
}

TEST(CheckA2, CommonRootImpliesSmallResultant) {
    // Build parameters with a shared real root q0: |V| = 4q0^3 - 2 beta q0, alpha from the quartic.
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uq(0.2, 1.5), ub(-1.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double q0 = uq(rng), beta = ub(rng);
        const double v = 4 * q0 * q0 * q0 - 2 * beta * q0;
        if (v < 0) continue;
        const double alpha = -(q0 * q0 * q0 * q0 - beta * q0 * q0 - v * q0);
        const ModelParams p{alpha, beta, v, 2};
        const auto roots = common_real_roots(p);
        if (roots.empty()) continue;
        const auto r = check_a2(p);
        EXPECT_LT(std::abs(r.resultant), 1e-6 * r.scale);
    }
}

TEST(CheckA3, Examples) {
    EXPECT_TRUE(check_a3({1, 2, 1, 3}).holds);
    EXPECT_TRUE(check_a3({1, 2, 0.75, 3}).holds);
    const auto r = check_a3({0, 1, 1, 2});
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.violated.front(), "alpha");
    const auto r2 = check_a3({2, 2, 1, 2});
    EXPECT_FALSE(r2.holds);
    EXPECT_EQ(r2.violated.front(), "axis_minus");
}

TEST(CheckA3, AxisPointOfCriticalSphere) {
    // beta = 8: P' vanishes at r = 2; (2, 0) lies on M when alpha - 16 - 2|V| = 0
    EXPECT_FALSE(check_a3({18, 8, 1, 2}).holds);
    EXPECT_FALSE(check_a3({14, 8, 1, 2}).holds);
    EXPECT_TRUE(check_a3({17, 8, 1, 2}).holds);
}

TEST(ClassifyRegime, Examples) {
    auto c = classify_regime({-1, 0, 1e-6, 3});
    EXPECT_EQ(c.regime, Regime::AllCurved);
    EXPECT_EQ(c.k_count, 2);
    EXPECT_EQ(*c.p1, Rational(4));

    c = classify_regime({1, 2, 1, 3});
    EXPECT_EQ(c.regime, Regime::OneFlatDirection);
    EXPECT_EQ(c.k_count, 1);
    EXPECT_EQ(*c.p1, Rational(6));

    c = classify_regime({0.25, 2, 1, 4});
    EXPECT_EQ(c.regime, Regime::OneFlatDirection);
    EXPECT_EQ(c.k_count, 2);
    EXPECT_EQ(*c.p1, Rational(4));
}

TEST(ClassifyRegime, TwoDimensionalFlatHasNoFiniteExponent) {
    const auto c = classify_regime({1, 2, 1, 2});
    EXPECT_EQ(c.k_count, 0);
    EXPECT_FALSE(c.p1.has_value());
}

TEST(ClassifyRegime, ViolationNamesAssumption) {
    try {
        classify_regime({0, 1, 1, 2});
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.assumption(), "A3");
    }
    try {
        classify_regime({1, 0, 1, 2});
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.assumption(), "A1");
    }
}

TEST(ClassifyRegime, EqualityBranchWithSmallBetaIsAllCurved) {
    // beta^2 - 4 alpha = 3 with |V| = 1 and e = beta = 1 <= 3/2
    const auto c = classify_regime({-0.5, 1, 1, 3});
    EXPECT_EQ(c.regime, Regime::AllCurved);
    EXPECT_FALSE(c.warnings.empty());
}

TEST(ClassifyRegime, ThresholdIdentityOnRandomSweep) {
    std::mt19937_64 rng(21);
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 500; ++i) {
        const int dim = 3 + i % 6;
        const auto p = random_params(rng, dim);
        if (!assess_assumptions(p).all_hold()) continue;
        const auto c = classify_regime(p);
        ASSERT_TRUE(c.p1.has_value());
        EXPECT_EQ(*c.p1, Rational(2 * (c.k_count + 2), c.k_count));
        EXPECT_EQ(*c.p1, two_case_p1(c.regime, dim));
        ++checked;
    }
    EXPECT_EQ(checked, 500);
}

TEST(ProfileBranches, UnitSphere) {
    const auto b = profile_branches({-1, 0, 0, 3});
    ASSERT_EQ(b.size(), 1u);
    EXPECT_DOUBLE_EQ(b[0].lo(), -1.0);
    EXPECT_DOUBLE_EQ(b[0].hi(), 1.0);
    for (double z : {-0.9, -0.3, 0.0, 0.4, 0.99}) EXPECT_NEAR(b[0].h(z), std::sqrt(1 - z * z), 1e-15);
}

TEST(ProfileBranches, EmptyWhenA1Fails) { EXPECT_TRUE(profile_branches({1, 0, 1, 3}).empty()); }

TEST(ProfileBranches, JoinedBranchesOfOneTwoOne) {
    // The junction sits at z = 0; axis crossings are the real roots of q^4 - 2q^2 - q + 1.
    const auto b = profile_branches({1, 2, 1, 3});
    ASSERT_EQ(b.size(), 2u);
    const auto& plus = b[0].sign() == BranchSign::Plus ? b[0] : b[1];
    const auto& minus = b[0].sign() == BranchSign::Plus ? b[1] : b[0];
    EXPECT_EQ(plus.lo_kind(), EndpointKind::Junction);
    EXPECT_NEAR(plus.lo(), 0.0, 1e-15);
    EXPECT_NEAR(plus.hi(), 1.4902161200999536481, 1e-12);
    EXPECT_NEAR(minus.hi(), 0.5248885986564047939, 1e-12);
    EXPECT_EQ(minus.hi_kind(), EndpointKind::Axis);
}

TEST(ProfileBranches, SamplesLieOnM) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        const auto p = random_params(rng, 3);
        for (const auto& b : profile_branches(p)) {
            for (int j = 1; j < 200; ++j) {
                const double z = b.lo() + (b.hi() - b.lo()) * j / 200.0;
                const double f = eval_symbol(p, axis_point(3, z, b.h(z)));
                EXPECT_LT(std::abs(f), 1e-9) << p.alpha << " " << p.beta << " " << p.v_mag << " z=" << z;
            }
            if (b.lo_kind() == EndpointKind::Axis) EXPECT_LT(b.h(b.lo()), 1e-5);
            if (b.hi_kind() == EndpointKind::Axis) EXPECT_LT(b.h(b.hi()), 1e-5);
        }
    }
}

TEST(ProfileBranches, AxisEndpointsAreRootsOfRadicand) {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 300; ++i) {
        const auto p = random_params(rng, 2);
        for (const auto& b : profile_branches(p)) {
            if (b.hi_kind() == EndpointKind::Axis) EXPECT_LT(std::abs(axis_symbol(p, b.hi())), 1e-9);
            if (b.lo_kind() == EndpointKind::Axis) EXPECT_LT(std::abs(axis_symbol(p, b.lo())), 1e-9);
        }
    }
}

TEST(ProfileBranches, DerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_params(rng, 3);
        for (const auto& b : profile_branches(p)) {
            const double len = b.hi() - b.lo();
            if (len < 1e-2) continue;
            for (int j = 1; j < 10; ++j) {
                const double z = b.lo() + len * (0.1 + 0.08 * j);
                const double step = 1e-4 * len;
                const double d1 = (b.h(z + step) - b.h(z - step)) / (2 * step);
                const double d2 = (b.h(z + step) - 2 * b.h(z) + b.h(z - step)) / (step * step);
                const double scale = 1.0 / std::min(1.0, b.h(z));
                EXPECT_NEAR(b.dh(z), d1, 1e-5 * std::max(scale, std::abs(d1)));
                EXPECT_NEAR(b.d2h(z), d2, 1e-5 * std::max(scale * scale * scale, std::abs(d2)));
            }
        }
    }
}

TEST(Curvatures, SphereIsOne) {
    const auto b = profile_branches({-1, 0, 0, 3})[0];
    for (double t : {0.0, 0.5, -0.7}) {
        const auto c = curvatures(b, t, 3);
        EXPECT_NEAR(c.kappa_rot, 1.0, 1e-12);
        EXPECT_NEAR(c.kappa_profile, 1.0, 1e-12);
    }
}

TEST(Curvatures, SphereReduction) {
    for (double alpha : {-0.3, -2.0, -16.0}) {
        const ModelParams p{alpha, 0, 0, 4};
        const double expected = std::pow(-alpha, -0.25);
        const auto b = profile_branches(p)[0];
        for (int j = 1; j < 20; ++j) {
            const double t = b.lo() + (b.hi() - b.lo()) * j / 20.0;
            const auto c = curvatures(b, t, 4);
            EXPECT_NEAR(c.kappa_rot, expected, 1e-6);
            EXPECT_NEAR(c.kappa_profile, expected, 1e-6);
        }
    }
}

TEST(Curvatures, FlatPointOfEqualityBranch) {
    const ModelParams p{0.25, 2, 1, 4};
    for (const auto& b : profile_branches(p)) {
        if (b.sign() != BranchSign::Minus || !b.contains(-0.5)) continue;
        EXPECT_NEAR(b.h(-0.5), 0.5, 1e-10);
        EXPECT_NEAR(curvatures(b, -0.5, 4).kappa_profile, 0.0, 1e-6);
        return;
    }
    FAIL() << "no minus branch over z = -1/2";
}

TEST(Curvatures, Errors) {
    const auto b = profile_branches({-1, 0, 0, 3})[0];
    EXPECT_THROW(curvatures(b, 1.5, 3), InputError);
    EXPECT_THROW(curvatures(b, 1.0, 3), InputError);
    GeometryTolerances tol;
    tol.axis = 1e-3;
    EXPECT_THROW(curvatures(b, 1.0 - 1e-8, 3, tol), AxisPointError);
}

TEST(AxisCurvature, Sphere) {
    EXPECT_NEAR(axis_curvature({-1, 0, 0, 3}, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(axis_curvature({-1, 0, 0, 3}, -1.0), 1.0, 1e-15);
    EXPECT_THROW(axis_curvature({-1, 0, 0, 3}, 0.5), InputError);
}

TEST(AxisCurvature, MatchesImplicitCurveOracle) {
    // |F_rho rho / F_z| of the planar section at each crossing, computed in extended precision
    const ModelParams p{1, 2, 1, 3};
    EXPECT_NEAR(axis_curvature(p, 0.5248885986564047939), 1.1494807915150635174, 1e-9);
    EXPECT_NEAR(axis_curvature(p, 1.4902161200999536481), 0.77795403257714453219, 1e-9);
}

TEST(AxisCurvature, LimitOfProfileCurvature) {
    const ModelParams p{1, 2, 1, 3};
    for (const auto& b : profile_branches(p)) {
        const double t_axis = b.hi();
        const double k_axis = axis_curvature(p, t_axis);
        const auto c = curvatures(b, t_axis - 1e-7, 3);
        EXPECT_NEAR(c.kappa_rot, k_axis, 1e-3);
        EXPECT_NEAR(c.kappa_profile, k_axis, 1e-3);
    }
}

TEST(FlatLocus, Examples) {
    EXPECT_TRUE(flat_locus({-1, 0, 1e-6, 3}).empty());

    const auto eq = flat_locus({0.25, 2, 1, 4});
    ASSERT_FALSE(eq.empty());
    EXPECT_NEAR(eq.front(), -0.5, 1e-9);

    // zero of h_-'' located by extended-precision differentiation of the implicit profile
    const auto z = flat_locus({1, 2, 1, 3});
    ASSERT_EQ(z.size(), 1u);
    EXPECT_NEAR(z[0], 0.15383037071881613688, 1e-10);

    EXPECT_THROW(flat_locus({-1, 0, 0, 3}), InputError);
}

TEST(FlatLocus, EmptyIffAllCurved) {
    std::mt19937_64 rng(41);
    int checked = 0;
    for (int i = 0; i < 3000 && checked < 500; ++i) {
        const auto p = random_params(rng, 3);
        if (p.v_mag < 1e-3 || !assess_assumptions(p).all_hold()) continue;
        const auto c = classify_regime(p);
        EXPECT_EQ(flat_locus(p).empty(), c.regime == Regime::AllCurved)
            << p.alpha << " " << p.beta << " " << p.v_mag;
        ++checked;
    }
    EXPECT_EQ(checked, 500);
}

TEST(FlatLocus, ProfileCurvatureChangesSign) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 400; ++i) {
        const auto p = random_params(rng, 3);
        if (p.v_mag < 1e-3 || !assess_assumptions(p).all_hold()) continue;
        const auto branches = profile_branches(p);
        for (double z : flat_locus(p)) {
            for (const auto& b : branches) {
                if (b.sign() != BranchSign::Minus || !b.contains(z)) continue;
                const double scale = std::abs(b.d2h(b.lo() + 0.5 * (b.hi() - b.lo()))) + 1.0;
                EXPECT_LT(std::abs(b.d2h(z)), 1e-6 * scale) << p.alpha << " " << p.beta << " " << p.v_mag;
            }
        }
    }
}

TEST(CriticalValues, SphereAndShiftedCases) {
    auto cv = critical_values({-1, 0, 0, 2});
    ASSERT_EQ(cv.size(), 1u);
    EXPECT_EQ(cv[0], -1.0);
    cv = critical_values({1, 2, 0, 2});
    ASSERT_EQ(cv.size(), 2u);
    EXPECT_EQ(cv[1], 0.0);
    // |V| = 0.1: one axial critical point, q solves 4q^3 = 0.1
    cv = critical_values({-1, 0, 0.1, 2});
    ASSERT_EQ(cv.size(), 1u);
    const double q = std::cbrt(0.025);
    EXPECT_NEAR(cv[0], q * q * q * q - 1 - 0.1 * q, 1e-15);
}
