/*
   Copyright 2026 The riblt Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "riblt/analysis.hpp"

namespace riblt::analysis {
namespace {

// Ei(x) = -integral_{-x}^inf e^-t / t dt; with t = -x e^u the integrand
// becomes exp(x e^u), smooth and doubly-exponentially decaying on [0, inf).
double ei_by_quadrature(double x) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const double v = integrator.integrate([x](double u) { return std::exp(x * std::exp(u)); }, 0.0,
                                          std::numeric_limits<double>::infinity());
    return -v;
}

TEST(ExpIntegral, MatchesQuadrature) {
    for (int i = 0; i < 100; ++i) {
        const double x = -std::exp(std::log(1e-4) + (std::log(50.0) - std::log(1e-4)) * i / 99.0);
        const double want = ei_by_quadrature(x);
        EXPECT_LT(std::abs(exp_integral_ei(x) - want), 1e-9 * std::abs(want)) << "x=" << x;
    }
}

TEST(ExpIntegral, KnownValues) {
    EXPECT_NEAR(exp_integral_ei(-1.0), -0.2193839344, 1e-10);
    EXPECT_NEAR(exp_integral_ei(-0.1), -1.8229239584, 1e-10);
    EXPECT_NEAR(exp_integral_ei(-10.0), -4.1569689296853243e-6, 1e-16);
    EXPECT_LT(std::abs(exp_integral_ei(-50.0)), 1e-20);
    EXPECT_LT(exp_integral_ei(-50.0), 0.0);
}

TEST(ExpIntegral, RejectsNonNegative) {
    EXPECT_THROW(exp_integral_ei(0.0), Error);
    EXPECT_THROW(exp_integral_ei(1.0), Error);
}

TEST(DeCondition, Examples) {
    EXPECT_LT(de_condition(0.5, 1.35, 1.0), 0.0);
    bool violated = false;
    for (double q : log_grid(1e-6, 1.0, 10000)) violated |= de_condition(0.5, 1.0, q) >= 0.0;
    EXPECT_TRUE(violated);
    EXPECT_NEAR(de_condition(0.5, 1.35, 1e-12), 0.0, 1e-11);
    EXPECT_EQ(de_update(0.5, 1.35, 0.0), 0.0);
}

TEST(DeCondition, DecreasesInEta) {
    for (double q : {0.01, 0.1, 0.5, 1.0}) {
        EXPECT_LT(de_condition(0.5, 1.5, q), de_condition(0.5, 1.2, q));
    }
}

TEST(Threshold, PublishedValues) {
    EXPECT_NEAR(solve_eta_star(0.5), 1.35, 0.01);
    EXPECT_NEAR(solve_eta_star(0.64), 1.31, 0.01);
}

// Reference values from an independent quadrature-based solver over the same
// grid.
TEST(Threshold, CurveAgainstReference) {
    const std::pair<double, double> ref[] = {
        {0.11, 2.9468}, {0.2, 2.0298}, {0.35, 1.5284}, {0.45, 1.3930}, {0.5, 1.3530},
        {0.55, 1.3265}, {0.6, 1.3115}, {0.64, 1.3070}, {0.68, 1.3090}, {0.7, 1.3125},
        {0.82, 1.3728}, {0.95, 1.5671}, {1.0, 1.7811},
    };
    for (auto [alpha, eta] : ref) EXPECT_NEAR(solve_eta_star(alpha), eta, 0.02) << "alpha=" << alpha;
}

TEST(Threshold, SingleMinimumNearPointSixFour) {
    std::vector<double> alphas, etas;
    for (double a = 0.3; a <= 1.0001; a += 0.02) {
        alphas.push_back(a);
        etas.push_back(solve_eta_star(ThresholdQuery{a, 2000, 1e-6, 1e-3}));
    }
    const auto best = std::min_element(etas.begin(), etas.end()) - etas.begin();
    EXPECT_NEAR(alphas[static_cast<std::size_t>(best)], 0.64, 0.05);
    for (std::size_t i = 1; i < etas.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) <= best) {
            EXPECT_LE(etas[i], etas[i - 1] + 1e-3);
        } else {
            EXPECT_GE(etas[i], etas[i - 1] - 1e-3);
        }
    }
}

TEST(Threshold, QueryValidation) {
    EXPECT_THROW(solve_eta_star(ThresholdQuery{0.5, 999}), Error);
    EXPECT_THROW(solve_eta_star(ThresholdQuery{0.5, 10000, 1e-6, 1e-2}), Error);
    EXPECT_THROW(solve_eta_star(ThresholdQuery{0.0}), Error);
}

TEST(Threshold, ResultSatisfiesCondition) {
    const ThresholdQuery q{0.5};
    const double eta = solve_eta_star(q);
    const auto grid = log_grid(q.q_min, 1.0, q.q_points);
    EXPECT_TRUE(de_condition_holds(0.5, eta, grid));
    EXPECT_FALSE(de_condition_holds(0.5, eta - 2 * q.eta_tolerance, grid));
}

TEST(FixedPoint, SupercriticalRecoversEverything) {
    for (double eta : {1.4, 1.6, 2.0}) {
        const auto pts = de_fixed_point_curve(0.5, std::vector<double>{eta});
        EXPECT_NEAR(pts[0].recovered_fraction, 1.0, 1e-9) << eta;
    }
}

TEST(FixedPoint, SubcriticalStalls) {
    const double q = de_fixed_point(0.5, 1.2);
    EXPECT_GT(q, 0.1);
    EXPECT_NEAR(de_update(0.5, 1.2, q), q, 1e-9);
    const auto pts = de_fixed_point_curve(0.5, std::vector<double>{0.5, 1.0, 1.2, 1.3});
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_GT(pts[i].recovered_fraction, pts[i - 1].recovered_fraction);
        EXPECT_LT(pts[i].recovered_fraction, 1.0);
    }
}

TEST(LogGrid, Endpoints) {
    const auto g = log_grid(1e-6, 1.0, 10000);
    EXPECT_NEAR(g.front(), 1e-6, 1e-18);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

}  // namespace
}  // namespace riblt::analysis
