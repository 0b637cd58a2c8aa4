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

#pragma once

// Density-evolution toolkit for the rateless stream.
//
// With n difference items and eta * n coded symbols, the probability q that a
// random edge still touches an unrecovered item evolves, as n grows, by
//     q <- f(q) = exp(Ei(-q / (alpha * eta)) / alpha).
// Peeling succeeds with probability tending to 1 iff f(q) < q on (0, 1]; the
// smallest such eta is the threshold eta*(alpha). Below the threshold the
// iteration stalls at a fixed point q* > 0 and 1 - q* is the fraction of
// items recovered.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "riblt/core.hpp"

namespace riblt::analysis {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Exponential integral Ei(x) for x < 0, i.e. -E1(-x). Power series for
/// |x| <= 1, Lentz continued fraction beyond.
inline double exp_integral_ei(double x) {
    if (!(x < 0.0)) throw Error("exp_integral_ei is only defined here for x < 0");
    const double z = -x;
    constexpr double eps = 1e-16;
    if (z <= 1.0) {
        // E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
        double sum = 0.0;
        double term = 1.0;
        for (int k = 1; k < 100; ++k) {
            term *= -z / k;
            const double contrib = term / k;
            sum += contrib;
            if (std::abs(contrib) < eps * std::abs(sum)) break;
        }
        return kEulerGamma + std::log(z) + sum;
    }
    constexpr double tiny = 1e-300;
    double b = z + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return -h * std::exp(-z);
}

/// One density-evolution step f(q).
inline double de_update(double alpha, double eta, double q) {
    if (q <= 0.0) return 0.0;
    return std::exp(exp_integral_ei(-q / (alpha * eta)) / alpha);
}

/// f(q) - q; negative where the decoder still makes progress.
inline double de_condition(double alpha, double eta, double q) {
    return de_update(alpha, eta, q) - q;
}

struct ThresholdQuery {
    double alpha = 0.5;
    std::size_t q_points = 10'000;  ///< log-spaced grid size over [q_min, 1]
    double q_min = 1e-6;
    double eta_tolerance = 1e-4;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    g.back() = hi;
    return g;
}

inline bool de_condition_holds(double alpha, double eta, std::span<const double> q_grid) {
    for (double q : q_grid) {
        if (!(de_condition(alpha, eta, q) < 0.0)) return false;
    }
    return true;
}

/// Smallest eta (to within eta_tolerance, rounded up) for which the
/// condition holds on the whole grid. The left-hand side decreases in eta,
/// so the feasible set is an interval and bisection applies.
inline double solve_eta_star(const ThresholdQuery& query) {
    if (!(query.alpha > 0.0)) throw Error("alpha must be positive");
    if (query.q_points < 1000) throw Error("threshold grid needs at least 1000 points");
    if (!(query.eta_tolerance > 0.0) || query.eta_tolerance > 1e-3) {
        throw Error("eta tolerance must be in (0, 1e-3]");
    }
    if (!(query.q_min > 0.0 && query.q_min < 1.0)) throw Error("q_min must be in (0, 1)");

    const std::vector<double> grid = log_grid(query.q_min, 1.0, query.q_points);
    double lo = 0.25;
    double hi = 1.0;
    while (!de_condition_holds(query.alpha, hi, grid)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) throw Error("no threshold found for this alpha on the given grid");
    }
    while (de_condition_holds(query.alpha, lo, grid)) {
        hi = lo;
        lo /= 2.0;
    }
    while (hi - lo > query.eta_tolerance) {
        const double mid = 0.5 * (lo + hi);
        (de_condition_holds(query.alpha, mid, grid) ? hi : lo) = mid;
    }
    return hi;
}

inline double solve_eta_star(double alpha) { return solve_eta_star(ThresholdQuery{alpha}); }

/// Iterates q <- f(q) from q = 1 until it stops moving; returns q*.
inline double de_fixed_point(double alpha, double eta, double tol = 1e-13,
                             std::size_t max_iter = 2'000'000) {
    double q = 1.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double next = de_update(alpha, eta, q);
        if (std::abs(next - q) < tol || next < std::numeric_limits<double>::min()) return next;
        q = next;
    }
    return q;
}

struct ProgressPoint {
    double eta;                 ///< coded symbols per difference item
    double recovered_fraction;  ///< 1 - q*
};

inline std::vector<ProgressPoint> de_fixed_point_curve(double alpha, std::span<const double> etas) {
    std::vector<ProgressPoint> out;
    out.reserve(etas.size());
    for (double eta : etas) out.push_back({eta, 1.0 - de_fixed_point(alpha, eta)});
    return out;
}

}  // namespace riblt::analysis
