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

// Per-item mapping from items to coded-symbol indices.
//
// An item is mapped to index i with probability rho(i) = 1 / (1 + alpha * i),
// independently across indices. Rather than testing every index, a Mapper
// samples the gap to the next mapped index directly from its distribution,
// so walking the first m indices of an item costs O(log m).
//
// Everything here is part of the wire contract: two parties reconcile only if
// they produce identical index sequences, which pins the PRNG, the way r is
// drawn from it, and the floating-point formulas below.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "riblt/core.hpp"

namespace riblt {

inline double mapping_probability(std::uint64_t index, double alpha) noexcept {
    return 1.0 / (1.0 + alpha * static_cast<double>(index));
}

class InvalidProfile : public Error {
public:
    using Error::Error;
};

/// Mixture of mapping probabilities. A regular profile has one subset; an
/// irregular profile partitions items into subsets by checksum, each with its
/// own alpha.
struct MappingProfile {
    std::vector<double> weights{1.0};
    std::vector<double> alphas{0.5};
    bool irregular = false;

    static MappingProfile regular(double alpha = 0.5) {
        MappingProfile p{{1.0}, {alpha}, false};
        p.validate();
        return p;
    }

    static MappingProfile make_irregular(std::vector<double> weights, std::vector<double> alphas) {
        MappingProfile p{std::move(weights), std::move(alphas), true};
        p.validate();
        return p;
    }

    /// Three subsets found by simulation to bring the asymptotic overhead to about 1.10.
    static MappingProfile default_irregular() {
        return make_irregular({0.18, 0.56, 0.26}, {0.11, 0.68, 0.82});
    }

    std::size_t subsets() const noexcept { return alphas.size(); }

    void validate() const {
        if (alphas.empty() || alphas.size() != weights.size()) {
            throw InvalidProfile("profile needs one weight per alpha and at least one subset");
        }
        for (double a : alphas) {
            if (!(a > 0.0) || !std::isfinite(a)) throw InvalidProfile("alpha must be positive");
        }
        for (double w : weights) {
            if (!(w >= 0.0)) throw InvalidProfile("weights must be non-negative");
        }
        double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9) {
            throw InvalidProfile("weights sum to " + std::to_string(total) + ", expected 1");
        }
    }

    /// Subset j such that sum(w[0..j)) <= u < sum(w[0..j]), u = checksum / 2^64.
    std::size_t subset_for(std::uint64_t checksum) const noexcept {
        const double u = static_cast<double>(checksum >> 11) * 0x1.0p-53;
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
            acc += weights[j];
            if (u < acc) return j;
        }
        return weights.size() - 1;
    }

    /// Probability that a random item maps to `index` under this profile.
    double probability(std::uint64_t index) const noexcept {
        double p = 0.0;
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            p += weights[j] * mapping_probability(index, alphas[j]);
        }
        return p;
    }

    friend bool operator==(const MappingProfile&, const MappingProfile&) = default;
};

/// SplitMix64. State advances by the golden-ratio increment; output is the
/// Stafford variant-13 finalizer of the state.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) from the top 53 bits.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Continuous inverse of the skip-distance CDF at the current index.
///
/// For alpha = 0.5 the CDF has the closed form x(2i+x+3) / ((i+x+1)(i+x+2))
/// and its inverse is sqrt(((3+2i)^2 - r) / (4(1-r))) - (3+2i)/2. It is
/// evaluated in the algebraically equal form
///     r(a^2 - 1) / (1 - r) / (2 (sqrt((a^2 - r) / (1 - r)) + a)),  a = 3 + 2i,
/// which avoids cancellation at large i.
///
/// Other alphas use the Stirling estimate of the Gamma-function ratio,
/// (i + s)((1 - r)^-alpha - 1) with s = (1 + 1/alpha) / 2. The offset s is the
/// midpoint shift of Gamma(x + a) / Gamma(x + b) ~ (x + (a + b - 1)/2)^(a - b);
/// at alpha = 0.5 it reproduces the (1.5 + i) of the square-root form.
inline double skip_inverse_cdf(std::uint64_t index, double alpha, double r) noexcept {
    const double i = static_cast<double>(index);
    if (alpha == 0.5) {
        const double a = 3.0 + 2.0 * i;
        const double num = r * (a * a - 1.0) / (1.0 - r);
        return num / (2.0 * (std::sqrt((a * a - r) / (1.0 - r)) + a));
    }
    const double shift = 0.5 * (1.0 + 1.0 / alpha);
    return (i + shift) * std::expm1(-alpha * std::log1p(-r));
}

namespace detail {

inline double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
    return std::lgamma(x);
#endif
}

/// log P(gap > g) at index i = sum_{j=1..g} log((i + j) / (i + j + 1/alpha)).
inline double log_survival(double i, double inv_alpha, double g) noexcept {
    return log_gamma(i + g + 1.0) - log_gamma(i + g + 1.0 + inv_alpha) +
           log_gamma(i + 1.0 + inv_alpha) - log_gamma(i + 1.0);
}

// Above this the Stirling estimate is exact to well under one index and
// log-gamma differences start losing precision.
inline constexpr double kExactSkipLimit = 0x1.0p30;

}  // namespace detail

/// Gap to the next mapped index: the smallest g >= 1 with P(gap <= g) >= r.
/// For alpha = 0.5 this is the ceiling of the closed-form inverse. Otherwise
/// the Stirling estimate is refined by an integer search on the exact
/// survival function while the indices stay small enough for it.
inline std::uint64_t skip_distance(std::uint64_t index, double alpha, double r) noexcept {
    constexpr double cap = 0x1.0p62;
    double g = std::ceil(skip_inverse_cdf(index, alpha, r));
    if (!(g >= 1.0)) g = 1.0;
    if (g > cap) return static_cast<std::uint64_t>(cap);

    const double i = static_cast<double>(index);
    const double inv_alpha = 1.0 / alpha;
    if (alpha != 0.5 && i + g + inv_alpha < detail::kExactSkipLimit) {
        const double target = std::log1p(-r);
        auto reached = [&](double x) { return detail::log_survival(i, inv_alpha, x) <= target; };
        if (reached(g)) {
            double step = 1.0;
            while (g > 1.0 && reached(std::max(1.0, g - step))) {
                g = std::max(1.0, g - step);
                step *= 2.0;
            }
            for (; step >= 1.0; step /= 2.0) {
                if (g - step >= 1.0 && reached(g - step)) g -= step;
            }
        } else {
            double step = 1.0;
            while (!reached(g + step)) step *= 2.0;
            double lo = g + step / 2.0, hi = g + step;  // reached(hi), !reached(lo) unless step == 1
            if (step == 1.0) lo = g;
            while (hi - lo > 1.0) {
                const double mid = std::floor((lo + hi) / 2.0);
                (reached(mid) ? hi : lo) = mid;
            }
            g = hi;
        }
    }
    return static_cast<std::uint64_t>(g);
}

/// Generator of the strictly increasing index sequence of one item. The first
/// call to next_index() returns 0, since every item maps to index 0.
class Mapper {
public:
    Mapper(std::uint64_t seed, double alpha) noexcept : prng_(seed), alpha_(alpha) {}

    /// Seeds from the item checksum; irregular profiles pick alpha by subset.
    static Mapper make(const HashedItem& h, const MappingProfile& profile) {
        return make(h.checksum, profile);
    }

    static Mapper make(std::uint64_t checksum, const MappingProfile& profile) {
        return Mapper(checksum, profile.alphas[profile.subset_for(checksum)]);
    }

    std::uint64_t next_index() noexcept {
        if (!started_) {
            started_ = true;
            return last_;
        }
        const std::uint64_t g = skip_distance(last_, alpha_, prng_.next_unit());
        last_ = g > std::numeric_limits<std::uint64_t>::max() - last_
                    ? std::numeric_limits<std::uint64_t>::max()
                    : last_ + g;
        return last_;
    }

    /// Most recently returned index; 0 before the first call.
    std::uint64_t last_index() const noexcept { return last_; }
    bool started() const noexcept { return started_; }
    double alpha() const noexcept { return alpha_; }

private:
    SplitMix64 prng_;
    std::uint64_t last_ = 0;
    double alpha_;
    bool started_ = false;
};

}  // namespace riblt
