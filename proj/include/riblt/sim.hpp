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

// Monte Carlo harness for communication overhead and decoding progress.
//
// A trial draws d random items and assigns each to one side at random. The
// items both sides share never reach the decoder (they cancel by linearity),
// so by default none are generated; `shared_items` adds some anyway. Every
// trial that completes is checked against the true difference.
//
// Trials are seeded from (seed, d, trial index) only, so results do not
// depend on thread count or scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "riblt/baseline.hpp"
#include "riblt/decoder.hpp"
#include "riblt/encoder.hpp"
#include "riblt/mapping.hpp"

namespace riblt::sim {

inline std::uint64_t mix64(std::uint64_t x) noexcept { return SplitMix64(x).next(); }

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t d, std::uint64_t trial) noexcept {
    return mix64(seed ^ mix64(d ^ mix64(trial)));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct Split {
    std::vector<Bytes> remote_only;
    std::vector<Bytes> local_only;
    std::vector<Bytes> shared;
};

/// d distinct random items split at random between the sides, plus
/// `shared` items present on both.
inline Split random_split(std::uint64_t d, std::uint64_t seed, std::size_t item_len = 8,
                          std::uint64_t shared = 0) {
    std::mt19937_64 rng(seed);
    std::unordered_set<std::string> seen;
    auto fresh = [&] {
        for (;;) {
            Bytes b(item_len);
            for (auto& x : b) x = static_cast<std::uint8_t>(rng());
            if (seen.emplace(b.begin(), b.end()).second) return b;
        }
    };
    Split s;
    for (std::uint64_t i = 0; i < d; ++i) {
        Bytes b = fresh();
        (rng() & 1 ? s.remote_only : s.local_only).push_back(std::move(b));
    }
    for (std::uint64_t i = 0; i < shared; ++i) s.shared.push_back(fresh());
    return s;
}

struct TrialOutcome {
    std::uint64_t cells = 0;  ///< cells ingested when decoding completed
    bool completed = false;
    bool exact = false;       ///< completed and equal to the true difference
    bool integrity_failed = false;
};

inline bool same_items(std::vector<Bytes> a, std::vector<Bytes> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

/// One reconciliation. If `progress` is given, progress[c] is the number of
/// items recovered after c cells.
inline TrialOutcome run_trial(const MappingProfile& profile, std::uint64_t d, std::uint64_t seed,
                              std::vector<std::uint32_t>* progress = nullptr,
                              std::size_t item_len = 8, std::uint64_t shared = 0) {
    const Split split = random_split(d, seed, item_len, shared);
    Encoder remote(item_len, profile);
    Decoder decoder(item_len, profile);
    for (const Bytes& b : split.remote_only) remote.add(b);
    for (const Bytes& b : split.local_only) decoder.add_local(b);
    for (const Bytes& b : split.shared) {
        remote.add(b);
        decoder.add_local(b);
    }

    if (progress) progress->assign(1, 0);
    const std::uint64_t cap = 50 * d + 1000;
    TrialOutcome out;
    while (!decoder.decoded_complete() && !decoder.integrity_failed() && out.cells < cap) {
        decoder.ingest(remote.emit_next());
        ++out.cells;
        if (progress) progress->push_back(static_cast<std::uint32_t>(decoder.recovered_count()));
    }
    out.integrity_failed = decoder.integrity_failed();
    out.completed = decoder.decoded_complete();
    if (out.completed) {
        const Difference diff = decoder.result();
        out.exact = same_items(diff.remote_only, split.remote_only) &&
                    same_items(diff.local_only, split.local_only);
    }
    return out;
}

struct OverheadRow {
    std::uint64_t d = 0;
    double mean_overhead = 0.0;
    double stddev = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;  ///< trials that did not end in an exact result
    std::vector<double> samples;
};

inline OverheadRow run_overhead_point(const MappingProfile& profile, std::uint64_t d,
                                      std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
    if (d == 0) throw Error("overhead is undefined for d = 0");
    if (trials == 0) throw Error("need at least one trial");
    std::vector<TrialOutcome> outcomes(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        outcomes[t] = run_trial(profile, d, trial_seed(seed, d, t));
    });

    OverheadRow row;
    row.d = d;
    row.trials = trials;
    double sum = 0.0;
    for (const TrialOutcome& o : outcomes) {
        const double ratio = static_cast<double>(o.cells) / static_cast<double>(d);
        row.samples.push_back(ratio);
        sum += ratio;
        if (!o.exact) ++row.failures;
    }
    row.mean_overhead = sum / static_cast<double>(trials);
    double sq = 0.0;
    for (double r : row.samples) sq += (r - row.mean_overhead) * (r - row.mean_overhead);
    row.stddev = trials > 1 ? std::sqrt(sq / static_cast<double>(trials - 1)) : 0.0;
    return row;
}

inline std::vector<OverheadRow> run_overhead(const MappingProfile& profile,
                                             std::span<const std::uint64_t> d_values,
                                             std::size_t trials, std::uint64_t seed,
                                             unsigned threads = 0) {
    std::vector<OverheadRow> rows;
    for (std::uint64_t d : d_values) rows.push_back(run_overhead_point(profile, d, trials, seed, threads));
    return rows;
}

inline std::vector<OverheadRow> run_irregular(std::span<const std::uint64_t> d_values,
                                              std::size_t trials, std::uint64_t seed,
                                              unsigned threads = 0) {
    return run_overhead(MappingProfile::default_irregular(), d_values, trials, seed, threads);
}

struct ProgressRow {
    double cells_over_d = 0.0;
    double mean_fraction = 0.0;
};

/// Mean recovered fraction after round(x * d) cells for x = 0, step, ... max_ratio.
inline std::vector<ProgressRow> run_progress(const MappingProfile& profile, std::uint64_t d,
                                             std::size_t trials, std::uint64_t seed,
                                             double step = 0.01, double max_ratio = 2.0,
                                             unsigned threads = 0) {
    if (d == 0) throw Error("progress is undefined for d = 0");
    if (trials == 0) throw Error("need at least one trial");
    const auto points = static_cast<std::size_t>(std::floor(max_ratio / step + 1e-9)) + 1;
    std::vector<std::vector<double>> per_trial(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        std::vector<std::uint32_t> progress;
        run_trial(profile, d, trial_seed(seed, d, t), &progress);
        auto& frac = per_trial[t];
        frac.resize(points);
        for (std::size_t p = 0; p < points; ++p) {
            const auto c = static_cast<std::size_t>(
                std::llround(static_cast<double>(p) * step * static_cast<double>(d)));
            const std::uint32_t got = progress[std::min(c, progress.size() - 1)];
            frac[p] = static_cast<double>(got) / static_cast<double>(d);
        }
    });
    std::vector<ProgressRow> rows(points);
    for (std::size_t p = 0; p < points; ++p) {
        rows[p].cells_over_d = static_cast<double>(p) * step;
        double sum = 0.0;
        for (const auto& f : per_trial) sum += f[p];
        rows[p].mean_fraction = sum / static_cast<double>(trials);
    }
    return rows;
}

struct BaselineRow {
    std::uint64_t d = 0;
    std::size_t cells_used = 0;
    double success_rate = 0.0;    ///< every difference item recovered exactly
    double any_recovered = 0.0;   ///< at least one item recovered
    double frac_recovered = 0.0;  ///< mean recovered / d
};

/// Regular IBLT of m cells with k hashes per item, decoded from its first
/// `prefix` cells (0 means all m).
inline BaselineRow run_baseline_point(std::size_t m, std::size_t k, std::uint64_t d,
                                      std::size_t trials, std::uint64_t seed, std::size_t prefix = 0,
                                      unsigned threads = 0, std::size_t item_len = 8) {
    if (prefix == 0) prefix = m;
    if (prefix > m) throw Error("prefix longer than the table");
    if (trials == 0) throw Error("need at least one trial");
    struct Outcome {
        bool success = false;
        bool any = false;
        double frac = 0.0;
    };
    std::vector<Outcome> outcomes(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const Split split = random_split(d, trial_seed(seed, d, t), item_len);
        auto cells = subtract_cells(iblt_encode(split.remote_only, item_len, m, k),
                                    iblt_encode(split.local_only, item_len, m, k));
        cells.resize(prefix);
        const IbltDecodeResult r = iblt_decode(std::move(cells), m, k);
        Outcome& o = outcomes[t];
        o.any = r.recovered() > 0;
        o.frac = d == 0 ? 1.0 : static_cast<double>(r.recovered()) / static_cast<double>(d);
        o.success = !r.integrity_failed && r.recovered() == d &&
                    same_items(r.difference.remote_only, split.remote_only) &&
                    same_items(r.difference.local_only, split.local_only);
    });
    BaselineRow row;
    row.d = d;
    row.cells_used = prefix;
    for (const Outcome& o : outcomes) {
        row.success_rate += o.success;
        row.any_recovered += o.any;
        row.frac_recovered += o.frac;
    }
    const auto n = static_cast<double>(trials);
    row.success_rate /= n;
    row.any_recovered /= n;
    row.frac_recovered /= n;
    return row;
}

inline std::vector<BaselineRow> run_baseline(std::size_t m, std::size_t k,
                                             std::span<const std::uint64_t> d_values,
                                             std::size_t trials, std::uint64_t seed,
                                             std::size_t prefix = 0, unsigned threads = 0) {
    std::vector<BaselineRow> rows;
    for (std::uint64_t d : d_values) {
        rows.push_back(run_baseline_point(m, k, d, trials, seed, prefix, threads));
    }
    return rows;
}

// CSV writers. Fixed formatting so equal inputs give equal bytes.

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline void write_csv(std::ostream& os, std::span<const OverheadRow> rows) {
    os << "d,mean_overhead,stddev,trials,failures\n";
    for (const auto& r : rows) {
        os << r.d << ',' << fmt_double(r.mean_overhead) << ',' << fmt_double(r.stddev) << ','
           << r.trials << ',' << r.failures << '\n';
    }
}

inline void write_csv(std::ostream& os, std::span<const ProgressRow> rows) {
    os << "cells_over_d,mean_fraction_recovered\n";
    for (const auto& r : rows) os << fmt_double(r.cells_over_d) << ',' << fmt_double(r.mean_fraction) << '\n';
}

inline void write_csv(std::ostream& os, std::span<const BaselineRow> rows) {
    os << "d,cells_used,success_rate,any_recovered,frac_recovered\n";
    for (const auto& r : rows) {
        os << r.d << ',' << r.cells_used << ',' << fmt_double(r.success_rate) << ','
           << fmt_double(r.any_recovered) << ',' << fmt_double(r.frac_recovered) << '\n';
    }
}

}  // namespace riblt::sim
