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

// Classical fixed-size IBLT: m cells, every item mapped to k distinct cells
// chosen uniformly at random. Kept as a point of comparison for the rateless
// stream; it only works near the difference size it was sized for.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/decoder.hpp"
#include "riblt/mapping.hpp"

namespace riblt {

/// k distinct cell indices in [0, m), drawn by rejection from a PRNG seeded
/// with the item checksum.
inline std::vector<std::size_t> iblt_indices(std::uint64_t checksum, std::size_t m, std::size_t k) {
    if (m == 0 || k == 0 || k > m) throw Error("IBLT needs m >= 1 and 1 <= k <= m");
    SplitMix64 prng(checksum);
    std::vector<std::size_t> out;
    out.reserve(k);
    while (out.size() < k) {
        const auto idx = static_cast<std::size_t>(prng.next() % m);
        if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
    return out;
}

inline std::vector<CodedSymbol> iblt_encode(std::span<const Bytes> set, std::size_t item_len,
                                            std::size_t m, std::size_t k, const HashKey& key = {}) {
    if (item_len == 0) throw Error("item length must be at least 1 byte");
    std::vector<CodedSymbol> cells(m, CodedSymbol::zero(item_len));
    for (const Bytes& item : set) {
        const HashedItem h = HashedItem::make(key, item);
        for (std::size_t idx : iblt_indices(h.checksum, m, k)) cells[idx].apply(h, Direction::add);
    }
    return cells;
}

struct IbltDecodeResult {
    bool success = false;
    bool integrity_failed = false;
    Difference difference;
    std::size_t rounds = 0;  ///< peeling rounds that recovered at least one item

    std::size_t recovered() const noexcept {
        return difference.remote_only.size() + difference.local_only.size();
    }
};

/// Peels a fixed table. `neighbors(checksum)` lists the cells an item maps
/// to; indices past the end of `cells` are treated as missing, which is how a
/// truncated prefix of a larger table is decoded. Each round peels every cell
/// that is pure at the start of the round.
template <class Neighbors>
IbltDecodeResult peel_table(std::vector<CodedSymbol> cells, const HashKey& key, Neighbors&& neighbors) {
    IbltDecodeResult res;
    std::vector<std::size_t> pure;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (is_pure(cells[i], key)) pure.push_back(i);
    }
    while (!pure.empty()) {
        std::vector<std::size_t> next;
        bool progress = false;
        for (std::size_t idx : pure) {
            if (!is_pure(cells[idx], key)) continue;
            const HashedItem h{cells[idx].sum, cells[idx].checksum};
            const bool remote = cells[idx].count > 0;
            const auto nbrs = neighbors(h.checksum);
            if (std::find(nbrs.begin(), nbrs.end(), idx) == nbrs.end()) {
                res.integrity_failed = true;
                return res;
            }
            for (auto j : nbrs) {
                if (j >= cells.size()) continue;
                cells[j].apply(h, remote ? Direction::remove : Direction::add);
                if (is_pure(cells[j], key)) next.push_back(j);
            }
            (remote ? res.difference.remote_only : res.difference.local_only).push_back(h.item);
            progress = true;
        }
        if (progress) ++res.rounds;
        pure = std::move(next);
    }
    res.success = std::all_of(cells.begin(), cells.end(), [](const CodedSymbol& c) { return c.is_zero(); });
    return res;
}

/// Decodes an m-cell IBLT (or the first cells.size() <= m cells of one).
/// Stalling before every cell is empty is reported as success = false.
inline IbltDecodeResult iblt_decode(std::vector<CodedSymbol> cells, std::size_t m, std::size_t k,
                                    const HashKey& key = {}) {
    if (cells.size() > m) throw Error("more cells than the table size");
    return peel_table(std::move(cells), key,
                      [m, k](std::uint64_t checksum) { return iblt_indices(checksum, m, k); });
}

/// Cell-wise a - b.
inline std::vector<CodedSymbol> subtract_cells(std::span<const CodedSymbol> a,
                                               std::span<const CodedSymbol> b) {
    if (a.size() != b.size()) throw Error("cell arrays differ in length");
    std::vector<CodedSymbol> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(subtract(a[i], b[i]));
    return out;
}

}  // namespace riblt
