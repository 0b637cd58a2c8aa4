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

// Shared helpers for the unit tests.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/mapping.hpp"

namespace riblt::testing {

inline Bytes random_item(std::mt19937_64& rng, std::size_t len) {
    Bytes b(len);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

/// `n` distinct random items.
inline std::vector<Bytes> random_items(std::mt19937_64& rng, std::size_t n, std::size_t len) {
    std::set<Bytes> seen;
    std::vector<Bytes> out;
    while (out.size() < n) {
        Bytes b = random_item(rng, len);
        if (seen.insert(b).second) out.push_back(std::move(b));
    }
    return out;
}

inline std::vector<Bytes> sorted(std::vector<Bytes> v) {
    std::sort(v.begin(), v.end());
    return v;
}

/// A \ B by plain set algebra.
inline std::vector<Bytes> minus(const std::vector<Bytes>& a, const std::vector<Bytes>& b) {
    const std::set<Bytes> bs(b.begin(), b.end());
    std::vector<Bytes> out;
    for (const Bytes& x : a) {
        if (!bs.count(x)) out.push_back(x);
    }
    return sorted(std::move(out));
}

/// Reference encoder: walks every item's index sequence independently.
inline std::vector<CodedSymbol> naive_encode(const std::vector<Bytes>& items, std::size_t m,
                                             std::size_t len,
                                             const MappingProfile& profile = MappingProfile::regular(),
                                             const HashKey& key = {}, Direction dir = Direction::add) {
    std::vector<CodedSymbol> cells(m, CodedSymbol::zero(len));
    for (const Bytes& it : items) {
        const HashedItem h = HashedItem::make(key, it);
        Mapper mp = Mapper::make(h, profile);
        for (std::uint64_t i = mp.next_index(); i < m; i = mp.next_index()) cells[i].apply(h, dir);
    }
    return cells;
}

}  // namespace riblt::testing
