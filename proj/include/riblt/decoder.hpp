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

// Peeling decoder over the difference stream.
//
// The remote party's symbols arrive in index order. Each one is combined with
// the matching symbol of the local set (generated in lockstep), leaving a
// symbol of the symmetric difference. Pure cells are peeled: the item is
// recovered, attributed to a side by the sign of its count, and XORed out of
// every other cell it maps to, including cells that have not arrived yet.
// Decoding is complete once cell 0 is empty, because every item maps to it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/encoder.hpp"
#include "riblt/mapping.hpp"

namespace riblt {

/// A pure-looking cell peeled to an item whose mapping does not cover the
/// cell's index: only possible after a checksum collision.
class IntegrityError : public Error {
public:
    using Error::Error;
};

struct Difference {
    std::vector<Bytes> remote_only;  ///< in the remote set, not the local one
    std::vector<Bytes> local_only;   ///< in the local set, not the remote one
};

class Decoder {
public:
    explicit Decoder(std::size_t item_len, MappingProfile profile = MappingProfile::regular(),
                     HashKey key = {})
        : local_(item_len, std::move(profile), key) {}

    /// Decodes against `local`; the encoder must not have emitted anything yet.
    explicit Decoder(Encoder local) : local_(std::move(local)) {
        if (local_.next_index() != 0) throw Error("decoder needs an unused local encoder");
    }

    /// Adds an item of the local set. Only valid before the first ingest.
    void add_local(ByteView item) { local_.add(item); }

    /// Consumes the next remote symbol. No-op once complete or failed.
    void ingest(const CodedSymbol& remote) {
        require_length(item_len(), remote.item_len());
        if (complete_ || failed_) return;

        const std::uint64_t i = cells_.size();
        CodedSymbol diff = remote;
        diff -= local_.emit_next();

        while (!future_.empty() && future_.top().index == i) {
            const Pending p = future_.top();
            future_.pop();
            Recovered& r = recovered_[p.slot];
            cancel(diff, r);
            future_.push({r.mapper.next_index(), p.slot});
        }

        cells_.push_back(std::move(diff));
        if (is_pure(cells_.back(), key())) pure_.push_back(i);
        peel();
    }

    /// Drains the pure-cell queue.
    void peel() {
        while (!pure_.empty() && !failed_) {
            const std::uint64_t idx = pure_.back();
            pure_.pop_back();
            const CodedSymbol& cell = cells_[idx];
            if (!is_pure(cell, key())) continue;  // changed since it was queued

            Recovered r{HashedItem{cell.sum, cell.checksum}, cell.count,
                        Mapper::make(cell.checksum, local_.profile())};
            const std::uint64_t last = cells_.size() - 1;
            bool covers_idx = false;
            std::uint64_t j = r.mapper.next_index();
            for (; j <= last; j = r.mapper.next_index()) {
                covers_idx |= j == idx;
                CodedSymbol& target = cells_[j];
                cancel(target, r);
                if (j != idx && is_pure(target, key())) pure_.push_back(j);
            }
            if (!covers_idx) {
                failed_ = true;
                break;
            }
            const std::size_t slot = recovered_.size();
            recovered_.push_back(std::move(r));
            future_.push({j, slot});
        }
        if (!failed_ && !cells_.empty() && cells_[0].is_zero()) complete_ = true;
    }

    /// True once cell 0 has been reduced to the zero symbol.
    bool decoded_complete() const noexcept { return complete_; }

    /// True if peeling hit an inconsistency (checksum collision).
    bool integrity_failed() const noexcept { return failed_; }

    /// The symmetric difference. Throws unless decoding completed.
    Difference result() const {
        if (failed_) throw IntegrityError("decoding failed an integrity check");
        if (!complete_) throw Error("result requested before decoding completed");
        Difference d;
        for (const Recovered& r : recovered_) {
            (r.sign > 0 ? d.remote_only : d.local_only).push_back(r.item.item);
        }
        return d;
    }

    std::size_t cells_received() const noexcept { return cells_.size(); }
    std::size_t recovered_count() const noexcept { return recovered_.size(); }
    std::size_t item_len() const noexcept { return local_.item_len(); }
    const HashKey& key() const noexcept { return local_.key(); }
    const MappingProfile& profile() const noexcept { return local_.profile(); }
    std::size_t local_size() const noexcept { return local_.size(); }

private:
    struct Recovered {
        HashedItem item;
        std::int64_t sign;  // +1 remote-only, -1 local-only
        Mapper mapper;
    };

    struct Pending {
        std::uint64_t index;
        std::size_t slot;

        bool operator>(const Pending& o) const noexcept { return index > o.index; }
    };

    static void cancel(CodedSymbol& cell, const Recovered& r) {
        cell.apply(r.item, r.sign > 0 ? Direction::remove : Direction::add);
    }

    Encoder local_;
    std::vector<CodedSymbol> cells_;
    std::vector<std::uint64_t> pure_;
    std::vector<Recovered> recovered_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> future_;
    bool complete_ = false;
    bool failed_ = false;
};

}  // namespace riblt
