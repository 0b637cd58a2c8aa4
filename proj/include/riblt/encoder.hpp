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

// Incremental encoder producing the unbounded coded-symbol stream of a set.
//
// Items sit in a min-heap keyed by the next index they map to, so emitting
// symbol i only touches the items mapped to i. Two modes:
//
//   streaming  symbols are handed out and forgotten; the set is frozen once
//              the first symbol has been emitted.
//   cached     the emitted prefix is retained; add/remove after emission
//              patch the cached symbols in place, so the prefix always equals
//              a fresh encoding of the current set.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/mapping.hpp"

namespace riblt {

enum class EncoderMode { streaming, cached };

class Encoder {
public:
    explicit Encoder(std::size_t item_len, MappingProfile profile = MappingProfile::regular(),
                     HashKey key = {}, EncoderMode mode = EncoderMode::streaming)
        : item_len_(item_len), profile_(std::move(profile)), key_(key), mode_(mode) {
        if (item_len_ == 0) throw Error("item length must be at least 1 byte");
        profile_.validate();
    }

    void add(ByteView item) { add(HashedItem::make(key_, item)); }

    /// Adds an item whose checksum was computed with this encoder's key.
    void add(HashedItem h) {
        require_length(item_len_, h.item.size());
        require_mutable();
        if (find_slot(h) != npos) throw Error("item already present in encoder");

        std::size_t s;
        if (!free_.empty()) {
            s = free_.back();
            free_.pop_back();
        } else {
            s = slots_.size();
            slots_.emplace_back();
        }
        Slot& slot = slots_[s];
        slot.mapper = Mapper::make(h, profile_);
        slot.live = true;

        std::uint64_t idx = slot.mapper.next_index();
        while (idx < next_index_) {
            cache_[idx].apply(h, Direction::add);
            idx = slot.mapper.next_index();
        }
        index_.emplace(h.checksum, s);
        slot.item = std::move(h);
        queue_.push({idx, s, slot.generation});
        ++live_;
    }

    /// Removes a present item. Throws if the item is not in the set.
    void remove(ByteView item) {
        require_length(item_len_, item.size());
        require_mutable();
        const HashedItem h = HashedItem::make(key_, item);
        const std::size_t s = find_slot(h);
        if (s == npos) throw Error("cannot remove an item that is not in the encoder");

        if (next_index_ > 0) {
            Mapper m = Mapper::make(h, profile_);
            for (std::uint64_t idx = m.next_index(); idx < next_index_; idx = m.next_index()) {
                cache_[idx].apply(h, Direction::remove);
            }
        }
        auto [lo, hi] = index_.equal_range(h.checksum);
        for (auto it = lo; it != hi; ++it) {
            if (it->second == s) {
                index_.erase(it);
                break;
            }
        }
        Slot& slot = slots_[s];
        slot.live = false;
        slot.item = {};
        ++slot.generation;  // invalidates the queue entry lazily
        free_.push_back(s);
        --live_;
    }

    bool contains(ByteView item) const {
        if (item.size() != item_len_) return false;
        return find_slot(HashedItem::make(key_, item)) != npos;
    }

    CodedSymbol emit_next() {
        CodedSymbol cell = CodedSymbol::zero(item_len_);
        while (!queue_.empty() && queue_.top().index == next_index_) {
            const Entry e = queue_.top();
            queue_.pop();
            Slot& slot = slots_[e.slot];
            if (!slot.live || slot.generation != e.generation) continue;
            cell.apply(slot.item, Direction::add);
            queue_.push({slot.mapper.next_index(), e.slot, e.generation});
        }
        ++next_index_;
        if (mode_ == EncoderMode::cached) cache_.push_back(cell);
        return cell;
    }

    std::vector<CodedSymbol> emit_prefix(std::size_t m) {
        std::vector<CodedSymbol> out;
        out.reserve(m);
        for (std::size_t i = 0; i < m; ++i) out.push_back(emit_next());
        return out;
    }

    /// Cached mode only: symbol i, emitting further symbols if needed.
    const CodedSymbol& symbol(std::size_t i) {
        if (mode_ != EncoderMode::cached) throw Error("random access requires a cached encoder");
        while (cache_.size() <= i) emit_next();
        return cache_[i];
    }

    std::span<const CodedSymbol> cached_prefix() const noexcept { return cache_; }

    std::uint64_t next_index() const noexcept { return next_index_; }
    std::size_t size() const noexcept { return live_; }
    std::size_t item_len() const noexcept { return item_len_; }
    const MappingProfile& profile() const noexcept { return profile_; }
    const HashKey& key() const noexcept { return key_; }
    EncoderMode mode() const noexcept { return mode_; }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    struct Slot {
        HashedItem item;
        Mapper mapper{0, 0.5};
        std::uint32_t generation = 0;
        bool live = false;
    };

    struct Entry {
        std::uint64_t index;
        std::size_t slot;
        std::uint32_t generation;

        bool operator>(const Entry& o) const noexcept { return index > o.index; }
    };

    void require_mutable() const {
        if (mode_ == EncoderMode::streaming && next_index_ > 0) {
            throw Error("streaming encoder cannot change its set after emitting symbols");
        }
    }

    std::size_t find_slot(const HashedItem& h) const {
        auto [lo, hi] = index_.equal_range(h.checksum);
        for (auto it = lo; it != hi; ++it) {
            if (slots_[it->second].item.item == h.item) return it->second;
        }
        return npos;
    }

    std::size_t item_len_;
    MappingProfile profile_;
    HashKey key_;
    EncoderMode mode_;

    std::vector<Slot> slots_;
    std::vector<std::size_t> free_;
    std::unordered_multimap<std::uint64_t, std::size_t> index_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    std::vector<CodedSymbol> cache_;
    std::uint64_t next_index_ = 0;
    std::size_t live_ = 0;
};

/// The first m symbols of a set, encoded from scratch.
inline std::vector<CodedSymbol> encode_prefix(std::span<const Bytes> items, std::size_t m,
                                              std::size_t item_len,
                                              const MappingProfile& profile = MappingProfile::regular(),
                                              const HashKey& key = {}) {
    Encoder enc(item_len, profile, key);
    for (const Bytes& it : items) enc.add(it);
    return enc.emit_prefix(m);
}

}  // namespace riblt
