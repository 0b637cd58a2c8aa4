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

// Domain types shared by every part of the library: items, the keyed checksum,
// and the coded-symbol algebra.
//
// A coded symbol is the triple (sum, checksum, count). Sums and checksums
// combine by XOR and counts by integer addition, so the set of coded symbols
// of a fixed item length forms an abelian group. Encoding a set and
// subtracting the encoding of another set yields the encoding of their
// symmetric difference; everything else in the library leans on that.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "riblt/siphash.hpp"

namespace riblt {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when two values that must share the session item length do not.
class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t expected, std::size_t actual)
        : Error("item length mismatch: expected " + std::to_string(expected) +
                " bytes, got " + std::to_string(actual)) {}
};

inline void require_length(std::size_t expected, std::size_t actual) {
    if (expected != actual) throw LengthMismatch(expected, actual);
}

inline std::string to_hex(ByteView bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 15]);
    }
    return out;
}

inline Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error("odd-length hex string");
    auto nib = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw Error("invalid hex digit");
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nib(hex[2 * i]) << 4) | nib(hex[2 * i + 1]));
    }
    return out;
}

/// 128-bit key selecting the checksum function. The all-zero default lets two
/// parties interoperate with no setup but gives no protection against
/// adversarially chosen items.
struct HashKey {
    std::uint64_t k0 = 0;
    std::uint64_t k1 = 0;

    static HashKey from_bytes(std::span<const std::uint8_t, 16> b) noexcept {
        return {detail::load_le64(b.data()), detail::load_le64(b.data() + 8)};
    }

    /// Parses 32 hex digits (16 bytes, k0 first, little-endian halves).
    static HashKey from_hex(std::string_view hex) {
        if (hex.size() != 32) throw Error("hash key must be 32 hex digits");
        Bytes b = riblt::from_hex(hex);
        return from_bytes(std::span<const std::uint8_t, 16>(b.data(), 16));
    }

    friend bool operator==(const HashKey&, const HashKey&) = default;
};

inline std::uint64_t keyed_hash(const HashKey& key, ByteView item) noexcept {
    return siphash24(key.k0, key.k1, item);
}

struct HashedItem {
    Bytes item;
    std::uint64_t checksum = 0;

    static HashedItem make(const HashKey& key, ByteView bytes) {
        return {Bytes(bytes.begin(), bytes.end()), keyed_hash(key, bytes)};
    }

    friend bool operator==(const HashedItem&, const HashedItem&) = default;
};

enum class Direction { add, remove };

struct CodedSymbol {
    Bytes sum;
    std::uint64_t checksum = 0;
    std::int64_t count = 0;

    static CodedSymbol zero(std::size_t item_len) { return {Bytes(item_len, 0), 0, 0}; }

    std::size_t item_len() const noexcept { return sum.size(); }

    bool is_zero() const noexcept {
        return count == 0 && checksum == 0 &&
               std::all_of(sum.begin(), sum.end(), [](std::uint8_t b) { return b == 0; });
    }

    /// XORs the item into sum and checksum; count moves by +1 (add) or -1 (remove).
    CodedSymbol& apply(const HashedItem& h, Direction dir) {
        require_length(sum.size(), h.item.size());
        xor_bytes(h.item);
        checksum ^= h.checksum;
        count += dir == Direction::add ? 1 : -1;
        return *this;
    }

    CodedSymbol& operator-=(const CodedSymbol& o) {
        require_length(sum.size(), o.sum.size());
        xor_bytes(o.sum);
        checksum ^= o.checksum;
        count -= o.count;
        return *this;
    }

    CodedSymbol& operator+=(const CodedSymbol& o) {
        require_length(sum.size(), o.sum.size());
        xor_bytes(o.sum);
        checksum ^= o.checksum;
        count += o.count;
        return *this;
    }

    friend bool operator==(const CodedSymbol&, const CodedSymbol&) = default;

private:
    void xor_bytes(ByteView src) noexcept {
        std::uint8_t* dst = sum.data();
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] ^= src[i];
    }
};

inline CodedSymbol apply(CodedSymbol cell, const HashedItem& h, Direction dir) {
    cell.apply(h, dir);
    return cell;
}

inline CodedSymbol subtract(CodedSymbol a, const CodedSymbol& b) {
    a -= b;
    return a;
}

/// Count-summing dual of subtract.
inline CodedSymbol add(CodedSymbol a, const CodedSymbol& b) {
    a += b;
    return a;
}

/// A cell holds exactly one item when its checksum is the hash of its sum.
/// The count test only filters out the common impure cases cheaply.
inline bool is_pure(const CodedSymbol& cell, const HashKey& key) noexcept {
    if (cell.count != 1 && cell.count != -1) return false;
    return keyed_hash(key, cell.sum) == cell.checksum;
}

}  // namespace riblt
