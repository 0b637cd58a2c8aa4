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

// SipHash-2-4 with a 128-bit key and 64-bit output.
//
// The key is split into two little-endian 64-bit halves (k0 = bytes 0..7,
// k1 = bytes 8..15), matching the reference implementation. Both parties of a
// reconciliation session must agree on the variant; changing the round counts
// changes every checksum on the wire.

#include <cstddef>
#include <cstdint>
#include <span>

namespace riblt {

namespace detail {

constexpr std::uint64_t rotl64(std::uint64_t x, int b) noexcept {
    return (x << b) | (x >> (64 - b));
}

constexpr std::uint64_t load_le64(const std::uint8_t* p) noexcept {
    return static_cast<std::uint64_t>(p[0]) |
           (static_cast<std::uint64_t>(p[1]) << 8) |
           (static_cast<std::uint64_t>(p[2]) << 16) |
           (static_cast<std::uint64_t>(p[3]) << 24) |
           (static_cast<std::uint64_t>(p[4]) << 32) |
           (static_cast<std::uint64_t>(p[5]) << 40) |
           (static_cast<std::uint64_t>(p[6]) << 48) |
           (static_cast<std::uint64_t>(p[7]) << 56);
}

struct SipState {
    std::uint64_t v0, v1, v2, v3;

    constexpr void round() noexcept {
        v0 += v1; v1 = rotl64(v1, 13); v1 ^= v0; v0 = rotl64(v0, 32);
        v2 += v3; v3 = rotl64(v3, 16); v3 ^= v2;
        v0 += v3; v3 = rotl64(v3, 21); v3 ^= v0;
        v2 += v1; v1 = rotl64(v1, 17); v1 ^= v2; v2 = rotl64(v2, 32);
    }

    constexpr void compress(std::uint64_t m) noexcept {
        v3 ^= m;
        round();
        round();
        v0 ^= m;
    }
};

}  // namespace detail

constexpr std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1,
                                  std::span<const std::uint8_t> data) noexcept {
    detail::SipState s{k0 ^ 0x736f6d6570736575ULL, k1 ^ 0x646f72616e646f6dULL,
                       k0 ^ 0x6c7967656e657261ULL, k1 ^ 0x7465646279746573ULL};

    const std::size_t n = data.size();
    const std::size_t tail = n & 7;
    const std::uint8_t* p = data.data();
    for (std::size_t off = 0; off + 8 <= n; off += 8) {
        s.compress(detail::load_le64(p + off));
    }

    std::uint64_t b = static_cast<std::uint64_t>(n) << 56;
    const std::uint8_t* t = p + (n - tail);
    for (std::size_t j = 0; j < tail; ++j) {
        b |= static_cast<std::uint64_t>(t[j]) << (8 * j);
    }
    s.compress(b);

    s.v2 ^= 0xff;
    s.round();
    s.round();
    s.round();
    s.round();
    return s.v0 ^ s.v1 ^ s.v2 ^ s.v3;
}

}  // namespace riblt
