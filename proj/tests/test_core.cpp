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

#include <random>

#include "riblt/core.hpp"

namespace riblt {
namespace {

Bytes iota_bytes(std::size_t n) {
    Bytes b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(i);
    return b;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

// Reference outputs with key 00 01 .. 0f and message 00 01 .. (len-1).
TEST(SipHash, ReferenceVectors) {
    const HashKey key = HashKey::from_hex("000102030405060708090a0b0c0d0e0f");
    const std::pair<std::size_t, std::uint64_t> vectors[] = {
        {0, 0x726fdb47dd0e0e31ULL},  {1, 0x74f839c593dc67fdULL},  {7, 0xab0200f58b01d137ULL},
        {8, 0x93f5f5799a932462ULL},  {15, 0xa129ca6149be45e5ULL}, {16, 0x3f2acc7f57c29bdbULL},
        {63, 0x958a324ceb064572ULL},
    };
    for (auto [len, want] : vectors) {
        EXPECT_EQ(keyed_hash(key, iota_bytes(len)), want) << "len " << len;
    }
}

TEST(SipHash, DefaultKeyIsAllZero) {
    const Bytes hello{'h', 'e', 'l', 'l', 'o'};
    EXPECT_EQ(keyed_hash({}, hello), 0x8cc15d5db2f752b9ULL);
    EXPECT_EQ(keyed_hash({}, Bytes(8, 0)), 0xe849e8bb6ffe2567ULL);
}

TEST(SipHash, UsableAtCompileTime) {
    constexpr std::array<std::uint8_t, 0> empty{};
    static_assert(siphash24(0x0706050403020100ULL, 0x0f0e0d0c0b0a0908ULL, empty) == 0x726fdb47dd0e0e31ULL);
}

TEST(HashKey, ParsesHexLittleEndianHalves) {
    const HashKey k = HashKey::from_hex("000102030405060708090a0b0c0d0e0f");
    EXPECT_EQ(k.k0, 0x0706050403020100ULL);
    EXPECT_EQ(k.k1, 0x0f0e0d0c0b0a0908ULL);
    EXPECT_THROW(HashKey::from_hex("0011"), Error);
    EXPECT_THROW(HashKey::from_hex(std::string(32, 'z')), Error);
}

TEST(HashKey, KeyChangesChecksum) {
    const Bytes item{1, 2, 3, 4, 5, 6, 7, 8};
    EXPECT_NE(keyed_hash({}, item), keyed_hash({1, 0}, item));
}

TEST(Hex, RoundTrip) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Bytes b = random_bytes(rng, i);
        EXPECT_EQ(from_hex(to_hex(b)), b);
    }
    EXPECT_EQ(to_hex(Bytes{0x00, 0xab, 0xff}), "00abff");
    EXPECT_EQ(from_hex("00ABff"), (Bytes{0x00, 0xab, 0xff}));
    EXPECT_THROW(from_hex("abc"), Error);
}

TEST(CodedSymbol, ZeroIsIdentity) {
    const CodedSymbol z = CodedSymbol::zero(8);
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(z.item_len(), 8u);
    EXPECT_FALSE(is_pure(z, {}));
}

TEST(CodedSymbol, AddThenRemoveRestoresZero) {
    const HashedItem h = HashedItem::make({}, Bytes{1, 2, 3, 4, 5, 6, 7, 8});
    CodedSymbol c = CodedSymbol::zero(8);
    c.apply(h, Direction::add);
    EXPECT_EQ(c.count, 1);
    EXPECT_EQ(c.sum, h.item);
    EXPECT_EQ(c.checksum, h.checksum);
    EXPECT_TRUE(is_pure(c, {}));
    c.apply(h, Direction::remove);
    EXPECT_TRUE(c.is_zero());
}

TEST(CodedSymbol, NegativeSingletonIsPure) {
    const HashedItem h = HashedItem::make({}, Bytes{9, 9, 9, 9});
    const CodedSymbol c = apply(CodedSymbol::zero(4), h, Direction::remove);
    EXPECT_EQ(c.count, -1);
    EXPECT_TRUE(is_pure(c, {}));
}

TEST(CodedSymbol, TwoItemsAreNotPure) {
    const HashedItem a = HashedItem::make({}, Bytes{1, 0, 0, 0});
    const HashedItem b = HashedItem::make({}, Bytes{2, 0, 0, 0});
    CodedSymbol c = CodedSymbol::zero(4);
    c.apply(a, Direction::add).apply(b, Direction::add);
    EXPECT_FALSE(is_pure(c, {}));
    // One added, one removed: count 0, still impure.
    CodedSymbol d = CodedSymbol::zero(4);
    d.apply(a, Direction::add).apply(b, Direction::remove);
    EXPECT_EQ(d.count, 0);
    EXPECT_FALSE(is_pure(d, {}));
    // Three items: count 3 rejected without hashing.
    c.apply(HashedItem::make({}, Bytes{3, 0, 0, 0}), Direction::add);
    EXPECT_FALSE(is_pure(c, {}));
}

TEST(CodedSymbol, PurityDependsOnKey) {
    const HashedItem h = HashedItem::make({5, 6}, Bytes{1, 2, 3, 4});
    const CodedSymbol c = apply(CodedSymbol::zero(4), h, Direction::add);
    EXPECT_TRUE(is_pure(c, {5, 6}));
    EXPECT_FALSE(is_pure(c, {}));
}

TEST(CodedSymbol, SubtractAndAddAreInverse) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        CodedSymbol a{random_bytes(rng, 16), rng(), static_cast<std::int64_t>(rng() % 1000) - 500};
        CodedSymbol b{random_bytes(rng, 16), rng(), static_cast<std::int64_t>(rng() % 1000) - 500};
        EXPECT_EQ(add(subtract(a, b), b), a);
        EXPECT_TRUE(subtract(a, a).is_zero());
    }
}

TEST(CodedSymbol, SubtractionMatchesSetDifference) {
    // cell(A) - cell(B) == cell(A \ B) with B's exclusive items removed.
    std::mt19937_64 rng(12);
    std::vector<HashedItem> shared, a_only, b_only;
    for (int i = 0; i < 10; ++i) shared.push_back(HashedItem::make({}, random_bytes(rng, 8)));
    for (int i = 0; i < 4; ++i) a_only.push_back(HashedItem::make({}, random_bytes(rng, 8)));
    for (int i = 0; i < 3; ++i) b_only.push_back(HashedItem::make({}, random_bytes(rng, 8)));
    CodedSymbol ca = CodedSymbol::zero(8), cb = CodedSymbol::zero(8), want = CodedSymbol::zero(8);
    for (const auto& h : shared) {
        ca.apply(h, Direction::add);
        cb.apply(h, Direction::add);
    }
    for (const auto& h : a_only) {
        ca.apply(h, Direction::add);
        want.apply(h, Direction::add);
    }
    for (const auto& h : b_only) {
        cb.apply(h, Direction::add);
        want.apply(h, Direction::remove);
    }
    EXPECT_EQ(subtract(ca, cb), want);
    EXPECT_EQ(want.count, 1);
}

TEST(CodedSymbol, LengthMismatchThrows) {
    CodedSymbol c = CodedSymbol::zero(8);
    EXPECT_THROW(c.apply(HashedItem::make({}, Bytes(4, 1)), Direction::add), LengthMismatch);
    EXPECT_THROW(c -= CodedSymbol::zero(7), LengthMismatch);
}

}  // namespace
}  // namespace riblt
