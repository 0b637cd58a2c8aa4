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

#include "common.hpp"
#include "riblt/encoder.hpp"

namespace riblt {
namespace {

using testing::minus;
using testing::naive_encode;
using testing::random_items;

TEST(Encoder, EmptySetEmitsZeros) {
    Encoder enc(8);
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(enc.emit_next().is_zero());
    EXPECT_EQ(enc.next_index(), 10u);
}

TEST(Encoder, CellZeroHoldsEveryItem) {
    std::mt19937_64 rng(1);
    const auto items = random_items(rng, 50, 8);
    Encoder enc(8);
    CodedSymbol want = CodedSymbol::zero(8);
    for (const auto& it : items) {
        enc.add(it);
        want.apply(HashedItem::make({}, it), Direction::add);
    }
    EXPECT_EQ(enc.size(), 50u);
    EXPECT_EQ(enc.emit_next(), want);
}

TEST(Encoder, MatchesNaiveEncoding) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {1, 2, 10, 300}) {
        const auto items = random_items(rng, n, 16);
        EXPECT_EQ(encode_prefix(items, 400, 16), naive_encode(items, 400, 16)) << "n=" << n;
    }
}

TEST(Encoder, MatchesNaiveEncodingIrregularAndKeyed) {
    std::mt19937_64 rng(3);
    const auto items = random_items(rng, 200, 8);
    const MappingProfile p = MappingProfile::default_irregular();
    const HashKey key{0x1234, 0x5678};
    EXPECT_EQ(encode_prefix(items, 300, 8, p, key), naive_encode(items, 300, 8, p, key));
    EXPECT_NE(encode_prefix(items, 300, 8, p, key), encode_prefix(items, 300, 8, p));
}

TEST(Encoder, ExpectedCountsFollowMappingProbability) {
    std::mt19937_64 rng(4);
    const auto items = random_items(rng, 20000, 8);
    const auto cells = encode_prefix(items, 64, 8);
    for (std::size_t i : {1u, 5u, 20u, 63u}) {
        const double want = 20000 * mapping_probability(i, 0.5);
        EXPECT_NEAR(cells[i].count, want, 5 * std::sqrt(want));
    }
}

// Cell-wise subtraction of two streams equals the stream of the difference,
// with B-only items entering negatively.
TEST(Encoder, Linearity) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const std::size_t len = t % 2 ? 32 : 8;
        const auto pool = random_items(rng, 120, len);
        std::vector<Bytes> a, b;
        for (const auto& x : pool) {
            const auto r = rng() % 3;
            if (r != 1) a.push_back(x);
            if (r != 0) b.push_back(x);
        }
        const std::size_t m = 1 + rng() % 256;
        const auto ea = encode_prefix(a, m, len);
        const auto eb = encode_prefix(b, m, len);
        auto want = naive_encode(minus(a, b), m, len);
        const auto neg = naive_encode(minus(b, a), m, len);
        for (std::size_t i = 0; i < m; ++i) {
            want[i] -= neg[i];
            ASSERT_EQ(subtract(ea[i], eb[i]), want[i]) << "trial " << t << " cell " << i;
        }
    }
}

TEST(Encoder, RejectsBadInput) {
    Encoder enc(8);
    EXPECT_THROW(enc.add(Bytes(7, 0)), LengthMismatch);
    enc.add(Bytes(8, 1));
    EXPECT_THROW(enc.add(Bytes(8, 1)), Error);
    EXPECT_THROW(enc.remove(Bytes(8, 2)), Error);
    EXPECT_THROW(Encoder(0), Error);
}

TEST(Encoder, StreamingFreezesSetAfterFirstEmit) {
    Encoder enc(8);
    enc.add(Bytes(8, 1));
    enc.emit_next();
    EXPECT_THROW(enc.add(Bytes(8, 2)), Error);
    EXPECT_THROW(enc.remove(Bytes(8, 1)), Error);
    EXPECT_THROW(enc.symbol(0), Error);
}

TEST(Encoder, RemoveBeforeEmitting) {
    std::mt19937_64 rng(6);
    const auto items = random_items(rng, 30, 8);
    Encoder enc(8);
    for (const auto& x : items) enc.add(x);
    for (std::size_t i = 0; i < 10; ++i) enc.remove(items[i]);
    EXPECT_EQ(enc.size(), 20u);
    EXPECT_FALSE(enc.contains(items[0]));
    EXPECT_TRUE(enc.contains(items[10]));
    const std::vector<Bytes> rest(items.begin() + 10, items.end());
    EXPECT_EQ(enc.emit_prefix(100), naive_encode(rest, 100, 8));
}

TEST(Encoder, RemoveThenReAdd) {
    std::mt19937_64 rng(7);
    const auto items = random_items(rng, 5, 8);
    Encoder enc(8);
    for (const auto& x : items) enc.add(x);
    enc.remove(items[2]);
    enc.add(items[2]);
    EXPECT_EQ(enc.emit_prefix(50), naive_encode(items, 50, 8));
}

TEST(CachedEncoder, UpdatesApplyToEmittedPrefix) {
    std::mt19937_64 rng(8);
    const auto items = random_items(rng, 40, 8);
    Encoder enc(8, MappingProfile::regular(), {}, EncoderMode::cached);
    for (std::size_t i = 0; i < 20; ++i) enc.add(items[i]);
    enc.emit_prefix(60);
    for (std::size_t i = 20; i < 40; ++i) enc.add(items[i]);
    for (std::size_t i = 0; i < 5; ++i) enc.remove(items[i]);
    const std::vector<Bytes> live(items.begin() + 5, items.end());
    const auto want = naive_encode(live, 120, 8);
    const auto prefix = enc.cached_prefix();
    ASSERT_EQ(prefix.size(), 60u);
    for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(prefix[i], want[i]) << i;
    // Continuing after the update stays consistent.
    for (std::size_t i = 60; i < 120; ++i) EXPECT_EQ(enc.emit_next(), want[i]) << i;
}

TEST(CachedEncoder, RandomAccessExtends) {
    std::mt19937_64 rng(9);
    const auto items = random_items(rng, 10, 8);
    Encoder enc(8, MappingProfile::regular(), {}, EncoderMode::cached);
    for (const auto& x : items) enc.add(x);
    const auto want = naive_encode(items, 80, 8);
    EXPECT_EQ(enc.symbol(79), want[79]);
    EXPECT_EQ(enc.cached_prefix().size(), 80u);
    EXPECT_EQ(enc.symbol(3), want[3]);
}

TEST(CachedEncoder, CopiesAreIndependentSnapshots) {
    std::mt19937_64 rng(10);
    const auto items = random_items(rng, 10, 8);
    Encoder enc(8, MappingProfile::regular(), {}, EncoderMode::cached);
    for (std::size_t i = 0; i < 9; ++i) enc.add(items[i]);
    enc.emit_prefix(10);
    Encoder snap = enc;
    enc.add(items[9]);
    const std::vector<Bytes> first9(items.begin(), items.begin() + 9);
    EXPECT_EQ(snap.symbol(5), naive_encode(first9, 10, 8)[5]);
    EXPECT_EQ(enc.symbol(5), naive_encode(items, 10, 8)[5]);
}

}  // namespace
}  // namespace riblt
