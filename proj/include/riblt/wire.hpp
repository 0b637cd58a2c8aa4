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

// Byte-exact stream format.
//
//   header := magic "RIBLT1" (6 bytes) | version (1 byte, = 1)
//             | flags (1 byte, bit 0 = irregular profile)
//             | item_len (VLQ) | set_size (VLQ)
//   cell i := sum (item_len raw bytes) | checksum (8 bytes, little-endian)
//             | zigzag-VLQ(count - expected_count(i))
//
// VLQ stores 7 bits per byte, least-significant group first, with the high
// bit set on every byte but the last (at most 10 bytes for 64-bit values).
// expected_count(i) is round-half-even(set_size * p(i)), where p(i) is the
// profile's mapping probability, so counts near their expectation cost one
// byte. Cells carry no index; the receiver tracks it, which requires an
// order-preserving transport.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/mapping.hpp"

namespace riblt {

class WireError : public Error {
public:
    enum class Kind { truncated, malformed, bad_magic, unsupported_version };

    WireError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::array<std::uint8_t, 6> kStreamMagic = {'R', 'I', 'B', 'L', 'T', '1'};
inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::uint8_t kFlagIrregular = 0x01;
inline constexpr std::size_t kMaxVlqBytes = 10;
inline constexpr std::size_t kChecksumBytes = 8;

constexpr std::uint64_t zigzag_encode(std::int64_t v) noexcept {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

constexpr std::int64_t zigzag_decode(std::uint64_t u) noexcept {
    return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

constexpr std::size_t vlq_size(std::uint64_t v) noexcept {
    std::size_t n = 1;
    while (v >= 0x80) {
        v >>= 7;
        ++n;
    }
    return n;
}

inline void put_vlq(Bytes& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_le64(Bytes& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

/// Cursor over an in-memory buffer; every read checks bounds.
class ByteReader {
public:
    explicit ByteReader(ByteView data) noexcept : data_(data) {}

    ByteView take(std::size_t n) {
        if (remaining() < n) {
            throw WireError(WireError::Kind::truncated,
                            "truncated input: need " + std::to_string(n) + " bytes, have " +
                                std::to_string(remaining()));
        }
        ByteView out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint8_t byte() { return take(1)[0]; }

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool empty() const noexcept { return remaining() == 0; }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

// Decoding below is written against any reader exposing take(n) -> ByteView
// and byte(), so the same code parses in-memory buffers and live sockets.

template <class Reader>
std::uint64_t read_le64(Reader& in) {
    return detail::load_le64(in.take(8).data());
}

template <class Reader>
std::uint64_t read_vlq(Reader& in) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < kMaxVlqBytes; ++i) {
        const std::uint8_t b = in.byte();
        if (i == kMaxVlqBytes - 1 && b > 1) {
            throw WireError(WireError::Kind::malformed, "VLQ overflows 64 bits");
        }
        v |= static_cast<std::uint64_t>(b & 0x7f) << (7 * i);
        if ((b & 0x80) == 0) return v;
    }
    throw WireError(WireError::Kind::malformed, "VLQ longer than 10 bytes");
}

struct StreamHeader {
    std::uint8_t version = kStreamVersion;
    std::uint8_t flags = 0;
    std::uint64_t item_len = 0;
    std::uint64_t set_size = 0;

    bool irregular() const noexcept { return (flags & kFlagIrregular) != 0; }

    friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

inline StreamHeader make_header(std::size_t item_len, std::uint64_t set_size,
                                const MappingProfile& profile) {
    return {kStreamVersion, static_cast<std::uint8_t>(profile.irregular ? kFlagIrregular : 0),
            item_len, set_size};
}

inline void encode_header(const StreamHeader& h, Bytes& out) {
    out.insert(out.end(), kStreamMagic.begin(), kStreamMagic.end());
    out.push_back(h.version);
    out.push_back(h.flags);
    put_vlq(out, h.item_len);
    put_vlq(out, h.set_size);
}

template <class Reader>
StreamHeader decode_header(Reader& in) {
    ByteView magic = in.take(kStreamMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kStreamMagic.begin())) {
        throw WireError(WireError::Kind::bad_magic, "not a coded-symbol stream (bad magic)");
    }
    StreamHeader h;
    h.version = in.byte();
    if (h.version != kStreamVersion) {
        throw WireError(WireError::Kind::unsupported_version,
                        "unsupported stream version " + std::to_string(h.version));
    }
    h.flags = in.byte();
    h.item_len = read_vlq(in);
    h.set_size = read_vlq(in);
    if (h.item_len == 0) throw WireError(WireError::Kind::malformed, "item length 0 in header");
    return h;
}

/// round-half-even(set_size * p(index)); identical on both ends by construction.
inline std::int64_t expected_count(const MappingProfile& profile, std::uint64_t set_size,
                                   std::uint64_t index) {
    return static_cast<std::int64_t>(
        std::nearbyint(static_cast<double>(set_size) * profile.probability(index)));
}

inline void encode_cell(const CodedSymbol& cell, std::uint64_t index, std::uint64_t set_size,
                        const MappingProfile& profile, Bytes& out) {
    out.insert(out.end(), cell.sum.begin(), cell.sum.end());
    put_le64(out, cell.checksum);
    put_vlq(out, zigzag_encode(cell.count - expected_count(profile, set_size, index)));
}

inline Bytes encode_cell(const CodedSymbol& cell, std::uint64_t index, std::uint64_t set_size,
                         const MappingProfile& profile) {
    Bytes out;
    encode_cell(cell, index, set_size, profile, out);
    return out;
}

template <class Reader>
CodedSymbol decode_cell(Reader& in, std::uint64_t index, std::uint64_t set_size,
                        std::size_t item_len, const MappingProfile& profile) {
    CodedSymbol cell;
    ByteView sum = in.take(item_len);
    cell.sum.assign(sum.begin(), sum.end());
    cell.checksum = read_le64(in);
    cell.count = zigzag_decode(read_vlq(in)) + expected_count(profile, set_size, index);
    return cell;
}

/// Writes a header and then cells in index order.
class StreamEncoder {
public:
    StreamEncoder(std::size_t item_len, std::uint64_t set_size, MappingProfile profile)
        : header_(make_header(item_len, set_size, profile)), profile_(std::move(profile)) {}

    void header(Bytes& out) const { encode_header(header_, out); }

    void cell(const CodedSymbol& c, Bytes& out) {
        require_length(header_.item_len, c.item_len());
        encode_cell(c, next_, header_.set_size, profile_, out);
        ++next_;
    }

    std::uint64_t cells_written() const noexcept { return next_; }
    const StreamHeader& stream_header() const noexcept { return header_; }

private:
    StreamHeader header_;
    MappingProfile profile_;
    std::uint64_t next_ = 0;
};

/// Parses a complete in-memory stream (header plus whole cells).
struct ParsedStream {
    StreamHeader header;
    std::vector<CodedSymbol> cells;
};

inline ParsedStream parse_stream(ByteView bytes, const MappingProfile& profile) {
    ByteReader in(bytes);
    ParsedStream out;
    out.header = decode_header(in);
    for (std::uint64_t i = 0; !in.empty(); ++i) {
        out.cells.push_back(decode_cell(in, i, out.header.set_size,
                                        static_cast<std::size_t>(out.header.item_len), profile));
    }
    return out;
}

inline Bytes serialize_stream(const StreamHeader& header, std::span<const CodedSymbol> cells,
                              const MappingProfile& profile) {
    Bytes out;
    encode_header(header, out);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        require_length(header.item_len, cells[i].item_len());
        encode_cell(cells[i], i, header.set_size, profile, out);
    }
    return out;
}

}  // namespace riblt
