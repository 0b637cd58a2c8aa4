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

// Set files: a VLQ item length followed by the items back to back, or one
// hex-encoded item per line.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/wire.hpp"

namespace riblt {

class IoError : public Error {
public:
    using Error::Error;
};

struct ItemSet {
    std::size_t item_len = 0;
    std::vector<Bytes> items;
};

inline Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return data;
}

inline void write_file(const std::string& path, ByteView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path);
}

inline Bytes encode_set_binary(const ItemSet& set) {
    Bytes out;
    put_vlq(out, set.item_len);
    for (const Bytes& item : set.items) {
        require_length(set.item_len, item.size());
        out.insert(out.end(), item.begin(), item.end());
    }
    return out;
}

inline ItemSet decode_set_binary(ByteView data) {
    ByteReader in(data);
    ItemSet set;
    try {
        set.item_len = static_cast<std::size_t>(read_vlq(in));
    } catch (const WireError& e) {
        throw IoError(std::string("set file header: ") + e.what());
    }
    if (set.item_len == 0) throw IoError("set file declares item length 0");
    if (in.remaining() % set.item_len != 0) {
        throw IoError("set file body is not a whole number of items");
    }
    while (!in.empty()) {
        ByteView item = in.take(set.item_len);
        set.items.emplace_back(item.begin(), item.end());
    }
    return set;
}

inline std::string encode_set_hex(const ItemSet& set) {
    std::string out;
    for (const Bytes& item : set.items) {
        require_length(set.item_len, item.size());
        out += to_hex(item);
        out += '\n';
    }
    return out;
}

/// Blank lines are skipped. An empty file needs `item_len` to be known.
inline ItemSet decode_set_hex(std::string_view text, std::optional<std::size_t> item_len = {}) {
    ItemSet set;
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        Bytes item;
        try {
            item = from_hex(line);
        } catch (const Error& e) {
            throw IoError(std::string("bad hex item: ") + e.what());
        }
        if (set.items.empty() && !item_len) item_len = item.size();
        if (item.size() != *item_len || item.empty()) throw IoError("hex items differ in length");
        set.items.push_back(std::move(item));
    }
    if (!item_len || *item_len == 0) throw IoError("empty hex set file has no item length");
    set.item_len = *item_len;
    return set;
}

inline ItemSet read_set_file(const std::string& path, bool hex) {
    const Bytes data = read_file(path);
    if (!hex) return decode_set_binary(data);
    return decode_set_hex(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

inline void write_set_file(const std::string& path, const ItemSet& set, bool hex) {
    if (!hex) {
        write_file(path, encode_set_binary(set));
        return;
    }
    const std::string text = encode_set_hex(set);
    write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace riblt
