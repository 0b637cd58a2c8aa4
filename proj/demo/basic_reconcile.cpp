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

// Alice and Bob hold overlapping sets of 8-byte items. Alice streams coded
// symbols; Bob decodes until he knows the symmetric difference.

#include <cstdio>
#include <string>

#include "riblt/riblt.hpp"

int main() {
    using namespace riblt;

    auto item = [](std::uint64_t v) {
        Bytes b;
        put_le64(b, v);
        return b;
    };

    Encoder alice(8);
    Decoder bob(8);
    for (std::uint64_t v = 0; v < 1000; ++v) {
        if (v != 17 && v != 400) alice.add(item(v));  // Bob has 17 and 400
        if (v != 5) bob.add_local(item(v));           // Alice has 5
    }
    alice.add(item(123456789));

    while (!bob.decoded_complete()) bob.ingest(alice.emit_next());

    const Difference diff = bob.result();
    std::printf("decoded after %zu coded symbols\n", bob.cells_received());
    for (const Bytes& b : diff.remote_only) std::printf("  only Alice: %s\n", to_hex(b).c_str());
    for (const Bytes& b : diff.local_only) std::printf("  only Bob:   %s\n", to_hex(b).c_str());
    return 0;
}
