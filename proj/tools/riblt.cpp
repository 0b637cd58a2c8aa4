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

// riblt: command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 protocol or integrity failure.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "riblt/riblt.hpp"
#include "riblt/tcp.hpp"

namespace {

using namespace riblt;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitProtocol = 3;

class UsageError : public Error {
public:
    using Error::Error;
};

struct ProfileOpts {
    std::string profile = "regular";
    double alpha = 0.5;
    std::string key_hex;

    void attach(CLI::App* app) {
        app->add_option("--profile", profile, "Mapping profile")
            ->check(CLI::IsMember({"regular", "irregular"}));
        app->add_option("--alpha", alpha, "Alpha of the regular profile")->check(CLI::PositiveNumber);
        app->add_option("--key", key_hex, "Checksum key, 32 hex digits (default all zero)");
    }

    MappingProfile mapping() const {
        if (profile == "irregular") return MappingProfile::default_irregular();
        return MappingProfile::regular(alpha);
    }

    HashKey key() const {
        if (key_hex.empty()) return {};
        try {
            return HashKey::from_hex(key_hex);
        } catch (const Error& e) {
            throw UsageError(std::string("--key: ") + e.what());
        }
    }
};

Encoder load_encoder(const std::string& path, bool hex, const ProfileOpts& p,
                     EncoderMode mode = EncoderMode::streaming) {
    const ItemSet set = read_set_file(path, hex);
    Encoder enc(set.item_len, p.mapping(), p.key(), mode);
    for (const Bytes& item : set.items) {
        if (enc.contains(item)) throw IoError(path + ": duplicate item " + to_hex(item));
        enc.add(item);
    }
    return enc;
}

void print_difference(const Difference& diff, std::ostream& os) {
    std::vector<std::string> lines;
    for (const Bytes& b : diff.remote_only) lines.push_back("+" + to_hex(b));
    for (const Bytes& b : diff.local_only) lines.push_back("-" + to_hex(b));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) os << l << '\n';
}

void emit_difference(const Difference& diff, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        print_difference(diff, std::cout);
        return;
    }
    std::ostringstream ss;
    print_difference(diff, ss);
    const std::string s = ss.str();
    write_file(out_path, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

template <class Row>
void emit_csv(const std::vector<Row>& rows, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        sim::write_csv(std::cout, std::span<const Row>(rows));
        return;
    }
    std::ofstream os(out_path, std::ios::trunc);
    if (!os) throw IoError("cannot create " + out_path);
    sim::write_csv(os, std::span<const Row>(rows));
}

// generate: two sets with a known difference, for demos and tests.
struct GenerateCmd {
    std::uint64_t size = 1000;
    std::uint64_t diff = 10;
    std::size_t item_len = 8;
    std::uint64_t seed = 1;
    std::string out_a, out_b;
    bool hex = false;

    int run() const {
        const std::uint64_t a_only = (diff + 1) / 2;
        const std::uint64_t b_only = diff / 2;
        if (a_only > size) throw UsageError("--diff may be at most twice --size");
        const std::uint64_t shared = size - a_only;
        std::mt19937_64 rng(seed);
        std::unordered_set<std::string> seen;
        auto fresh = [&] {
            for (;;) {
                Bytes b(item_len);
                for (auto& x : b) x = static_cast<std::uint8_t>(rng());
                if (seen.emplace(b.begin(), b.end()).second) return b;
            }
        };
        ItemSet a{item_len, {}}, b{item_len, {}};
        for (std::uint64_t i = 0; i < shared; ++i) {
            Bytes x = fresh();
            a.items.push_back(x);
            b.items.push_back(std::move(x));
        }
        for (std::uint64_t i = 0; i < a_only; ++i) a.items.push_back(fresh());
        for (std::uint64_t i = 0; i < b_only; ++i) b.items.push_back(fresh());
        std::shuffle(a.items.begin(), a.items.end(), rng);
        std::shuffle(b.items.begin(), b.items.end(), rng);
        write_set_file(out_a, a, hex);
        write_set_file(out_b, b, hex);
        return kExitOk;
    }
};

struct SketchCmd {
    std::string set_path, out_path;
    std::size_t cells = 0;
    bool hex = false;
    ProfileOpts p;

    int run() const {
        Encoder enc = load_encoder(set_path, hex, p);
        StreamEncoder stream(enc.item_len(), enc.size(), enc.profile());
        Bytes out;
        stream.header(out);
        for (std::size_t i = 0; i < cells; ++i) stream.cell(enc.emit_next(), out);
        write_file(out_path, out);
        return kExitOk;
    }
};

struct ReconcileCmd {
    std::string local_path, sketch_path, out_path;
    bool hex = false;
    ProfileOpts p;

    int run() const {
        Encoder local = load_encoder(local_path, hex, p);
        const Bytes data = read_file(sketch_path);
        ByteReader in(data);
        const StreamHeader h = decode_header(in);
        if (h.item_len != local.item_len()) {
            throw SessionError(SessionError::Kind::protocol, "sketch item length differs from local set");
        }
        if (h.irregular() != local.profile().irregular) {
            throw SessionError(SessionError::Kind::protocol, "sketch mapping profile differs from local");
        }
        Decoder dec(std::move(local));
        for (std::uint64_t i = 0; !in.empty() && !dec.decoded_complete(); ++i) {
            dec.ingest(decode_cell(in, i, h.set_size, h.item_len, dec.profile()));
            if (dec.integrity_failed()) {
                throw SessionError(SessionError::Kind::integrity, "checksum collision detected while peeling");
            }
        }
        if (!dec.decoded_complete()) {
            throw SessionError(SessionError::Kind::incomplete,
                               "sketch too short: " + std::to_string(dec.cells_received()) +
                                   " cells decoded " + std::to_string(dec.recovered_count()) +
                                   " items without completing");
        }
        emit_difference(dec.result(), out_path);
        std::cerr << "decoded with " << dec.cells_received() << " cells\n";
        return kExitOk;
    }
};

struct ServeCmd {
    std::string listen, set_path, port_file;
    std::size_t max_sessions = 0;
    bool hex = false;
    ProfileOpts p;

    int run() const {
        const Encoder snapshot = load_encoder(set_path, hex, p);
        TcpServer server(listen);
        if (!port_file.empty()) {
            const std::string s = std::to_string(server.port()) + "\n";
            write_file(port_file, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        }
        std::cerr << "serving " << snapshot.size() << " items on port " << server.port() << "\n";
        server.serve(snapshot, max_sessions);
        std::cerr << "served " << server.sessions_completed() << " sessions, "
                  << server.cells_served() << " cells\n";
        return kExitOk;
    }
};

struct SyncCmd {
    std::string connect, set_path, out_path;
    bool hex = false;
    ProfileOpts p;

    int run() const {
        Encoder local = load_encoder(set_path, hex, p);
        RequestStats stats;
        const Difference diff = sync_tcp(connect, std::move(local), &stats);
        emit_difference(diff, out_path);
        std::cerr << "synced: " << diff.remote_only.size() << " remote-only, " << diff.local_only.size()
                  << " local-only, " << stats.cells_received << " cells, " << stats.bytes_received
                  << " bytes\n";
        return kExitOk;
    }
};

struct SimulateCmd {
    std::string mode = "overhead";
    std::vector<std::uint64_t> d_values;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::size_t m = 0, k = 4, prefix = 0;
    double step = 0.01, max_ratio = 2.0;
    std::string out_path;
    ProfileOpts p;

    int run() const {
        if (trials == 0) throw UsageError("--trials must be at least 1");
        if (mode == "overhead") {
            emit_csv(sim::run_overhead(p.mapping(), d_values, trials, seed, threads), out_path);
        } else if (mode == "irregular") {
            emit_csv(sim::run_irregular(d_values, trials, seed, threads), out_path);
        } else if (mode == "progress") {
            if (d_values.size() != 1) throw UsageError("progress mode takes exactly one --d");
            emit_csv(sim::run_progress(p.mapping(), d_values[0], trials, seed, step, max_ratio, threads),
                     out_path);
        } else {
            if (m == 0) throw UsageError("baseline mode needs --m");
            if (k == 0 || k > m) throw UsageError("--k must be in [1, m]");
            if (prefix > m) throw UsageError("--prefix must not exceed --m");
            emit_csv(sim::run_baseline(m, k, d_values, trials, seed, prefix, threads), out_path);
        }
        return kExitOk;
    }
};

struct AnalyzeCmd {
    std::vector<double> alphas;
    std::vector<double> etas;
    bool fixed_point = false;
    std::string out_path;

    int run() const {
        std::ostringstream os;
        if (fixed_point) {
            if (alphas.size() != 1) throw UsageError("--fixed-point takes exactly one --alpha");
            if (etas.empty()) throw UsageError("--fixed-point needs --eta");
            os << "eta,recovered_fraction\n";
            for (const auto& pt : analysis::de_fixed_point_curve(alphas[0], etas)) {
                os << sim::fmt_double(pt.eta) << ',' << sim::fmt_double(pt.recovered_fraction) << '\n';
            }
        } else {
            os << "alpha,eta_star\n";
            for (double a : alphas) {
                os << sim::fmt_double(a) << ',' << sim::fmt_double(analysis::solve_eta_star(a)) << '\n';
            }
        }
        const std::string s = os.str();
        if (out_path.empty() || out_path == "-") {
            std::cout << s;
        } else {
            write_file(out_path, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        }
        return kExitOk;
    }
};

int exit_code_for(const SessionError& e) {
    return e.kind() == SessionError::Kind::io ? kExitIo : kExitProtocol;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rateless IBLT set reconciliation"};
    app.require_subcommand(1);

    GenerateCmd gen;
    auto* g = app.add_subcommand("generate", "Write two random sets with a known difference");
    g->add_option("--size", gen.size, "Items in the first set")->capture_default_str();
    g->add_option("--diff", gen.diff, "Size of the symmetric difference")->capture_default_str();
    g->add_option("--item-len", gen.item_len, "Item length in bytes")->check(CLI::Range(1, 1 << 20));
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    g->add_option("--out-a", gen.out_a, "First set file")->required();
    g->add_option("--out-b", gen.out_b, "Second set file")->required();
    g->add_flag("--hex", gen.hex, "Write newline-delimited hex");

    SketchCmd sk;
    auto* s = app.add_subcommand("sketch", "Encode a prefix of a set's coded-symbol stream");
    s->add_option("--set", sk.set_path, "Set file")->required();
    s->add_option("--cells", sk.cells, "Number of coded symbols")->required();
    s->add_option("--out", sk.out_path, "Output stream file")->required();
    s->add_flag("--hex", sk.hex, "Set file is newline-delimited hex");
    sk.p.attach(s);

    ReconcileCmd rc;
    auto* r = app.add_subcommand("reconcile", "Decode a sketch file against a local set");
    r->add_option("--local", rc.local_path, "Local set file")->required();
    r->add_option("--remote-sketch", rc.sketch_path, "Remote stream file")->required();
    r->add_option("--out-diff", rc.out_path, "Write the difference here instead of stdout");
    r->add_flag("--hex", rc.hex, "Set file is newline-delimited hex");
    rc.p.attach(r);

    ServeCmd sv;
    auto* v = app.add_subcommand("serve", "Stream a set's coded symbols to TCP requesters");
    v->add_option("--listen", sv.listen, "host:port (port 0 picks one)")->required();
    v->add_option("--set", sv.set_path, "Set file")->required();
    v->add_option("--max-sessions", sv.max_sessions, "Exit after this many sessions (0 = never)");
    v->add_option("--port-file", sv.port_file, "Write the bound port here");
    v->add_flag("--hex", sv.hex, "Set file is newline-delimited hex");
    sv.p.attach(v);

    SyncCmd sy;
    auto* y = app.add_subcommand("sync", "Reconcile a local set against a TCP responder");
    y->add_option("--connect", sy.connect, "host:port")->required();
    y->add_option("--set", sy.set_path, "Local set file")->required();
    y->add_option("--out-diff", sy.out_path, "Write the difference here instead of stdout");
    y->add_flag("--hex", sy.hex, "Set file is newline-delimited hex");
    sy.p.attach(y);

    SimulateCmd sm;
    auto* m = app.add_subcommand("simulate", "Monte Carlo experiments, CSV to stdout");
    m->add_option("--mode", sm.mode, "Experiment")
        ->check(CLI::IsMember({"overhead", "progress", "irregular", "baseline"}))
        ->capture_default_str();
    m->add_option("--d", sm.d_values, "Difference sizes")->required()->delimiter(',');
    m->add_option("--trials", sm.trials, "Trials per point")->capture_default_str();
    m->add_option("--seed", sm.seed, "Random seed")->capture_default_str();
    m->add_option("--threads", sm.threads, "Worker threads (0 = all cores)");
    m->add_option("--m", sm.m, "Baseline table size");
    m->add_option("--k", sm.k, "Baseline cells per item")->capture_default_str();
    m->add_option("--prefix", sm.prefix, "Baseline: decode only the first cells (0 = all)");
    m->add_option("--step", sm.step, "Progress: cells/d grid step")->check(CLI::PositiveNumber);
    m->add_option("--max-ratio", sm.max_ratio, "Progress: largest cells/d")->check(CLI::PositiveNumber);
    m->add_option("--out", sm.out_path, "Write CSV here instead of stdout");
    sm.p.attach(m);

    AnalyzeCmd an;
    auto* a = app.add_subcommand("analyze", "Density-evolution thresholds and fixed points");
    a->add_option("--alpha", an.alphas, "Alpha values")->required()->delimiter(',')
        ->check(CLI::Range(0.05, 1.0));
    a->add_flag("--fixed-point", an.fixed_point, "Recovered fraction at each --eta");
    a->add_option("--eta", an.etas, "Overheads for --fixed-point")->delimiter(',')
        ->check(CLI::PositiveNumber);
    a->add_option("--out", an.out_path, "Write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc_parse = app.exit(e);
        return rc_parse == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*g) return gen.run();
        if (*s) return sk.run();
        if (*r) return rc.run();
        if (*v) return sv.run();
        if (*y) return sy.run();
        if (*m) return sm.run();
        if (*a) return an.run();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const SessionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const WireError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitProtocol;
    } catch (const IntegrityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitProtocol;
    } catch (const InvalidProfile& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
