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

// Two-party synchronization.
//
// The responder writes a stream header and then coded symbols 0, 1, 2, ...
// without ever reading from the requester. The requester decodes as symbols
// arrive and tears the connection down once it has the full difference; the
// responder notices on its next failed write. Half a round trip, no in-band
// acknowledgement.

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "riblt/core.hpp"
#include "riblt/decoder.hpp"
#include "riblt/encoder.hpp"
#include "riblt/wire.hpp"

namespace riblt {

class ByteSink {
public:
    virtual ~ByteSink() = default;
    /// Writes all of `data`; false once the peer has gone away.
    virtual bool write(ByteView data) = 0;
};

class ByteSource {
public:
    virtual ~ByteSource() = default;
    /// Reads up to buf.size() bytes; 0 means end of stream.
    virtual std::size_t read(std::span<std::uint8_t> buf) = 0;
    /// Tells the peer to stop sending.
    virtual void close() {}
};

class SessionError : public Error {
public:
    enum class Kind { protocol, integrity, incomplete, io };

    SessionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Buffered reader over a ByteSource with the take/byte interface the wire
/// decoders expect. Running out of input is reported as WireError::truncated.
class SourceReader {
public:
    explicit SourceReader(ByteSource& src, std::size_t chunk = 1 << 16) : src_(src), chunk_(chunk) {}

    ByteView take(std::size_t n) {
        ensure(n);
        ByteView out(buf_.data() + pos_, n);
        pos_ += n;
        return out;
    }

    std::uint8_t byte() { return take(1)[0]; }

    std::uint64_t bytes_consumed() const noexcept { return consumed_before_ + pos_; }

private:
    void ensure(std::size_t n) {
        if (end_ - pos_ >= n) return;
        if (pos_ > 0) {
            std::memmove(buf_.data(), buf_.data() + pos_, end_ - pos_);
            consumed_before_ += pos_;
            end_ -= pos_;
            pos_ = 0;
        }
        if (buf_.size() < std::max(n, chunk_)) buf_.resize(std::max(n, chunk_));
        while (end_ < n) {
            const std::size_t got = src_.read(std::span(buf_.data() + end_, buf_.size() - end_));
            if (got == 0) throw WireError(WireError::Kind::truncated, "stream ended early");
            end_ += got;
        }
    }

    ByteSource& src_;
    std::size_t chunk_;
    Bytes buf_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    std::uint64_t consumed_before_ = 0;
};

struct RespondStats {
    std::uint64_t cells_sent = 0;
    std::uint64_t bytes_sent = 0;
};

/// Streams `snapshot`'s coded symbols into `sink` until the sink closes or
/// `max_cells` symbols have been written (0 means no limit). A cached encoder
/// replays its prefix before extending it; a streaming one must be unused.
/// Sink failure is the normal way a session ends and is not an error.
inline RespondStats respond(Encoder snapshot, ByteSink& sink, std::uint64_t max_cells = 0,
                            std::size_t flush_bytes = 1 << 14) {
    if (snapshot.mode() == EncoderMode::streaming && snapshot.next_index() != 0) {
        throw Error("respond needs an unused streaming encoder or a cached one");
    }
    RespondStats stats;
    StreamEncoder stream(snapshot.item_len(), snapshot.size(), snapshot.profile());
    Bytes buf;
    stream.header(buf);

    auto flush = [&]() {
        if (buf.empty()) return true;
        if (!sink.write(buf)) return false;
        stats.bytes_sent += buf.size();
        buf.clear();
        return true;
    };

    for (std::uint64_t i = 0; max_cells == 0 || i < max_cells; ++i) {
        if (snapshot.mode() == EncoderMode::cached) {
            stream.cell(snapshot.symbol(static_cast<std::size_t>(i)), buf);
        } else {
            stream.cell(snapshot.emit_next(), buf);
        }
        ++stats.cells_sent;
        // The first symbol goes out alone so a small difference decodes
        // without waiting for a full batch.
        if ((i == 0 || buf.size() >= flush_bytes) && !flush()) return stats;
    }
    flush();
    return stats;
}

struct RequestStats {
    std::uint64_t cells_received = 0;
    std::uint64_t bytes_received = 0;
};

/// Reads a stream from `source` and decodes it against the local set held by
/// `local` (an unused encoder carrying the session's item length, profile, and
/// key). Closes the source as soon as decoding completes.
inline Difference request(Encoder local, ByteSource& source, RequestStats* stats = nullptr) {
    const std::size_t item_len = local.item_len();
    const MappingProfile profile = local.profile();
    SourceReader in(source);

    StreamHeader header;
    try {
        header = decode_header(in);
    } catch (const WireError& e) {
        source.close();
        throw SessionError(e.kind() == WireError::Kind::truncated ? SessionError::Kind::incomplete
                                                                  : SessionError::Kind::protocol,
                           std::string("bad stream header: ") + e.what());
    }
    if (header.item_len != item_len) {
        source.close();
        throw SessionError(SessionError::Kind::protocol,
                           "remote item length " + std::to_string(header.item_len) +
                               " does not match local item length " + std::to_string(item_len));
    }
    if (header.irregular() != profile.irregular) {
        source.close();
        throw SessionError(SessionError::Kind::protocol, "remote mapping profile differs from local");
    }

    Decoder decoder(std::move(local));
    std::uint64_t i = 0;
    while (!decoder.decoded_complete()) {
        CodedSymbol cell;
        try {
            cell = decode_cell(in, i, header.set_size, item_len, profile);
        } catch (const WireError& e) {
            source.close();
            throw SessionError(e.kind() == WireError::Kind::truncated
                                   ? SessionError::Kind::incomplete
                                   : SessionError::Kind::protocol,
                               "stream ended before decoding completed after " +
                                   std::to_string(i) + " cells: " + e.what());
        }
        decoder.ingest(cell);
        ++i;
        if (decoder.integrity_failed()) {
            source.close();
            throw SessionError(SessionError::Kind::integrity,
                               "checksum collision detected while peeling");
        }
    }
    source.close();
    if (stats) {
        stats->cells_received = i;
        stats->bytes_received = in.bytes_consumed();
    }
    return decoder.result();
}

/// One-directional in-memory byte pipe with blocking reads and bounded
/// buffering. Either end can close it.
class Pipe {
public:
    explicit Pipe(std::size_t capacity = 1 << 16) : capacity_(capacity) {}

    bool write(ByteView data) {
        std::unique_lock lock(mu_);
        for (std::size_t off = 0; off < data.size();) {
            cv_.wait(lock, [&] { return reader_closed_ || buf_.size() < capacity_; });
            if (reader_closed_) return false;
            const std::size_t n = std::min(capacity_ - buf_.size(), data.size() - off);
            buf_.insert(buf_.end(), data.begin() + static_cast<std::ptrdiff_t>(off),
                        data.begin() + static_cast<std::ptrdiff_t>(off + n));
            written_ += n;
            off += n;
            cv_.notify_all();
        }
        return true;
    }

    std::size_t read(std::span<std::uint8_t> out) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !buf_.empty() || writer_closed_ || reader_closed_; });
        if (reader_closed_) return 0;
        const std::size_t n = std::min(out.size(), buf_.size());
        std::copy_n(buf_.begin(), n, out.begin());
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(n));
        read_ += n;
        cv_.notify_all();
        return n;
    }

    void close_writer() {
        std::lock_guard lock(mu_);
        writer_closed_ = true;
        cv_.notify_all();
    }

    void close_reader() {
        std::lock_guard lock(mu_);
        reader_closed_ = true;
        buf_.clear();
        cv_.notify_all();
    }

    std::uint64_t bytes_written() const {
        std::lock_guard lock(mu_);
        return written_;
    }

    std::uint64_t bytes_read() const {
        std::lock_guard lock(mu_);
        return read_;
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::uint8_t> buf_;
    std::size_t capacity_;
    std::uint64_t written_ = 0;
    std::uint64_t read_ = 0;
    bool writer_closed_ = false;
    bool reader_closed_ = false;
};

class PipeSink : public ByteSink {
public:
    explicit PipeSink(Pipe& p) : pipe_(p) {}
    bool write(ByteView data) override { return pipe_.write(data); }

private:
    Pipe& pipe_;
};

class PipeSource : public ByteSource {
public:
    explicit PipeSource(Pipe& p) : pipe_(p) {}
    std::size_t read(std::span<std::uint8_t> buf) override { return pipe_.read(buf); }
    void close() override { pipe_.close_reader(); }

private:
    Pipe& pipe_;
};

/// Full-duplex in-process connection. `downstream` carries responder to
/// requester; `upstream` is the reverse direction, kept so tests can assert
/// the responder never consumes anything from it.
struct LoopbackConnection {
    Pipe downstream;
    Pipe upstream;
};

struct LoopbackResult {
    Difference difference;
    RespondStats responder;
    RequestStats requester;
    std::uint64_t upstream_bytes_read_by_responder = 0;
};

/// Runs one respond/request session over a LoopbackConnection, responder on
/// a separate thread.
inline LoopbackResult loopback_sync(Encoder remote, Encoder local) {
    LoopbackConnection conn;
    LoopbackResult res;
    std::exception_ptr responder_error;

    std::thread responder([&] {
        PipeSink sink(conn.downstream);
        try {
            res.responder = respond(std::move(remote), sink);
        } catch (...) {
            responder_error = std::current_exception();
        }
        conn.downstream.close_writer();
    });

    PipeSource source(conn.downstream);
    try {
        res.difference = request(std::move(local), source, &res.requester);
    } catch (...) {
        source.close();
        responder.join();
        throw;
    }
    responder.join();
    if (responder_error) std::rethrow_exception(responder_error);
    res.upstream_bytes_read_by_responder = conn.upstream.bytes_read();
    return res;
}

}  // namespace riblt
