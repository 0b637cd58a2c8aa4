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

// TCP bindings for respond/request (POSIX sockets, IPv4).
//
// serve: accepts connections and runs one responder per connection on its own
// thread, each over a private copy of the encoder snapshot.
// sync:  connects, runs the requester, and closes the socket when done.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "riblt/session.hpp"

namespace riblt {

class SocketError : public SessionError {
public:
    explicit SocketError(const std::string& what)
        : SessionError(Kind::io, what + ": " + std::strerror(errno)) {}
};

/// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { reset(); }

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }

    void reset() noexcept {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

/// Parses "host:port"; host may be a dotted quad or a resolvable name.
inline Endpoint parse_endpoint(std::string_view addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string_view::npos) throw Error("address must be host:port");
    Endpoint ep;
    ep.host = std::string(addr.substr(0, colon));
    if (ep.host.empty()) ep.host = "0.0.0.0";
    const std::string port(addr.substr(colon + 1));
    char* end = nullptr;
    const long p = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p < 0 || p > 65535) throw Error("invalid port in " + std::string(addr));
    ep.port = static_cast<std::uint16_t>(p);
    return ep;
}

inline sockaddr_in resolve(const Endpoint& ep) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(ep.port);
    if (::inet_pton(AF_INET, ep.host.c_str(), &sa.sin_addr) == 1) return sa;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw SessionError(SessionError::Kind::io, "cannot resolve host " + ep.host);
    }
    sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return sa;
}

class SocketSink : public ByteSink {
public:
    explicit SocketSink(int fd) noexcept : fd_(fd) {}

    bool write(ByteView data) override {
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;  // EPIPE / ECONNRESET: the requester is done
            }
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

private:
    int fd_;
};

class SocketSource : public ByteSource {
public:
    explicit SocketSource(Socket& s) noexcept : sock_(s) {}

    std::size_t read(std::span<std::uint8_t> buf) override {
        if (!sock_.valid()) return 0;
        for (;;) {
            const ssize_t n = ::recv(sock_.fd(), buf.data(), buf.size(), 0);
            if (n >= 0) return static_cast<std::size_t>(n);
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) return 0;
            throw SocketError("recv failed");
        }
    }

    void close() override { sock_.reset(); }

private:
    Socket& sock_;
};

inline Socket connect_to(const Endpoint& ep) {
    const sockaddr_in sa = resolve(ep);
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw SocketError("socket failed");
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
        throw SocketError("connect to " + ep.host + ":" + std::to_string(ep.port) + " failed");
    }
    return s;
}

/// Connects to a responder and reconciles the local set against its stream.
inline Difference sync_tcp(std::string_view addr, Encoder local, RequestStats* stats = nullptr) {
    Socket s = connect_to(parse_endpoint(addr));
    SocketSource source(s);
    return request(std::move(local), source, stats);
}

/// Listening responder. Sessions run concurrently on their own threads.
class TcpServer {
public:
    explicit TcpServer(std::string_view listen_addr) {
        const sockaddr_in sa = resolve(parse_endpoint(listen_addr));
        listener_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
        if (!listener_.valid()) throw SocketError("socket failed");
        const int one = 1;
        ::setsockopt(listener_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(listener_.fd(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
            throw SocketError("bind failed");
        }
        if (::listen(listener_.fd(), 64) != 0) throw SocketError("listen failed");
        sockaddr_in bound{};
        socklen_t len = sizeof bound;
        ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
        port_ = ntohs(bound.sin_port);
    }

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;
    ~TcpServer() {
        stop();
        join();
    }

    std::uint16_t port() const noexcept { return port_; }

    /// Accepts until stop() or until `max_sessions` connections have been
    /// accepted (0 = unlimited), then waits for the running sessions.
    /// `snapshot` is only read; it must not be mutated while serving.
    void serve(const Encoder& snapshot, std::size_t max_sessions = 0) {
        std::size_t accepted = 0;
        while (!stopping_ && (max_sessions == 0 || accepted < max_sessions)) {
            pollfd pfd{listener_.fd(), POLLIN, 0};
            const int r = ::poll(&pfd, 1, 100);
            if (r < 0 && errno != EINTR) throw SocketError("poll failed");
            if (r <= 0) continue;
            Socket conn(::accept(listener_.fd(), nullptr, nullptr));
            if (!conn.valid()) {
                if (errno == EINTR || errno == ECONNABORTED) continue;
                throw SocketError("accept failed");
            }
            const int one = 1;
            ::setsockopt(conn.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            ++accepted;
            std::lock_guard lock(mu_);
            sessions_.emplace_back([this, c = std::move(conn), enc = snapshot]() mutable {
                SocketSink sink(c.fd());
                try {
                    RespondStats st = respond(std::move(enc), sink);
                    cells_served_ += st.cells_sent;
                } catch (const std::exception&) {
                    ++sessions_failed_;
                }
                ++sessions_done_;
            });
        }
        join();
    }

    void stop() noexcept { stopping_ = true; }

    std::size_t sessions_completed() const noexcept { return sessions_done_; }
    std::uint64_t cells_served() const noexcept { return cells_served_; }

private:
    void join() {
        std::vector<std::thread> running;
        {
            std::lock_guard lock(mu_);
            running.swap(sessions_);
        }
        for (auto& t : running) {
            if (t.joinable()) t.join();
        }
    }

    Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> sessions_done_{0};
    std::atomic<std::size_t> sessions_failed_{0};
    std::atomic<std::uint64_t> cells_served_{0};
    std::mutex mu_;
    std::vector<std::thread> sessions_;
};

}  // namespace riblt
