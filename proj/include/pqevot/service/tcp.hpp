// Copyright 2026 The pqevot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Request/response over TCP: one frame in, one frame out, repeated on a
// persistent connection. Thread per connection.

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "pqevot/service/wire.hpp"

namespace pqevot::service {

struct Address {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    static Address parse(std::string_view s) {
        auto colon = s.rfind(':');
        if (colon == std::string_view::npos) throw std::invalid_argument("address must be host:port: " + std::string(s));
        Address a;
        a.host = std::string(s.substr(0, colon));
        if (a.host.empty()) a.host = "0.0.0.0";
        auto port = std::stoul(std::string(s.substr(colon + 1)));
        if (port > 65535) throw std::invalid_argument("port out of range: " + std::string(s));
        a.port = static_cast<std::uint16_t>(port);
        return a;
    }

    std::string to_string() const { return host + ":" + std::to_string(port); }
};

namespace detail {

inline bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        auto r = ::recv(fd, buf + got, n - got, 0);
        if (r == 0) return false;
        if (r < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

inline bool write_all(int fd, const std::uint8_t* buf, std::size_t n) {
    std::size_t done = 0;
    while (done < n) {
        auto r = ::send(fd, buf + done, n - done, MSG_NOSIGNAL);
        if (r < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<std::size_t>(r);
    }
    return true;
}

/// Read one raw frame. nullopt on EOF or I/O error; throws WireError on an oversize length.
inline std::optional<Bytes> read_frame(int fd) {
    std::uint8_t head[6];
    if (!read_exact(fd, head, 6)) return std::nullopt;
    std::uint32_t len = (std::uint32_t(head[2]) << 24) | (std::uint32_t(head[3]) << 16) |
                        (std::uint32_t(head[4]) << 8) | std::uint32_t(head[5]);
    if (len > kMaxBody) throw WireError("frame body exceeds limit");
    Bytes frame(6 + std::size_t(len));
    std::memcpy(frame.data(), head, 6);
    if (len && !read_exact(fd, frame.data() + 6, len)) return std::nullopt;
    return frame;
}

inline addrinfo* resolve(const Address& a, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    auto port = std::to_string(a.port);
    if (int rc = ::getaddrinfo(a.host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw WireError("cannot resolve " + a.to_string() + ": " + ::gai_strerror(rc));
    return res;
}

}  // namespace detail

using Handler = std::function<WireEnvelope(const WireEnvelope&)>;

class TcpServer {
public:
    TcpServer(const Address& bind, Handler handler) : handler_(std::move(handler)) {
        auto* res = detail::resolve(bind, true);
        listen_fd_ = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, 0);
        if (listen_fd_ < 0) {
            ::freeaddrinfo(res);
            throw WireError("socket failed");
        }
        int one = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(listen_fd_, res->ai_addr, res->ai_addrlen) != 0) {
            auto err = std::string(std::strerror(errno));
            ::freeaddrinfo(res);
            ::close(listen_fd_);
            throw WireError("bind " + bind.to_string() + " failed: " + err);
        }
        ::freeaddrinfo(res);
        if (::listen(listen_fd_, 64) != 0) {
            ::close(listen_fd_);
            throw WireError("listen failed");
        }
        sockaddr_in addr{};
        socklen_t len = sizeof addr;
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    ~TcpServer() { stop(); }

    std::uint16_t port() const { return port_; }

    void stop() {
        if (stopped_.exchange(true)) return;
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        if (accept_thread_.joinable()) accept_thread_.join();
        std::list<Connection> conns;
        {
            std::lock_guard lock(mu_);
            for (auto& c : conns_) ::shutdown(c.fd, SHUT_RDWR);
            conns.splice(conns.end(), conns_);
        }
        for (auto& c : conns) {
            if (c.thread.joinable()) c.thread.join();
            ::close(c.fd);
        }
    }

private:
    struct Connection {
        int fd;
        std::thread thread;
    };

    void accept_loop() {
        while (!stopped_) {
            int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
            if (fd < 0) {
                if (errno == EINTR) continue;
                return;
            }
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            std::lock_guard lock(mu_);
            if (stopped_) {
                ::close(fd);
                return;
            }
            conns_.push_back({fd, {}});
            auto& c = conns_.back();
            c.thread = std::thread([this, fd] { serve(fd); });
        }
    }

    void serve(int fd) {
        for (;;) {
            std::optional<Bytes> frame;
            try {
                frame = detail::read_frame(fd);
            } catch (const WireError& e) {
                auto out = error_frame(ErrorDomain::kWire, 0, e.what()).encode();
                detail::write_all(fd, out.data(), out.size());
                return;
            }
            if (!frame) return;
            WireEnvelope reply;
            try {
                reply = handler_(WireEnvelope::decode(*frame));
            } catch (const WireError& e) {
                reply = error_frame(ErrorDomain::kWire, 0, e.what());
            } catch (const DecodeError& e) {
                reply = error_frame(ErrorDomain::kWire, 1, std::string("malformed body: ") + e.what());
            } catch (const std::exception& e) {
                reply = error_frame(ErrorDomain::kInternal, 0, e.what());
            }
            auto out = reply.encode();
            if (!detail::write_all(fd, out.data(), out.size())) return;
        }
    }

    Handler handler_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopped_{false};
    std::thread accept_thread_;
    std::mutex mu_;
    std::list<Connection> conns_;
};

/// One persistent connection, reopened on demand. Calls are serialized.
class TcpClient {
public:
    explicit TcpClient(Address to) : to_(std::move(to)) {}
    TcpClient(const TcpClient&) = delete;
    TcpClient& operator=(const TcpClient&) = delete;
    ~TcpClient() { close(); }

    const Address& address() const { return to_; }

    WireEnvelope call(const WireEnvelope& req) { return WireEnvelope::decode(call_raw(req.encode())); }

    /// Send arbitrary bytes as one frame and return the raw reply frame.
    Bytes call_raw(ByteView frame) {
        std::lock_guard lock(mu_);
        if (fd_ < 0) connect();
        if (!detail::write_all(fd_, frame.data(), frame.size())) {
            close();
            throw WireError("send to " + to_.to_string() + " failed");
        }
        auto reply = detail::read_frame(fd_);
        if (!reply) {
            close();
            throw WireError("no reply from " + to_.to_string());
        }
        return std::move(*reply);
    }

private:
    void connect() {
        auto* res = detail::resolve(to_, false);
        fd_ = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, 0);
        if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
            auto err = std::string(std::strerror(errno));
            ::freeaddrinfo(res);
            close();
            throw WireError("connect " + to_.to_string() + " failed: " + err);
        }
        ::freeaddrinfo(res);
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }

    void close() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

    Address to_;
    std::mutex mu_;
    int fd_ = -1;
};

}  // namespace pqevot::service
