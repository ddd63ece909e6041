#pragma once

// The Channel contract over a TCP stream. Frame boundaries come from the
// length prefix; an EOF between frames is a clean peer-close, an EOF inside
// a frame surfaces as a TransportError with the partial-frame flag set.

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>

#include <chrono>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "otkex/channel.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"

namespace otkex {

namespace detail {

struct HostPort {
    std::string host;
    std::string port;
};

inline HostPort split_host_port(const std::string& address) {
    const std::size_t colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size())
        throw TransportError("address must be host:port, got '" + address + "'");
    return {address.substr(0, colon), address.substr(colon + 1)};
}

struct AddrInfoDeleter {
    void operator()(addrinfo* p) const { freeaddrinfo(p); }
};

inline std::unique_ptr<addrinfo, AddrInfoDeleter> resolve(const std::string& address,
                                                          bool passive) {
    HostPort hp = split_host_port(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    int rc = getaddrinfo(hp.host.empty() ? nullptr : hp.host.c_str(), hp.port.c_str(), &hints,
                         &res);
    if (rc != 0) throw TransportError("resolve '" + address + "': " + gai_strerror(rc));
    return std::unique_ptr<addrinfo, AddrInfoDeleter>(res);
}

}  // namespace detail

class SocketChannel final : public Channel {
  public:
    explicit SocketChannel(int fd) : fd_(fd) {
        int one = 1;
        setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }

    ~SocketChannel() override { close(); }

    SocketChannel(const SocketChannel&) = delete;
    SocketChannel& operator=(const SocketChannel&) = delete;

    void send(const Frame& frame) override {
        Bytes wire = encode_frame(frame);
        std::size_t off = 0;
        while (off < wire.size()) {
            ssize_t n = ::send(fd_, wire.data() + off, wire.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw TransportError(std::string("send: ") + std::strerror(errno));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    std::optional<Frame> receive() override {
        for (;;) {
            std::size_t offset = 0;
            if (auto f = try_decode_frame(buf_, offset)) {
                buf_.erase(buf_.begin(), buf_.begin() + offset);
                return f;
            }
            Byte chunk[65536];
            ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n > 0) {
                buf_.insert(buf_.end(), chunk, chunk + n);
                continue;
            }
            if (n == 0) {
                if (buf_.empty()) return std::nullopt;
                throw TransportError("peer closed mid-frame", /*partial=*/true);
            }
            if (errno == EINTR) continue;
            throw TransportError(std::string("recv: ") + std::strerror(errno));
        }
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

  private:
    int fd_;
    Bytes buf_;
};

// Bound listening socket; accept_one() yields a connected Channel. Created
// separately from accept so tests can bind port 0 and dial the real port.
class SocketListener {
  public:
    explicit SocketListener(const std::string& address) {
        auto info = detail::resolve(address, /*passive=*/true);
        for (addrinfo* ai = info.get(); ai; ai = ai->ai_next) {
            fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd_ < 0) continue;
            int one = 1;
            setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
            if (::bind(fd_, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd_, 4) == 0) return;
            ::close(fd_);
            fd_ = -1;
        }
        throw TransportError("cannot listen on '" + address + "'");
    }

    ~SocketListener() {
        if (fd_ >= 0) ::close(fd_);
    }

    SocketListener(const SocketListener&) = delete;
    SocketListener& operator=(const SocketListener&) = delete;

    std::uint16_t port() const {
        sockaddr_storage ss{};
        socklen_t len = sizeof ss;
        if (getsockname(fd_, reinterpret_cast<sockaddr*>(&ss), &len) != 0)
            throw TransportError("getsockname failed");
        if (ss.ss_family == AF_INET)
            return ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
        return ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port);
    }

    std::unique_ptr<Channel> accept_one() {
        int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) throw TransportError(std::string("accept: ") + std::strerror(errno));
        return std::make_unique<SocketChannel>(fd);
    }

  private:
    int fd_ = -1;
};

// Connects to address, retrying briefly so a dialer may start before its
// listener finishes binding.
inline std::unique_ptr<Channel> socket_dial(const std::string& address, int attempts = 50) {
    for (int attempt = 0;; ++attempt) {
        auto info = detail::resolve(address, /*passive=*/false);
        for (addrinfo* ai = info.get(); ai; ai = ai->ai_next) {
            int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
                return std::make_unique<SocketChannel>(fd);
            ::close(fd);
        }
        if (attempt + 1 >= attempts)
            throw TransportError("cannot connect to '" + address + "'");
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
}

// Blocks for a single inbound connection on address.
inline std::unique_ptr<Channel> socket_listen_one(const std::string& address) {
    SocketListener listener(address);
    return listener.accept_one();
}

}  // namespace otkex
