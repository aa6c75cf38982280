// SPDX-License-Identifier: Apache-2.0

#include "runsafe/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "runsafe/errors.hpp"

namespace runsafe::net {

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.release();
    }
    return *this;
}

Socket::~Socket() { close(); }

int Socket::release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::uint16_t Socket::local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        return 0;
    }
    return ntohs(addr.sin_port);
}

namespace {

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) {
        return addr;
    }
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* result = nullptr;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || result == nullptr) {
        throw Error(ErrorCode::ConfigError, "cannot resolve host " + host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
    ::freeaddrinfo(result);
    return addr;
}

bool wait_readable(int fd, std::chrono::milliseconds timeout) {
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    return rc > 0;
}

}  // namespace

Socket bind_udp(std::uint16_t port, const std::string& host) {
    Socket s(::socket(AF_INET, SOCK_DGRAM, 0));
    if (!s.valid()) {
        throw Error(ErrorCode::BindFailure, std::string("socket: ") + std::strerror(errno));
    }
    const sockaddr_in addr = resolve(host, port);
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw Error(ErrorCode::BindFailure,
                    "cannot bind UDP port " + std::to_string(port) + ": " + std::strerror(errno));
    }
    int rcvbuf = 1 << 20;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof(rcvbuf));
    return s;
}

Socket connect_udp(const std::string& host, std::uint16_t port) {
    Socket s(::socket(AF_INET, SOCK_DGRAM, 0));
    const sockaddr_in addr = resolve(host, port);
    if (!s.valid() || ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw Error(ErrorCode::ConfigError, "cannot open UDP socket to " + host + ":" + std::to_string(port));
    }
    return s;
}

std::optional<std::size_t> recv_datagram(const Socket& socket, std::span<std::uint8_t> buffer,
                                          std::chrono::milliseconds timeout) {
    if (!wait_readable(socket.fd(), timeout)) {
        return std::nullopt;
    }
    const ssize_t n = ::recv(socket.fd(), buffer.data(), buffer.size(), 0);
    if (n < 0) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(n);
}

bool send_datagram(const Socket& socket, std::span<const std::uint8_t> bytes) {
    return ::send(socket.fd(), bytes.data(), bytes.size(), 0) == static_cast<ssize_t>(bytes.size());
}

Socket listen_tcp(std::uint16_t port, const std::string& host) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) {
        throw Error(ErrorCode::BindFailure, std::string("socket: ") + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    const sockaddr_in addr = resolve(host, port);
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(s.fd(), 16) != 0) {
        throw Error(ErrorCode::BindFailure,
                    "cannot listen on TCP port " + std::to_string(port) + ": " + std::strerror(errno));
    }
    return s;
}

std::optional<Socket> accept_tcp(const Socket& listener, std::chrono::milliseconds timeout) {
    if (!wait_readable(listener.fd(), timeout)) {
        return std::nullopt;
    }
    const int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd < 0) {
        return std::nullopt;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return Socket(fd);
}

Socket connect_tcp(const std::string& host, std::uint16_t port) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    const sockaddr_in addr = resolve(host, port);
    if (!s.valid() || ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw Error(ErrorCode::ConfigError, "cannot connect to " + host + ":" + std::to_string(port));
    }
    int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return s;
}

bool write_all(const Socket& socket, std::span<const std::uint8_t> bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        const ssize_t n = ::send(socket.fd(), bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

bool read_exact(const Socket& socket, std::span<std::uint8_t> buffer, std::chrono::milliseconds timeout) {
    std::size_t got = 0;
    while (got < buffer.size()) {
        if (!wait_readable(socket.fd(), timeout)) {
            return false;
        }
        const ssize_t n = ::recv(socket.fd(), buffer.data() + got, buffer.size() - got, 0);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return false;
        }
        got += static_cast<std::size_t>(n);
    }
    return true;
}

bool wait_readable(const Socket& socket, std::chrono::milliseconds timeout) {
    return wait_readable(socket.fd(), timeout);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::ConfigError, "endpoint must be host:port, got '" + endpoint + "'");
    }
    const int port = std::stoi(endpoint.substr(colon + 1));
    if (port < 0 || port > 65535) {
        throw Error(ErrorCode::ConfigError, "port out of range in '" + endpoint + "'");
    }
    return {endpoint.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace runsafe::net
