// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace runsafe::net {

/// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(other.release()) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release();
    void close();
    /// Port the socket is bound to (useful after binding port 0).
    std::uint16_t local_port() const;

private:
    int fd_ = -1;
};

/// UDP socket bound to `port` on all interfaces. Throws BindFailure.
Socket bind_udp(std::uint16_t port, const std::string& host = "0.0.0.0");
/// UDP socket connected to host:port for sending.
Socket connect_udp(const std::string& host, std::uint16_t port);
/// Receives one datagram, waiting at most `timeout`. nullopt on timeout.
std::optional<std::size_t> recv_datagram(const Socket& socket, std::span<std::uint8_t> buffer,
                                          std::chrono::milliseconds timeout);
bool send_datagram(const Socket& socket, std::span<const std::uint8_t> bytes);

/// Listening TCP socket. Throws BindFailure.
Socket listen_tcp(std::uint16_t port, const std::string& host = "127.0.0.1");
std::optional<Socket> accept_tcp(const Socket& listener, std::chrono::milliseconds timeout);
Socket connect_tcp(const std::string& host, std::uint16_t port);
/// Writes all bytes; false on a broken connection.
bool write_all(const Socket& socket, std::span<const std::uint8_t> bytes);
/// Reads exactly `buffer.size()` bytes; false on EOF, error or timeout.
bool read_exact(const Socket& socket, std::span<std::uint8_t> buffer, std::chrono::milliseconds timeout);

/// True once the socket has data (or EOF) pending.
bool wait_readable(const Socket& socket, std::chrono::milliseconds timeout);

/// Splits "host:port".
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace runsafe::net
