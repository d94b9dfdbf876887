#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitauth/frame.hpp"

namespace splitauth {

class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;

    std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port"; throws NetError on a bad spec.
Endpoint parse_endpoint(const std::string& spec);

/// Connected TCP socket with blocking whole-buffer writes.
class TcpStream {
public:
    TcpStream() = default;
    explicit TcpStream(int fd) : fd_(fd) {}
    ~TcpStream();
    TcpStream(TcpStream&& other) noexcept;
    TcpStream& operator=(TcpStream&& other) noexcept;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;

    /// Connects with a bounded wait. Throws NetError on failure or timeout.
    static TcpStream connect(const Endpoint& endpoint, int timeout_ms);

    void send_all(std::span<const std::uint8_t> data);

    /// Reads at most out.size() bytes; returns 0 on orderly EOF. Throws
    /// NetError on error or receive timeout.
    std::size_t recv_some(std::span<std::uint8_t> out);

    void set_recv_timeout(int timeout_ms);

    /// Unblocks any reader from another thread.
    void shutdown_both();

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

private:
    int fd_ = -1;
};

class TcpListener {
public:
    TcpListener() = default;
    ~TcpListener();
    TcpListener(TcpListener&& other) noexcept;
    TcpListener& operator=(TcpListener&& other) noexcept;
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    /// Binds and listens; port 0 picks an ephemeral port. Throws NetError.
    static TcpListener bind(const Endpoint& endpoint);

    /// Blocks until a connection arrives or stop() is called (then nullopt).
    std::optional<TcpStream> accept();

    /// Wakes a blocked accept(); subsequent accepts return nullopt.
    void stop();

    std::uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    int wake_read_ = -1;
    int wake_write_ = -1;
    std::uint16_t port_ = 0;
};

/// Framed message IO over one stream.
class FramedConnection {
public:
    explicit FramedConnection(TcpStream stream) : stream_(std::move(stream)) {}

    /// Next message, or nullopt on orderly EOF with an empty buffer. Throws
    /// NetError on transport errors and on malformed/oversize frames
    /// (connection-fatal by contract).
    std::optional<Message> read_message();

    void write_message(const Message& message);

    TcpStream& stream() { return stream_; }

private:
    TcpStream stream_;
    std::vector<std::uint8_t> buffer_;
};

} // namespace splitauth
