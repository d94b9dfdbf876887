#include "splitauth/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace splitauth {

namespace {

[[noreturn]] void raise_errno(const std::string& what) {
    throw NetError(what + ": " + std::strerror(errno));
}

struct AddrInfo {
    addrinfo* list = nullptr;
    ~AddrInfo() {
        if (list) ::freeaddrinfo(list);
    }
};

addrinfo* resolve(const Endpoint& endpoint, AddrInfo& holder, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    std::string port = std::to_string(endpoint.port);
    int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &holder.list);
    if (rc != 0) {
        throw NetError("cannot resolve " + endpoint.to_string() + ": " + gai_strerror(rc));
    }
    return holder.list;
}

} // namespace

Endpoint parse_endpoint(const std::string& spec) {
    auto colon = spec.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size()) {
        throw NetError("endpoint must be host:port, got \"" + spec + "\"");
    }
    Endpoint ep;
    ep.host = spec.substr(0, colon);
    std::string port_str = spec.substr(colon + 1);
    char* end = nullptr;
    long port = std::strtol(port_str.c_str(), &end, 10);
    if (*end != '\0' || port < 0 || port > 65535) {
        throw NetError("bad port in endpoint \"" + spec + "\"");
    }
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

TcpStream::~TcpStream() {
    if (fd_ >= 0) ::close(fd_);
}

TcpStream::TcpStream(TcpStream&& other) noexcept : fd_(other.fd_) {
    other.fd_ = -1;
}

TcpStream& TcpStream::operator=(TcpStream&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

TcpStream TcpStream::connect(const Endpoint& endpoint, int timeout_ms) {
    AddrInfo holder;
    addrinfo* info = resolve(endpoint, holder, false);
    int last_errno = ECONNREFUSED;

    for (addrinfo* ai = info; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, SOCK_STREAM | SOCK_CLOEXEC, 0);
        if (fd < 0) continue;

        int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);

        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd pfd{fd, POLLOUT, 0};
            int prc = ::poll(&pfd, 1, timeout_ms);
            if (prc == 1) {
                int err = 0;
                socklen_t len = sizeof(err);
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                rc = err == 0 ? 0 : -1;
                errno = err;
            } else {
                rc = -1;
                if (prc == 0) errno = ETIMEDOUT;
            }
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, flags); // back to blocking
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            return TcpStream(fd);
        }
        last_errno = errno;
        ::close(fd);
    }
    errno = last_errno;
    raise_errno("connect to " + endpoint.to_string() + " failed");
}

void TcpStream::send_all(std::span<const std::uint8_t> data) {
    std::size_t done = 0;
    while (done < data.size()) {
        ssize_t n = ::send(fd_, data.data() + done, data.size() - done, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            raise_errno("send failed");
        }
        done += static_cast<std::size_t>(n);
    }
}

std::size_t TcpStream::recv_some(std::span<std::uint8_t> out) {
    while (true) {
        ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
        if (n >= 0) return static_cast<std::size_t>(n);
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
            throw NetError("receive timed out");
        }
        raise_errno("recv failed");
    }
}

void TcpStream::set_recv_timeout(int timeout_ms) {
    timeval tv{};
    tv.tv_sec = timeout_ms / 1000;
    tv.tv_usec = (timeout_ms % 1000) * 1000;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void TcpStream::shutdown_both() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
    if (wake_read_ >= 0) ::close(wake_read_);
    if (wake_write_ >= 0) ::close(wake_write_);
}

TcpListener::TcpListener(TcpListener&& other) noexcept
    : fd_(other.fd_), wake_read_(other.wake_read_), wake_write_(other.wake_write_),
      port_(other.port_) {
    other.fd_ = other.wake_read_ = other.wake_write_ = -1;
}

TcpListener& TcpListener::operator=(TcpListener&& other) noexcept {
    if (this != &other) {
        this->~TcpListener();
        fd_ = other.fd_;
        wake_read_ = other.wake_read_;
        wake_write_ = other.wake_write_;
        port_ = other.port_;
        other.fd_ = other.wake_read_ = other.wake_write_ = -1;
    }
    return *this;
}

TcpListener TcpListener::bind(const Endpoint& endpoint) {
    AddrInfo holder;
    addrinfo* info = resolve(endpoint, holder, true);

    TcpListener listener;
    int last_errno = EADDRNOTAVAIL;
    for (addrinfo* ai = info; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, SOCK_STREAM | SOCK_CLOEXEC, 0);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            sockaddr_storage addr{};
            socklen_t len = sizeof(addr);
            ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
            if (addr.ss_family == AF_INET) {
                listener.port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
            } else {
                listener.port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
            }
            listener.fd_ = fd;
            break;
        }
        last_errno = errno;
        ::close(fd);
    }
    if (listener.fd_ < 0) {
        errno = last_errno;
        raise_errno("cannot bind " + endpoint.to_string());
    }

    int pipefd[2];
    if (::pipe2(pipefd, O_CLOEXEC) != 0) {
        raise_errno("pipe failed");
    }
    listener.wake_read_ = pipefd[0];
    listener.wake_write_ = pipefd[1];
    return listener;
}

std::optional<TcpStream> TcpListener::accept() {
    while (true) {
        pollfd fds[2] = {{fd_, POLLIN, 0}, {wake_read_, POLLIN, 0}};
        int rc = ::poll(fds, 2, -1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            raise_errno("poll failed");
        }
        if (fds[1].revents != 0) {
            return std::nullopt; // stopped
        }
        if (fds[0].revents != 0) {
            int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
            if (fd < 0) {
                if (errno == EINTR || errno == ECONNABORTED) continue;
                raise_errno("accept failed");
            }
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            return TcpStream(fd);
        }
    }
}

void TcpListener::stop() {
    if (wake_write_ >= 0) {
        char byte = 1;
        [[maybe_unused]] ssize_t n = ::write(wake_write_, &byte, 1);
    }
}

std::optional<Message> FramedConnection::read_message() {
    while (true) {
        DecodeResult result = decode_frame(buffer_);
        switch (result.status) {
        case DecodeStatus::Ok:
            buffer_.erase(buffer_.begin(), buffer_.begin() + result.consumed);
            return std::move(*result.message);
        case DecodeStatus::Oversize:
        case DecodeStatus::Malformed:
            throw NetError("frame error: " + result.error);
        case DecodeStatus::Incomplete:
            break;
        }

        std::uint8_t chunk[4096];
        std::size_t n = stream_.recv_some(chunk);
        if (n == 0) {
            if (buffer_.empty()) return std::nullopt;
            throw NetError("connection closed mid-frame");
        }
        buffer_.insert(buffer_.end(), chunk, chunk + n);
    }
}

void FramedConnection::write_message(const Message& message) {
    stream_.send_all(encode_frame(message));
}

} // namespace splitauth
