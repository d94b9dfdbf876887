#include "splitauth/rng.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace splitauth {

SystemRandomSource::SystemRandomSource() : fd_(::open("/dev/urandom", O_RDONLY | O_CLOEXEC)) {
    if (fd_ < 0) {
        throw std::runtime_error(std::string("cannot open /dev/urandom: ") + std::strerror(errno));
    }
}

SystemRandomSource::~SystemRandomSource() {
    if (fd_ >= 0) ::close(fd_);
}

void SystemRandomSource::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        ssize_t n = ::read(fd_, out.data() + done, out.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error(std::string("read /dev/urandom: ") + std::strerror(errno));
        }
        if (n == 0) {
            throw std::runtime_error("/dev/urandom returned EOF");
        }
        done += static_cast<std::size_t>(n);
    }
}

void DeterministicRandomSource::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (pending_len_ == 0) {
            std::uint64_t word = engine_();
            for (int i = 0; i < 8; ++i) {
                pending_[i] = static_cast<std::uint8_t>(word >> (8 * i));
            }
            pending_len_ = 8;
        }
        std::size_t take = std::min(pending_len_, out.size() - done);
        std::size_t offset = 8 - pending_len_;
        std::memcpy(out.data() + done, pending_ + offset, take);
        pending_len_ -= take;
        done += take;
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label) {
    // splitmix64 over master + label increments
    std::uint64_t z = master + (label + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace splitauth
