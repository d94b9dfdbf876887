#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <span>

namespace splitauth {

/// Byte source abstraction. Production code draws from the OS entropy pool;
/// tests and the simulation harness substitute a seeded deterministic source.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// Reads /dev/urandom. Throws std::runtime_error if the pool is unusable.
class SystemRandomSource final : public RandomSource {
public:
    SystemRandomSource();
    ~SystemRandomSource() override;
    SystemRandomSource(const SystemRandomSource&) = delete;
    SystemRandomSource& operator=(const SystemRandomSource&) = delete;

    void fill(std::span<std::uint8_t> out) override;

private:
    int fd_;
};

/// mt19937_64 as a byte stream: each 64-bit output is emitted little-endian.
/// The engine's outputs are fixed by the C++ standard, so a given seed yields
/// the same bytes on every platform.
class DeterministicRandomSource final : public RandomSource {
public:
    explicit DeterministicRandomSource(std::uint64_t seed) : engine_(seed) {}

    void fill(std::span<std::uint8_t> out) override;

private:
    std::mt19937_64 engine_;
    std::uint8_t pending_[8] = {};
    std::size_t pending_len_ = 0;
};

/// Serializes access to an underlying source shared across threads.
class SynchronizedRandomSource final : public RandomSource {
public:
    explicit SynchronizedRandomSource(std::unique_ptr<RandomSource> inner)
        : inner_(std::move(inner)) {}

    void fill(std::span<std::uint8_t> out) override {
        std::lock_guard lock(mutex_);
        inner_->fill(out);
    }

private:
    std::mutex mutex_;
    std::unique_ptr<RandomSource> inner_;
};

/// splitmix64 step; stable per-actor seed derivation from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label);

} // namespace splitauth
