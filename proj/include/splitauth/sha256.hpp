#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace splitauth {

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    static constexpr std::size_t kDigestSize = 32;
    static constexpr std::size_t kBlockSize = 64;

    Sha256() { reset(); }

    Sha256& update(std::span<const std::uint8_t> data);
    Sha256& update(std::uint8_t byte) { return update({&byte, 1}); }

    /// Finalizes and returns the digest. The instance must be reset() before reuse.
    std::array<std::uint8_t, kDigestSize> finish();

    void reset();

    static std::array<std::uint8_t, kDigestSize> digest(std::span<const std::uint8_t> data) {
        Sha256 h;
        h.update(data);
        return h.finish();
    }

private:
    void transform(const std::uint8_t block[kBlockSize]);

    std::uint32_t state_[8];
    std::uint64_t total_bytes_;
    std::uint8_t buffer_[kBlockSize];
    std::size_t buffer_len_;
};

} // namespace splitauth
