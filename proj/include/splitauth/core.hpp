#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "splitauth/rng.hpp"

namespace splitauth {

/// SHA-256 of the UTF-8 password bytes, unsalted. Stored only in split form.
struct PasswordDigest {
    static constexpr std::size_t kSize = 32;
    std::array<std::uint8_t, kSize> bytes{};

    auto operator<=>(const PasswordDigest&) const = default;
};

enum class SplitMode : std::uint8_t {
    Segment, // contiguous byte slices, the literal scheme
    Xor,     // additive sharing, any n-1 shares are information-free
};

std::string_view split_mode_name(SplitMode mode);

/// Parses "segment" / "xor"; throws std::invalid_argument otherwise.
SplitMode parse_split_mode(std::string_view name);

/// One of n fragments of a digest held by one server.
struct DigestShare {
    std::uint32_t index = 0; // 1-based
    std::uint32_t total = 0;
    SplitMode mode = SplitMode::Segment;
    std::vector<std::uint8_t> payload;

    bool operator==(const DigestShare&) const = default;
};

/// 16-byte per-session freshness value.
struct Nonce {
    static constexpr std::size_t kSize = 16;
    std::array<std::uint8_t, kSize> bytes{};

    auto operator<=>(const Nonce&) const = default;
};

/// Derived independently by client and gateway; never transmitted.
struct SessionKey {
    static constexpr std::size_t kSize = 32;
    std::array<std::uint8_t, kSize> bytes{};

    auto operator<=>(const SessionKey&) const = default;
};

using Proof = std::array<std::uint8_t, 32>;

/// Raised by recombine_shares; each defect is reported distinctly.
class ShareSetError : public std::runtime_error {
public:
    enum class Code {
        EmptySet,
        InvalidIndex,
        DuplicateIndex,
        MissingIndex,
        InconsistentTotal,
        InconsistentMode,
        WrongPayloadLength,
    };

    ShareSetError(Code code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

/// SHA-256 over the exact UTF-8 encoding of the password.
/// Rejects the empty password.
PasswordDigest compute_digest(std::string_view password);

/// Segment payload size rule: ceil(32/total) for index <= 32 % total,
/// floor(32/total) otherwise; sizes sum to 32.
std::size_t segment_payload_size(std::uint32_t index, std::uint32_t total);

/// Byte offset of a segment share within the digest.
std::size_t segment_payload_offset(std::uint32_t index, std::uint32_t total);

/// Segment mode: contiguous slices in index order (1 <= n <= 32).
/// Xor mode: shares 1..n-1 are fresh uniform 32-byte strings from rng and
/// share n is the digest XORed with all of them (n >= 1).
std::vector<DigestShare> split_digest(const PasswordDigest& digest, std::uint32_t n,
                                      SplitMode mode, RandomSource& rng);

/// Inverse of split_digest for a complete set (indices exactly 1..total,
/// consistent total and mode). Input order does not matter.
PasswordDigest recombine_shares(std::span<const DigestShare> shares);

Nonce generate_nonce(RandomSource& rng);

/// SHA-256 over domain byte || server_nonce || client_nonce || digest.
/// Domain bytes: 0x01 login proof, 0x02 session key, 0x03 server proof.
Proof compute_login_proof(const Nonce& server_nonce, const Nonce& client_nonce,
                          const PasswordDigest& digest);
Proof compute_server_proof(const Nonce& server_nonce, const Nonce& client_nonce,
                           const PasswordDigest& digest);
SessionKey derive_session_key(const Nonce& server_nonce, const Nonce& client_nonce,
                              const PasswordDigest& digest);

/// True iff equal length and content; examines every byte pair regardless of
/// early mismatches.
bool constant_time_eq(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

} // namespace splitauth
