#include "splitauth/core.hpp"

#include <algorithm>

#include "splitauth/sha256.hpp"

namespace splitauth {

namespace {

std::array<std::uint8_t, 32> domain_hash(std::uint8_t domain, const Nonce& server_nonce,
                                         const Nonce& client_nonce, const PasswordDigest& digest) {
    Sha256 h;
    h.update(domain);
    h.update(server_nonce.bytes);
    h.update(client_nonce.bytes);
    h.update(digest.bytes);
    return h.finish();
}

} // namespace

std::string_view split_mode_name(SplitMode mode) {
    return mode == SplitMode::Segment ? "segment" : "xor";
}

SplitMode parse_split_mode(std::string_view name) {
    if (name == "segment") return SplitMode::Segment;
    if (name == "xor") return SplitMode::Xor;
    throw std::invalid_argument("unknown split mode: " + std::string(name));
}

PasswordDigest compute_digest(std::string_view password) {
    if (password.empty()) {
        throw std::invalid_argument("password must not be empty");
    }
    PasswordDigest out;
    out.bytes = Sha256::digest(
        {reinterpret_cast<const std::uint8_t*>(password.data()), password.size()});
    return out;
}

std::size_t segment_payload_size(std::uint32_t index, std::uint32_t total) {
    std::size_t base = PasswordDigest::kSize / total;
    std::size_t remainder = PasswordDigest::kSize % total;
    return index <= remainder ? base + 1 : base;
}

std::size_t segment_payload_offset(std::uint32_t index, std::uint32_t total) {
    std::size_t base = PasswordDigest::kSize / total;
    std::size_t remainder = PasswordDigest::kSize % total;
    std::size_t before = index - 1;
    return before * base + std::min<std::size_t>(before, remainder);
}

std::vector<DigestShare> split_digest(const PasswordDigest& digest, std::uint32_t n,
                                      SplitMode mode, RandomSource& rng) {
    if (mode == SplitMode::Segment) {
        if (n < 1 || n > PasswordDigest::kSize) {
            throw std::invalid_argument("segment mode requires 1 <= n <= 32");
        }
    } else if (n < 1) {
        throw std::invalid_argument("xor mode requires n >= 1");
    }

    std::vector<DigestShare> shares;
    shares.reserve(n);

    if (mode == SplitMode::Segment) {
        std::size_t offset = 0;
        for (std::uint32_t i = 1; i <= n; ++i) {
            std::size_t len = segment_payload_size(i, n);
            shares.push_back({i, n, mode,
                              {digest.bytes.begin() + offset, digest.bytes.begin() + offset + len}});
            offset += len;
        }
        return shares;
    }

    // Xor: shares 1..n-1 uniform random, share n closes the sum to the digest.
    std::vector<std::uint8_t> last(digest.bytes.begin(), digest.bytes.end());
    for (std::uint32_t i = 1; i < n; ++i) {
        std::vector<std::uint8_t> payload(PasswordDigest::kSize);
        rng.fill(payload);
        for (std::size_t b = 0; b < PasswordDigest::kSize; ++b) {
            last[b] ^= payload[b];
        }
        shares.push_back({i, n, mode, std::move(payload)});
    }
    shares.push_back({n, n, mode, std::move(last)});
    return shares;
}

PasswordDigest recombine_shares(std::span<const DigestShare> shares) {
    if (shares.empty()) {
        throw ShareSetError(ShareSetError::Code::EmptySet, "share set is empty");
    }
    const std::uint32_t total = shares.front().total;
    const SplitMode mode = shares.front().mode;
    if (total < 1 || (mode == SplitMode::Segment && total > PasswordDigest::kSize)) {
        throw ShareSetError(ShareSetError::Code::InvalidIndex,
                            "share total out of range for mode");
    }

    std::vector<const DigestShare*> by_index(total, nullptr);
    for (const DigestShare& share : shares) {
        if (share.total != total) {
            throw ShareSetError(ShareSetError::Code::InconsistentTotal,
                                "shares disagree on total");
        }
        if (share.mode != mode) {
            throw ShareSetError(ShareSetError::Code::InconsistentMode,
                                "shares disagree on split mode");
        }
        if (share.index < 1 || share.index > total) {
            throw ShareSetError(ShareSetError::Code::InvalidIndex,
                                "share index outside 1..total");
        }
        if (by_index[share.index - 1] != nullptr) {
            throw ShareSetError(ShareSetError::Code::DuplicateIndex,
                                "duplicate share index " + std::to_string(share.index));
        }
        std::size_t want = mode == SplitMode::Segment ? segment_payload_size(share.index, total)
                                                      : PasswordDigest::kSize;
        if (share.payload.size() != want) {
            throw ShareSetError(ShareSetError::Code::WrongPayloadLength,
                                "share payload length " + std::to_string(share.payload.size()) +
                                    ", expected " + std::to_string(want));
        }
        by_index[share.index - 1] = &share;
    }
    for (std::uint32_t i = 0; i < total; ++i) {
        if (by_index[i] == nullptr) {
            throw ShareSetError(ShareSetError::Code::MissingIndex,
                                "missing share index " + std::to_string(i + 1));
        }
    }

    PasswordDigest out;
    if (mode == SplitMode::Segment) {
        std::size_t offset = 0;
        for (const DigestShare* share : by_index) {
            std::copy(share->payload.begin(), share->payload.end(), out.bytes.begin() + offset);
            offset += share->payload.size();
        }
    } else {
        for (const DigestShare* share : by_index) {
            for (std::size_t b = 0; b < PasswordDigest::kSize; ++b) {
                out.bytes[b] ^= share->payload[b];
            }
        }
    }
    return out;
}

Nonce generate_nonce(RandomSource& rng) {
    Nonce nonce;
    rng.fill(nonce.bytes);
    return nonce;
}

Proof compute_login_proof(const Nonce& server_nonce, const Nonce& client_nonce,
                          const PasswordDigest& digest) {
    return domain_hash(0x01, server_nonce, client_nonce, digest);
}

Proof compute_server_proof(const Nonce& server_nonce, const Nonce& client_nonce,
                           const PasswordDigest& digest) {
    return domain_hash(0x03, server_nonce, client_nonce, digest);
}

SessionKey derive_session_key(const Nonce& server_nonce, const Nonce& client_nonce,
                              const PasswordDigest& digest) {
    SessionKey key;
    key.bytes = domain_hash(0x02, server_nonce, client_nonce, digest);
    return key;
}

bool constant_time_eq(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) return false;
    volatile std::uint8_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc = acc | static_cast<std::uint8_t>(a[i] ^ b[i]);
    }
    return acc == 0;
}

} // namespace splitauth
