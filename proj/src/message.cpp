#include "splitauth/message.hpp"

#include "splitauth/hex.hpp"

namespace splitauth {

namespace {

struct TypeNameVisitor {
    std::string_view operator()(const MsgRegister&) const { return "register"; }
    std::string_view operator()(const MsgRegisterOk&) const { return "register_ok"; }
    std::string_view operator()(const MsgRegisterErr&) const { return "register_err"; }
    std::string_view operator()(const MsgLogin&) const { return "login"; }
    std::string_view operator()(const MsgChallenge&) const { return "challenge"; }
    std::string_view operator()(const MsgChallengeResponse&) const { return "challenge_response"; }
    std::string_view operator()(const MsgLoginOk&) const { return "login_ok"; }
    std::string_view operator()(const MsgLoginErr&) const { return "login_err"; }
    std::string_view operator()(const MsgLogout&) const { return "logout"; }
    std::string_view operator()(const MsgLogoutOk&) const { return "logout_ok"; }
    std::string_view operator()(const MsgSharePut&) const { return "share_put"; }
    std::string_view operator()(const MsgSharePutOk&) const { return "share_put_ok"; }
    std::string_view operator()(const MsgSharePutErr&) const { return "share_put_err"; }
    std::string_view operator()(const MsgShareGet&) const { return "share_get"; }
    std::string_view operator()(const MsgShareData&) const { return "share_data"; }
    std::string_view operator()(const MsgShareMissing&) const { return "share_missing"; }
    std::string_view operator()(const MsgShareDel&) const { return "share_del"; }
    std::string_view operator()(const MsgShareDelOk&) const { return "share_del_ok"; }
};

void require_hex_bytes(std::string_view field, const std::string& hex, std::size_t bytes) {
    if (!is_lower_hex(hex) || hex.size() != bytes * 2) {
        throw MessageError(std::string(field) + " must be lowercase hex of " +
                           std::to_string(bytes) + " bytes");
    }
}

void require_username(const std::string& username) {
    if (!valid_username(username)) {
        throw MessageError("username must be 1..64 UTF-8 characters without control characters");
    }
}

void require_share_fields(std::uint32_t index, std::uint32_t total, SplitMode mode,
                          const std::string& payload_hex) {
    if (total < 1 || (mode == SplitMode::Segment && total > PasswordDigest::kSize)) {
        throw MessageError("share total out of range for mode");
    }
    if (index < 1 || index > total) {
        throw MessageError("share index outside 1..total");
    }
    std::size_t want = mode == SplitMode::Segment ? segment_payload_size(index, total)
                                                  : PasswordDigest::kSize;
    require_hex_bytes("payload_hex", payload_hex, want);
}

} // namespace

std::string_view message_type_name(const Message& message) {
    return std::visit(TypeNameVisitor{}, message);
}

bool valid_username(std::string_view username) {
    std::size_t chars = 0;
    std::size_t i = 0;
    const auto* s = reinterpret_cast<const unsigned char*>(username.data());
    const std::size_t n = username.size();
    while (i < n) {
        std::uint32_t cp;
        std::size_t len;
        unsigned char c = s[i];
        if (c < 0x80) {
            cp = c;
            len = 1;
        } else if ((c & 0xe0) == 0xc0) {
            cp = c & 0x1f;
            len = 2;
        } else if ((c & 0xf0) == 0xe0) {
            cp = c & 0x0f;
            len = 3;
        } else if ((c & 0xf8) == 0xf0) {
            cp = c & 0x07;
            len = 4;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            if ((s[i + k] & 0xc0) != 0x80) return false;
            cp = cp << 6 | (s[i + k] & 0x3f);
        }
        // overlong forms, surrogates, out of range
        static constexpr std::uint32_t kMinByLen[5] = {0, 0x00, 0x80, 0x800, 0x10000};
        if (cp < kMinByLen[len] || cp > 0x10ffff) return false;
        if (cp >= 0xd800 && cp <= 0xdfff) return false;
        if (cp < 0x20 || (cp >= 0x7f && cp <= 0x9f)) return false; // C0, DEL, C1
        i += len;
        ++chars;
        if (chars > 64) return false;
    }
    return chars >= 1;
}

void validate_message(const Message& message) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MsgRegister>) {
                require_username(m.username);
                require_hex_bytes("digest_hex", m.digest_hex, PasswordDigest::kSize);
            } else if constexpr (std::is_same_v<T, MsgLogin>) {
                require_username(m.username);
                require_hex_bytes("client_nonce_hex", m.client_nonce_hex, Nonce::kSize);
            } else if constexpr (std::is_same_v<T, MsgChallenge>) {
                require_hex_bytes("server_nonce_hex", m.server_nonce_hex, Nonce::kSize);
            } else if constexpr (std::is_same_v<T, MsgChallengeResponse>) {
                require_hex_bytes("proof_hex", m.proof_hex, 32);
            } else if constexpr (std::is_same_v<T, MsgLoginOk>) {
                require_hex_bytes("server_proof_hex", m.server_proof_hex, 32);
            } else if constexpr (std::is_same_v<T, MsgSharePut>) {
                require_username(m.username);
                require_share_fields(m.index, m.total, m.mode, m.payload_hex);
            } else if constexpr (std::is_same_v<T, MsgShareGet> ||
                                 std::is_same_v<T, MsgShareDel>) {
                require_username(m.username);
            } else if constexpr (std::is_same_v<T, MsgShareData>) {
                require_share_fields(m.index, m.total, m.mode, m.payload_hex);
            }
        },
        message);
}

DigestShare share_from_message(const MsgSharePut& m) {
    return {m.index, m.total, m.mode, from_hex(m.payload_hex)};
}

DigestShare share_from_message(const MsgShareData& m) {
    return {m.index, m.total, m.mode, from_hex(m.payload_hex)};
}

MsgShareData share_to_message(const DigestShare& share) {
    return {share.index, share.total, share.mode, to_hex(share.payload)};
}

} // namespace splitauth
