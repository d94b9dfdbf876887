#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "splitauth/core.hpp"

namespace splitauth {

// Wire message schema. Hex fields are lowercase and decode to fixed byte
// lengths: digest 32, nonce 16, proof 32, share payload per split-mode rule.
// JSON member order on the wire follows the field order declared here.

struct MsgRegister {
    std::string username;
    std::string digest_hex;
    bool operator==(const MsgRegister&) const = default;
};
struct MsgRegisterOk {
    bool operator==(const MsgRegisterOk&) const = default;
};
struct MsgRegisterErr {
    std::string reason;
    bool operator==(const MsgRegisterErr&) const = default;
};
struct MsgLogin {
    std::string username;
    std::string client_nonce_hex;
    bool operator==(const MsgLogin&) const = default;
};
struct MsgChallenge {
    std::string server_nonce_hex;
    bool operator==(const MsgChallenge&) const = default;
};
struct MsgChallengeResponse {
    std::string proof_hex;
    bool operator==(const MsgChallengeResponse&) const = default;
};
struct MsgLoginOk {
    std::string server_proof_hex;
    bool operator==(const MsgLoginOk&) const = default;
};
struct MsgLoginErr {
    std::string reason;
    bool operator==(const MsgLoginErr&) const = default;
};
struct MsgLogout {
    bool operator==(const MsgLogout&) const = default;
};
struct MsgLogoutOk {
    bool operator==(const MsgLogoutOk&) const = default;
};
struct MsgSharePut {
    std::string username;
    std::uint32_t index = 0;
    std::uint32_t total = 0;
    SplitMode mode = SplitMode::Segment;
    std::string payload_hex;
    bool operator==(const MsgSharePut&) const = default;
};
struct MsgSharePutOk {
    bool operator==(const MsgSharePutOk&) const = default;
};
struct MsgSharePutErr {
    std::string reason;
    bool operator==(const MsgSharePutErr&) const = default;
};
struct MsgShareGet {
    std::string username;
    bool operator==(const MsgShareGet&) const = default;
};
struct MsgShareData {
    std::uint32_t index = 0;
    std::uint32_t total = 0;
    SplitMode mode = SplitMode::Segment;
    std::string payload_hex;
    bool operator==(const MsgShareData&) const = default;
};
struct MsgShareMissing {
    bool operator==(const MsgShareMissing&) const = default;
};
// Registration compensation: removes a username's share from a peer store.
struct MsgShareDel {
    std::string username;
    bool operator==(const MsgShareDel&) const = default;
};
struct MsgShareDelOk {
    bool operator==(const MsgShareDelOk&) const = default;
};

using Message = std::variant<MsgRegister, MsgRegisterOk, MsgRegisterErr, MsgLogin, MsgChallenge,
                             MsgChallengeResponse, MsgLoginOk, MsgLoginErr, MsgLogout, MsgLogoutOk,
                             MsgSharePut, MsgSharePutOk, MsgSharePutErr, MsgShareGet, MsgShareData,
                             MsgShareMissing, MsgShareDel, MsgShareDelOk>;

class MessageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The snake_case wire tag ("register", "share_put", ...).
std::string_view message_type_name(const Message& message);

/// 1..64 UTF-8 code points, no control characters, valid UTF-8.
bool valid_username(std::string_view username);

/// Enforces the schema invariants above; throws MessageError with the defect.
void validate_message(const Message& message);

DigestShare share_from_message(const MsgSharePut& m);
DigestShare share_from_message(const MsgShareData& m);
MsgShareData share_to_message(const DigestShare& share);

} // namespace splitauth
