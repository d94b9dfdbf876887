#pragma once

#include <optional>
#include <string>

#include "splitauth/core.hpp"
#include "splitauth/message.hpp"
#include "splitauth/rng.hpp"

namespace splitauth {

enum class ClientStage {
    Idle,
    AwaitRegisterAck,
    AwaitChallenge,
    AwaitLoginOk,
    Authenticated,
    Failed,
};

enum class ClientEvent {
    Registered,
    RegistrationFailed,
    LoginSucceeded,
    LoginFailed,
    ServerAuthFailed,
    LoggedOut,
    ProtocolViolation,
};

/// Pure per-login client state. Drive with client_on_message; all I/O is the
/// caller's job. session_key is set exactly while stage == Authenticated.
struct ClientSession {
    ClientStage stage = ClientStage::Idle;
    std::string username;
    PasswordDigest digest;
    Nonce client_nonce;
    std::optional<Nonce> server_nonce;
    std::optional<SessionKey> session_key;
};

struct ClientResult {
    ClientSession session;
    std::optional<Message> reply;
    std::optional<ClientEvent> event;
    std::string reason; // error detail for failure events
};

/// Hashes the password client-side and emits Register. Throws
/// std::invalid_argument for an invalid username or empty password.
std::pair<ClientSession, Message> client_start_register(const std::string& username,
                                                        const std::string& password);

/// Emits Login with a fresh client nonce; stage AwaitChallenge.
std::pair<ClientSession, Message> client_start_login(const std::string& username,
                                                     const std::string& password,
                                                     RandomSource& rng);

/// Advances the session with one server message. Out-of-order input fails the
/// session with ClientEvent::ProtocolViolation.
ClientResult client_on_message(ClientSession session, const Message& message);

} // namespace splitauth
