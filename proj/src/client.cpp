#include "splitauth/client.hpp"

#include "splitauth/hex.hpp"

namespace splitauth {

namespace {

ClientResult fail(ClientSession session, ClientEvent event, std::string reason) {
    session.stage = ClientStage::Failed;
    session.session_key.reset();
    return {std::move(session), std::nullopt, event, std::move(reason)};
}

} // namespace

std::pair<ClientSession, Message> client_start_register(const std::string& username,
                                                        const std::string& password) {
    if (!valid_username(username)) {
        throw std::invalid_argument("invalid username");
    }
    ClientSession session;
    session.username = username;
    session.digest = compute_digest(password); // rejects empty passwords
    session.stage = ClientStage::AwaitRegisterAck;
    Message msg = MsgRegister{username, to_hex(session.digest.bytes)};
    return {std::move(session), std::move(msg)};
}

std::pair<ClientSession, Message> client_start_login(const std::string& username,
                                                     const std::string& password,
                                                     RandomSource& rng) {
    if (!valid_username(username)) {
        throw std::invalid_argument("invalid username");
    }
    ClientSession session;
    session.username = username;
    session.digest = compute_digest(password);
    session.client_nonce = generate_nonce(rng);
    session.stage = ClientStage::AwaitChallenge;
    Message msg = MsgLogin{username, to_hex(session.client_nonce.bytes)};
    return {std::move(session), std::move(msg)};
}

ClientResult client_on_message(ClientSession session, const Message& message) {
    if (session.stage == ClientStage::Failed) {
        return fail(std::move(session), ClientEvent::ProtocolViolation, "session already failed");
    }

    if (const auto* err = std::get_if<MsgRegisterErr>(&message)) {
        return fail(std::move(session), ClientEvent::RegistrationFailed, err->reason);
    }
    if (const auto* err = std::get_if<MsgLoginErr>(&message)) {
        return fail(std::move(session), ClientEvent::LoginFailed, err->reason);
    }

    switch (session.stage) {
    case ClientStage::AwaitRegisterAck:
        if (std::holds_alternative<MsgRegisterOk>(message)) {
            session.stage = ClientStage::Idle;
            return {std::move(session), std::nullopt, ClientEvent::Registered, ""};
        }
        break;
    case ClientStage::AwaitChallenge:
        if (const auto* challenge = std::get_if<MsgChallenge>(&message)) {
            Nonce server_nonce;
            auto raw = from_hex(challenge->server_nonce_hex);
            if (raw.size() != Nonce::kSize) {
                return fail(std::move(session), ClientEvent::ProtocolViolation,
                            "challenge nonce has wrong length");
            }
            std::copy(raw.begin(), raw.end(), server_nonce.bytes.begin());
            session.server_nonce = server_nonce;
            Proof proof =
                compute_login_proof(server_nonce, session.client_nonce, session.digest);
            session.stage = ClientStage::AwaitLoginOk;
            return {std::move(session), MsgChallengeResponse{to_hex(proof)}, std::nullopt, ""};
        }
        break;
    case ClientStage::AwaitLoginOk:
        if (const auto* ok = std::get_if<MsgLoginOk>(&message)) {
            Proof expected = compute_server_proof(*session.server_nonce, session.client_nonce,
                                                  session.digest);
            auto claimed = from_hex(ok->server_proof_hex);
            if (!constant_time_eq(claimed, expected)) {
                return fail(std::move(session), ClientEvent::ServerAuthFailed,
                            "server proof mismatch");
            }
            session.session_key = derive_session_key(*session.server_nonce,
                                                     session.client_nonce, session.digest);
            session.stage = ClientStage::Authenticated;
            return {std::move(session), std::nullopt, ClientEvent::LoginSucceeded, ""};
        }
        break;
    case ClientStage::Authenticated:
        if (std::holds_alternative<MsgLogoutOk>(message)) {
            session.session_key.reset();
            session.server_nonce.reset();
            session.stage = ClientStage::Idle;
            return {std::move(session), std::nullopt, ClientEvent::LoggedOut, ""};
        }
        break;
    case ClientStage::Idle:
    case ClientStage::Failed:
        break;
    }

    return fail(std::move(session), ClientEvent::ProtocolViolation,
                "unexpected " + std::string(message_type_name(message)));
}

} // namespace splitauth
