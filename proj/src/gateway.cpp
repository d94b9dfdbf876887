#include "splitauth/gateway.hpp"

#include "splitauth/hex.hpp"

namespace splitauth {

namespace {

constexpr const char* kReasonInvalid = "invalid";
constexpr const char* kReasonProtocol = "protocol";
constexpr const char* kReasonUnavailable = "unavailable";

bool session_active(const std::optional<GatewaySession>& session) {
    return session.has_value() && session->stage != GatewayStage::Denied;
}

GatewayResult deny(std::optional<GatewaySession> session, const char* reason) {
    if (session) {
        session->stage = GatewayStage::Denied;
        session->session_key.reset();
    }
    return {std::move(session), {EffectReply{MsgLoginErr{reason}}}};
}

Nonce nonce_from_hex(const std::string& hex) {
    Nonce nonce;
    auto raw = from_hex(hex);
    std::copy(raw.begin(), raw.end(), nonce.bytes.begin());
    return nonce;
}

} // namespace

GatewayResult gateway_on_client_message(std::optional<GatewaySession> session,
                                        const Message& message, RandomSource& rng) {
    if (const auto* reg = std::get_if<MsgRegister>(&message)) {
        if (session_active(session)) {
            return deny(std::move(session), kReasonProtocol);
        }
        PasswordDigest digest;
        auto raw = from_hex(reg->digest_hex);
        std::copy(raw.begin(), raw.end(), digest.bytes.begin());
        return {std::move(session), {EffectSplitAndStore{reg->username, digest}}};
    }

    if (const auto* login = std::get_if<MsgLogin>(&message)) {
        if (session_active(session)) {
            return deny(std::move(session), kReasonProtocol);
        }
        GatewaySession fresh;
        fresh.stage = GatewayStage::AwaitShares;
        fresh.username = login->username;
        fresh.client_nonce = nonce_from_hex(login->client_nonce_hex);
        fresh.server_nonce = generate_nonce(rng); // once per session, at creation
        return {std::move(fresh), {EffectFetchShares{login->username}}};
    }

    if (const auto* response = std::get_if<MsgChallengeResponse>(&message)) {
        if (!session || session->stage != GatewayStage::AwaitResponse) {
            return deny(std::move(session), kReasonProtocol);
        }
        GatewaySession s = std::move(*session);
        auto proof = from_hex(response->proof_hex);
        bool ok = false;
        if (!s.dummy && s.expected_digest) {
            Proof expected =
                compute_login_proof(s.server_nonce, s.client_nonce, *s.expected_digest);
            ok = constant_time_eq(proof, expected);
        }
        if (!ok) {
            return deny(std::move(s), kReasonInvalid);
        }
        s.stage = GatewayStage::Granted;
        s.session_key = derive_session_key(s.server_nonce, s.client_nonce, *s.expected_digest);
        Proof server_proof =
            compute_server_proof(s.server_nonce, s.client_nonce, *s.expected_digest);
        return {std::move(s), {EffectReply{MsgLoginOk{to_hex(server_proof)}}}};
    }

    if (std::holds_alternative<MsgLogout>(message)) {
        if (session && (session->stage == GatewayStage::AwaitShares ||
                        session->stage == GatewayStage::AwaitResponse)) {
            return deny(std::move(session), kReasonProtocol);
        }
        // Granted or no session: idempotent logout ends the session.
        return {std::nullopt, {EffectReply{MsgLogoutOk{}}}};
    }

    // Share-transfer and server-to-client types are not client-originated.
    return deny(std::move(session), kReasonProtocol);
}

Message gateway_register_reply(RegisterOutcome outcome) {
    switch (outcome) {
    case RegisterOutcome::Ok:
        return MsgRegisterOk{};
    case RegisterOutcome::Exists:
        return MsgRegisterErr{"username already exists"};
    case RegisterOutcome::Aborted:
        return MsgRegisterErr{"registration aborted"};
    case RegisterOutcome::Unavailable:
        return MsgRegisterErr{kReasonUnavailable};
    }
    return MsgRegisterErr{kReasonUnavailable};
}

GatewayResult gateway_on_shares(GatewaySession session, const FetchOutcome& outcome) {
    if (session.stage != GatewayStage::AwaitShares) {
        throw std::logic_error("gateway_on_shares outside AwaitShares");
    }
    if (std::holds_alternative<FetchUnavailable>(outcome)) {
        return deny(std::move(session), kReasonUnavailable);
    }
    if (std::holds_alternative<FetchUnknownUser>(outcome)) {
        session.dummy = true;
        session.expected_digest.reset();
    } else {
        const auto& fetched = std::get<FetchedShares>(outcome);
        try {
            session.expected_digest = recombine_shares(fetched.shares);
        } catch (const ShareSetError&) {
            // The stores disagree; treat like an operational failure.
            return deny(std::move(session), kReasonUnavailable);
        }
    }
    session.stage = GatewayStage::AwaitResponse;
    Message challenge = MsgChallenge{to_hex(session.server_nonce.bytes)};
    return {std::move(session), {EffectReply{std::move(challenge)}}};
}

std::vector<std::optional<Message>> PeerTransport::round_trip_all(const Message& request) {
    std::vector<std::optional<Message>> replies;
    replies.reserve(peer_count());
    for (std::size_t i = 0; i < peer_count(); ++i) {
        replies.push_back(round_trip(i, request));
    }
    return replies;
}

GatewayCore::GatewayCore(std::uint32_t n, SplitMode mode, ShareStore& local_store,
                         PeerTransport& peers, RandomSource& rng)
    : n_(n), mode_(mode), local_store_(local_store), peers_(peers), rng_(rng) {
    if (n_ < 1 || n_ != peers_.peer_count() + 1) {
        throw std::invalid_argument("gateway requires n = peer count + 1");
    }
}

std::vector<Message> GatewayCore::on_message(std::optional<GatewaySession>& session,
                                             const Message& message) {
    GatewayResult result = gateway_on_client_message(std::move(session), message, rng_);
    session = std::move(result.session);

    std::vector<Message> replies;
    for (GatewayEffect& effect : result.effects) {
        if (auto* reply = std::get_if<EffectReply>(&effect)) {
            replies.push_back(std::move(reply->message));
        } else if (auto* store = std::get_if<EffectSplitAndStore>(&effect)) {
            replies.push_back(gateway_register_reply(do_register(store->username, store->digest)));
        } else if (auto* fetch = std::get_if<EffectFetchShares>(&effect)) {
            GatewayResult after = gateway_on_shares(std::move(*session), do_fetch(fetch->username));
            session = std::move(after.session);
            for (GatewayEffect& e : after.effects) {
                replies.push_back(std::move(std::get<EffectReply>(e).message));
            }
        }
    }
    return replies;
}

RegisterOutcome GatewayCore::do_register(const std::string& username,
                                         const PasswordDigest& digest) {
    std::lock_guard lock(register_mutex_);

    if (local_store_.get(username)) {
        return RegisterOutcome::Exists;
    }

    std::vector<DigestShare> shares;
    try {
        shares = split_digest(digest, n_, mode_, rng_);
    } catch (const std::invalid_argument&) {
        return RegisterOutcome::Unavailable;
    }

    // Share index 1 lives on the gateway itself; peer i-1 holds index i.
    try {
        if (local_store_.put(username, shares[0]) == StorePutResult::Conflict) {
            return RegisterOutcome::Exists;
        }
    } catch (const StoreError&) {
        return RegisterOutcome::Unavailable;
    }

    // All-or-nothing: a failure at peer k rolls back the local share and the
    // shares already accepted by peers < k.
    auto compensate = [&](std::size_t stored_peers) {
        try {
            local_store_.del(username);
        } catch (const StoreError&) {
        }
        for (std::size_t i = 0; i < stored_peers; ++i) {
            peers_.round_trip(i, MsgShareDel{username});
        }
    };

    for (std::size_t i = 0; i + 1 < n_; ++i) {
        Message request = MsgSharePut{username, shares[i + 1].index, shares[i + 1].total,
                                      shares[i + 1].mode, to_hex(shares[i + 1].payload)};
        std::optional<Message> reply = peers_.round_trip(i, request);
        if (reply && std::holds_alternative<MsgSharePutOk>(*reply)) {
            continue;
        }
        compensate(i);
        if (reply && std::holds_alternative<MsgSharePutErr>(*reply) &&
            std::get<MsgSharePutErr>(*reply).reason == "exists") {
            return RegisterOutcome::Exists;
        }
        return RegisterOutcome::Aborted;
    }
    return RegisterOutcome::Ok;
}

FetchOutcome GatewayCore::do_fetch(const std::string& username) {
    std::optional<DigestShare> local;
    try {
        local = local_store_.get(username);
    } catch (const StoreError&) {
        return FetchUnavailable{};
    }

    // Peers are asked even when the local share is absent so an unknown
    // username takes the same path as a known one.
    std::vector<std::optional<Message>> replies = peers_.round_trip_all(MsgShareGet{username});

    bool any_missing = !local.has_value();
    std::vector<DigestShare> shares;
    if (local) {
        shares.push_back(std::move(*local));
    }
    for (const auto& reply : replies) {
        if (!reply) {
            return FetchUnavailable{};
        }
        if (const auto* data = std::get_if<MsgShareData>(&*reply)) {
            shares.push_back(share_from_message(*data));
        } else if (std::holds_alternative<MsgShareMissing>(*reply)) {
            any_missing = true;
        } else {
            return FetchUnavailable{};
        }
    }
    if (any_missing) {
        return FetchUnknownUser{};
    }
    return FetchedShares{std::move(shares)};
}

} // namespace splitauth
