#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "splitauth/core.hpp"
#include "splitauth/message.hpp"
#include "splitauth/rng.hpp"
#include "splitauth/store.hpp"

namespace splitauth {

enum class GatewayStage {
    AwaitShares,
    AwaitResponse,
    Granted,
    Denied,
};

/// Per-login gateway state. The server nonce is drawn exactly once, when the
/// Login message creates the session. dummy marks a decoy session for an
/// unknown username: it follows the same message shape but can never grant.
struct GatewaySession {
    GatewayStage stage = GatewayStage::AwaitShares;
    std::string username;
    Nonce client_nonce;
    Nonce server_nonce;
    std::optional<PasswordDigest> expected_digest;
    bool dummy = false;
    std::optional<SessionKey> session_key; // set on grant
};

// Effects the runtime executes against stores and peers. Replies go to the
// connected client in list order.
struct EffectReply {
    Message message;
};
struct EffectSplitAndStore {
    std::string username;
    PasswordDigest digest;
};
struct EffectFetchShares {
    std::string username;
};
using GatewayEffect = std::variant<EffectReply, EffectSplitAndStore, EffectFetchShares>;

struct GatewayResult {
    std::optional<GatewaySession> session;
    std::vector<GatewayEffect> effects;
};

/// Sans-I/O gateway transition for one client message. A session in stage
/// Denied counts as inactive; a new Login may replace it.
GatewayResult gateway_on_client_message(std::optional<GatewaySession> session,
                                        const Message& message, RandomSource& rng);

enum class RegisterOutcome {
    Ok,
    Exists,      // username already registered
    Aborted,     // partial failure, compensated
    Unavailable, // storage failure
};

/// Maps the SplitAndStore outcome to the client reply.
Message gateway_register_reply(RegisterOutcome outcome);

struct FetchedShares {
    std::vector<DigestShare> shares;
};
struct FetchUnknownUser {};
struct FetchUnavailable {};
using FetchOutcome = std::variant<FetchedShares, FetchUnknownUser, FetchUnavailable>;

/// Completes the FetchShares effect: recombines into the expected digest (or
/// marks the session dummy) and issues the Challenge.
GatewayResult gateway_on_shares(GatewaySession session, const FetchOutcome& outcome);

/// Gateway's channel to its ordered share-server peers.
class PeerTransport {
public:
    virtual ~PeerTransport() = default;

    virtual std::size_t peer_count() const = 0;

    /// One request/reply exchange with peer `peer_index` (0-based). Returns
    /// nullopt when the peer is unreachable or times out.
    virtual std::optional<Message> round_trip(std::size_t peer_index, const Message& request) = 0;

    /// Same request to every peer; result i corresponds to peer i. The default
    /// asks peers in order; the networked runtime overrides it to fan out in
    /// parallel.
    virtual std::vector<std::optional<Message>> round_trip_all(const Message& request);
};

/// Shared gateway runtime used by both the networked node and the in-process
/// simulation: drives the pure state machine and executes its effects against
/// the local store and the peer transport. One instance per gateway; call
/// on_message once at a time per connection.
class GatewayCore {
public:
    GatewayCore(std::uint32_t n, SplitMode mode, ShareStore& local_store, PeerTransport& peers,
                RandomSource& rng);

    /// Processes one client message for one connection's session slot and
    /// returns the replies to send, in order.
    std::vector<Message> on_message(std::optional<GatewaySession>& session,
                                    const Message& message);

    RegisterOutcome do_register(const std::string& username, const PasswordDigest& digest);
    FetchOutcome do_fetch(const std::string& username);

    std::uint32_t n() const { return n_; }
    SplitMode mode() const { return mode_; }

private:
    std::uint32_t n_;
    SplitMode mode_;
    ShareStore& local_store_;
    PeerTransport& peers_;
    RandomSource& rng_;
    std::mutex register_mutex_; // serializes multi-node registrations
};

} // namespace splitauth
