#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitauth/client.hpp"
#include "splitauth/gateway.hpp"
#include "splitauth/store.hpp"

namespace splitauth {

enum class Direction {
    ClientToGateway,
    GatewayToClient,
};

struct TranscriptEntry {
    Direction dir;
    std::vector<std::uint8_t> frame;
};

/// Ordered frames of one client<->gateway exchange.
using Transcript = std::vector<TranscriptEntry>;

struct SimLogEntry {
    std::string link; // "client/<conn>" or "peer/<k>"
    bool to_server;   // true: towards gateway/share server
    std::vector<std::uint8_t> frame;
};

/// Deterministic in-process deployment: the same gateway core, share-server
/// handler and wire codec as the networked node, with in-memory stores and a
/// single seeded random source per actor. FIFO delivery, no loss, one message
/// in flight at a time.
class SimCluster {
public:
    SimCluster(std::uint32_t n, SplitMode mode, std::uint64_t seed);
    ~SimCluster();

    SimCluster(const SimCluster&) = delete;
    SimCluster& operator=(const SimCluster&) = delete;

    std::uint32_t n() const { return n_; }
    SplitMode mode() const { return mode_; }

    // --- scripted honest client (connection 0, like the interactive client) ---

    bool register_user(const std::string& username, const std::string& password);

    struct LoginOutcome {
        bool success = false;
        std::string fail_reason;
        std::optional<SessionKey> client_key;
        std::optional<SessionKey> gateway_key;
        Transcript transcript; // the login exchange only
    };
    LoginOutcome login(const std::string& username, const std::string& password,
                       bool logout_after = true);

    // --- raw adversarial access ---

    std::size_t open_connection();
    /// Delivers one raw frame; returns the gateway's reply frames. A frame the
    /// gateway cannot decode closes the connection (empty reply, closed flag).
    /// Throws std::logic_error when the connection is already closed.
    std::vector<std::vector<std::uint8_t>> send_raw(std::size_t conn,
                                                    std::span<const std::uint8_t> frame);
    /// Drops the connection and its session, like a TCP close.
    void close_connection(std::size_t conn);
    bool connection_closed(std::size_t conn) const;

    RandomSource& attacker_rng() { return *attacker_rng_; }

    // --- harness introspection (not part of the protocol surface) ---

    const ShareStore& node_store(std::size_t node_index) const; // 0 = gateway
    std::optional<std::string> true_password(const std::string& username) const;
    const std::vector<SimLogEntry>& log() const { return log_; }
    /// Stable text form of the whole log, for byte-for-byte comparisons.
    std::string log_to_string() const;
    /// Client<->gateway frames for connection 0, in order.
    Transcript client_frames() const;

private:
    class LoggingPeerTransport;

    std::vector<std::vector<std::uint8_t>> deliver(std::size_t conn, const Message& message,
                                                   Transcript* transcript);

    std::uint32_t n_;
    SplitMode mode_;
    std::vector<std::unique_ptr<MemoryShareStore>> stores_; // [0] = gateway local
    std::unique_ptr<RandomSource> gateway_rng_;
    std::unique_ptr<RandomSource> client_rng_;
    std::unique_ptr<RandomSource> attacker_rng_;
    std::unique_ptr<LoggingPeerTransport> peers_;
    std::unique_ptr<GatewayCore> gateway_;
    std::map<std::size_t, std::optional<GatewaySession>> sessions_;
    std::map<std::size_t, bool> closed_;
    std::size_t next_conn_ = 0;
    std::vector<SimLogEntry> log_;
    std::map<std::string, std::string> passwords_; // ground truth for scoring
};

} // namespace splitauth
