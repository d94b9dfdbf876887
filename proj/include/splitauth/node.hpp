#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "splitauth/gateway.hpp"
#include "splitauth/net.hpp"
#include "splitauth/shareserver.hpp"
#include "splitauth/store.hpp"

namespace splitauth {

enum class NodeRole {
    Gateway,
    ShareServer,
};

constexpr int kDefaultFetchTimeoutMs = 2000;

struct NodeConfig {
    NodeRole role = NodeRole::ShareServer;
    Endpoint listen;
    std::vector<Endpoint> peers; // gateway only, ordered; list position k holds share index k+2
    SplitMode mode = SplitMode::Segment;
    std::string store_path;
    int fetch_timeout_ms = kDefaultFetchTimeoutMs;
    std::optional<std::uint64_t> seed; // deterministic rng when set

    /// n = peer count + 1; the gateway itself holds share index 1.
    std::uint32_t n() const { return static_cast<std::uint32_t>(peers.size()) + 1; }

    /// Throws std::invalid_argument on an inconsistent config.
    void validate() const;
};

/// One service process: a gateway (client-facing, fans out to share servers)
/// or a share server. Connections are served on their own threads; the share
/// store serializes writes internally.
class Node {
public:
    explicit Node(NodeConfig config);
    ~Node();

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    /// Opens the store and binds the listener. Throws on failure.
    void start();

    /// Accept loop; returns after stop().
    void serve();

    /// Wakes serve(), closes live connections, joins handler threads.
    void stop();

    std::uint16_t port() const;
    ShareStore& store();

private:
    void handle_connection(TcpStream stream);
    void handle_gateway(FramedConnection& conn);
    void handle_shareserver(FramedConnection& conn);

    NodeConfig config_;
    std::unique_ptr<FileShareStore> store_;
    std::unique_ptr<RandomSource> rng_;
    std::unique_ptr<PeerTransport> peer_transport_;
    std::unique_ptr<GatewayCore> gateway_;
    TcpListener listener_;

    std::atomic<bool> stopping_{false};
    std::mutex threads_mutex_;
    std::vector<std::thread> threads_;
    std::vector<int> live_fds_;
};

/// Spec entry point: start and serve forever (until stop() from a signal
/// handler or another thread).
void run_node(const NodeConfig& config);

} // namespace splitauth
