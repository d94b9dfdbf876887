#include "splitauth/node.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <future>

namespace splitauth {

namespace {

/// TCP transport to the configured share servers. One connection per
/// exchange; receive timeout doubles as the fetch timeout.
class TcpPeerTransport final : public PeerTransport {
public:
    TcpPeerTransport(std::vector<Endpoint> peers, int timeout_ms)
        : peers_(std::move(peers)), timeout_ms_(timeout_ms) {}

    std::size_t peer_count() const override { return peers_.size(); }

    std::optional<Message> round_trip(std::size_t peer_index, const Message& request) override {
        try {
            TcpStream stream = TcpStream::connect(peers_[peer_index], timeout_ms_);
            stream.set_recv_timeout(timeout_ms_);
            FramedConnection conn(std::move(stream));
            conn.write_message(request);
            return conn.read_message();
        } catch (const NetError&) {
            return std::nullopt;
        }
    }

    std::vector<std::optional<Message>> round_trip_all(const Message& request) override {
        std::vector<std::future<std::optional<Message>>> futures;
        futures.reserve(peers_.size());
        for (std::size_t i = 0; i < peers_.size(); ++i) {
            futures.push_back(std::async(std::launch::async,
                                         [this, i, &request] { return round_trip(i, request); }));
        }
        std::vector<std::optional<Message>> replies;
        replies.reserve(peers_.size());
        for (auto& f : futures) {
            replies.push_back(f.get());
        }
        return replies;
    }

private:
    std::vector<Endpoint> peers_;
    int timeout_ms_;
};

} // namespace

void NodeConfig::validate() const {
    if (role == NodeRole::ShareServer && !peers.empty()) {
        throw std::invalid_argument("share server must have an empty peer list");
    }
    if (role == NodeRole::Gateway && mode == SplitMode::Segment &&
        n() > PasswordDigest::kSize) {
        throw std::invalid_argument("segment mode supports at most 32 servers");
    }
    if (store_path.empty()) {
        throw std::invalid_argument("store path must be set");
    }
    if (fetch_timeout_ms <= 0) {
        throw std::invalid_argument("fetch timeout must be positive");
    }
}

Node::Node(NodeConfig config) : config_(std::move(config)) {
    config_.validate();
}

Node::~Node() {
    stop();
}

void Node::start() {
    store_ = std::make_unique<FileShareStore>(config_.store_path);

    if (config_.seed) {
        rng_ = std::make_unique<SynchronizedRandomSource>(
            std::make_unique<DeterministicRandomSource>(*config_.seed));
    } else {
        rng_ = std::make_unique<SynchronizedRandomSource>(std::make_unique<SystemRandomSource>());
    }

    if (config_.role == NodeRole::Gateway) {
        peer_transport_ =
            std::make_unique<TcpPeerTransport>(config_.peers, config_.fetch_timeout_ms);
        gateway_ = std::make_unique<GatewayCore>(config_.n(), config_.mode, *store_,
                                                 *peer_transport_, *rng_);
    }

    listener_ = TcpListener::bind(config_.listen);
}

std::uint16_t Node::port() const {
    return listener_.port();
}

ShareStore& Node::store() {
    return *store_;
}

void Node::serve() {
    while (!stopping_) {
        std::optional<TcpStream> stream = listener_.accept();
        if (!stream) break;
        std::lock_guard lock(threads_mutex_);
        if (stopping_) break;
        live_fds_.push_back(stream->fd());
        threads_.emplace_back(&Node::handle_connection, this, std::move(*stream));
    }
}

void Node::stop() {
    bool was_stopping = stopping_.exchange(true);
    listener_.stop();
    if (was_stopping) return;
    {
        std::lock_guard lock(threads_mutex_);
        for (int fd : live_fds_) {
            ::shutdown(fd, SHUT_RDWR);
        }
    }
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(threads_mutex_);
        threads.swap(threads_);
    }
    for (std::thread& t : threads) {
        if (t.joinable()) t.join();
    }
}

void Node::handle_connection(TcpStream stream) {
    int fd = stream.fd();
    FramedConnection conn(std::move(stream));
    try {
        if (config_.role == NodeRole::Gateway) {
            handle_gateway(conn);
        } else {
            handle_shareserver(conn);
        }
    } catch (const NetError&) {
        // malformed frame or transport failure: drop the connection
    }
    std::lock_guard lock(threads_mutex_);
    live_fds_.erase(std::remove(live_fds_.begin(), live_fds_.end(), fd), live_fds_.end());
}

void Node::handle_gateway(FramedConnection& conn) {
    std::optional<GatewaySession> session;
    while (auto message = conn.read_message()) {
        for (const Message& reply : gateway_->on_message(session, *message)) {
            conn.write_message(reply);
        }
    }
}

void Node::handle_shareserver(FramedConnection& conn) {
    while (auto message = conn.read_message()) {
        conn.write_message(shareserver_on_message(*message, *store_));
    }
}

void run_node(const NodeConfig& config) {
    Node node(config);
    node.start();
    node.serve();
}

} // namespace splitauth
