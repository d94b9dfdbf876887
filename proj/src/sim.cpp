#include "splitauth/sim.hpp"

#include <stdexcept>

#include "splitauth/frame.hpp"
#include "splitauth/hex.hpp"
#include "splitauth/shareserver.hpp"

namespace splitauth {

/// Direct dispatch to the in-memory share servers; every exchange is encoded
/// to frames and logged so the log carries real wire bytes.
class SimCluster::LoggingPeerTransport final : public PeerTransport {
public:
    LoggingPeerTransport(SimCluster& cluster) : cluster_(cluster) {}

    std::size_t peer_count() const override { return cluster_.n_ - 1; }

    std::optional<Message> round_trip(std::size_t peer_index, const Message& request) override {
        std::string link = "peer/" + std::to_string(peer_index + 1);
        cluster_.log_.push_back({link, true, encode_frame(request)});
        Message reply =
            shareserver_on_message(request, *cluster_.stores_[peer_index + 1]);
        cluster_.log_.push_back({link, false, encode_frame(reply)});
        return reply;
    }

private:
    SimCluster& cluster_;
};

SimCluster::SimCluster(std::uint32_t n, SplitMode mode, std::uint64_t seed)
    : n_(n), mode_(mode) {
    for (std::uint32_t i = 0; i < n_; ++i) {
        stores_.push_back(std::make_unique<MemoryShareStore>());
    }
    // Actor seeds mirror the networked demo: node k uses label k, the honest
    // client label 1000, the adversary label 2000.
    gateway_rng_ = std::make_unique<DeterministicRandomSource>(derive_seed(seed, 0));
    client_rng_ = std::make_unique<DeterministicRandomSource>(derive_seed(seed, 1000));
    attacker_rng_ = std::make_unique<DeterministicRandomSource>(derive_seed(seed, 2000));
    peers_ = std::make_unique<LoggingPeerTransport>(*this);
    gateway_ = std::make_unique<GatewayCore>(n_, mode_, *stores_[0], *peers_, *gateway_rng_);
    open_connection(); // connection 0 for the scripted client
}

SimCluster::~SimCluster() = default;

std::size_t SimCluster::open_connection() {
    std::size_t id = next_conn_++;
    sessions_[id] = std::nullopt;
    closed_[id] = false;
    return id;
}

void SimCluster::close_connection(std::size_t conn) {
    closed_[conn] = true;
    sessions_.erase(conn);
}

bool SimCluster::connection_closed(std::size_t conn) const {
    auto it = closed_.find(conn);
    return it == closed_.end() || it->second;
}

std::vector<std::vector<std::uint8_t>> SimCluster::send_raw(
    std::size_t conn, std::span<const std::uint8_t> frame) {
    if (connection_closed(conn)) {
        throw std::logic_error("send_raw on a closed sim connection");
    }
    std::string link = "client/" + std::to_string(conn);
    log_.push_back({link, true, {frame.begin(), frame.end()}});

    DecodeResult decoded = decode_frame(frame);
    if (decoded.status != DecodeStatus::Ok || decoded.consumed != frame.size()) {
        closed_[conn] = true; // malformed input is connection-fatal
        return {};
    }

    std::vector<Message> replies = gateway_->on_message(sessions_[conn], *decoded.message);
    std::vector<std::vector<std::uint8_t>> out;
    out.reserve(replies.size());
    for (const Message& reply : replies) {
        auto bytes = encode_frame(reply);
        log_.push_back({link, false, bytes});
        out.push_back(std::move(bytes));
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> SimCluster::deliver(std::size_t conn,
                                                           const Message& message,
                                                           Transcript* transcript) {
    auto frame = encode_frame(message);
    if (transcript) transcript->push_back({Direction::ClientToGateway, frame});
    auto replies = send_raw(conn, frame);
    if (transcript) {
        for (const auto& reply : replies) {
            transcript->push_back({Direction::GatewayToClient, reply});
        }
    }
    return replies;
}

namespace {

Message decode_reply(const std::vector<std::uint8_t>& frame) {
    DecodeResult r = decode_frame(frame);
    if (r.status != DecodeStatus::Ok) {
        throw std::logic_error("sim gateway produced an undecodable frame");
    }
    return std::move(*r.message);
}

} // namespace

bool SimCluster::register_user(const std::string& username, const std::string& password) {
    auto [session, msg] = client_start_register(username, password);
    auto replies = deliver(0, msg, nullptr);
    if (replies.size() != 1) return false;
    ClientResult r = client_on_message(std::move(session), decode_reply(replies[0]));
    if (r.event == ClientEvent::Registered) {
        passwords_[username] = password;
        return true;
    }
    return false;
}

SimCluster::LoginOutcome SimCluster::login(const std::string& username,
                                           const std::string& password, bool logout_after) {
    LoginOutcome outcome;
    auto [session, login_msg] = client_start_login(username, password, *client_rng_);

    auto replies = deliver(0, login_msg, &outcome.transcript);
    if (replies.size() != 1) {
        outcome.fail_reason = "no reply";
        return outcome;
    }
    ClientResult r = client_on_message(std::move(session), decode_reply(replies[0]));
    if (r.reply) {
        // challenge response
        replies = deliver(0, *r.reply, &outcome.transcript);
        if (replies.size() != 1) {
            outcome.fail_reason = "no reply";
            return outcome;
        }
        r = client_on_message(std::move(r.session), decode_reply(replies[0]));
    }

    if (r.event == ClientEvent::LoginSucceeded) {
        outcome.success = true;
        outcome.client_key = r.session.session_key;
        const auto& gw_session = sessions_[0];
        if (gw_session && gw_session->stage == GatewayStage::Granted) {
            outcome.gateway_key = gw_session->session_key;
        }
        if (logout_after) {
            auto logout_replies = deliver(0, MsgLogout{}, nullptr);
            if (logout_replies.size() == 1) {
                client_on_message(std::move(r.session), decode_reply(logout_replies[0]));
            }
        }
    } else {
        outcome.fail_reason = r.reason;
    }
    return outcome;
}

const ShareStore& SimCluster::node_store(std::size_t node_index) const {
    return *stores_.at(node_index);
}

std::optional<std::string> SimCluster::true_password(const std::string& username) const {
    auto it = passwords_.find(username);
    if (it == passwords_.end()) return std::nullopt;
    return it->second;
}

std::string SimCluster::log_to_string() const {
    std::string out;
    for (const SimLogEntry& e : log_) {
        out += e.link;
        out += e.to_server ? " > " : " < ";
        out += to_hex(e.frame);
        out += '\n';
    }
    return out;
}

Transcript SimCluster::client_frames() const {
    Transcript t;
    for (const SimLogEntry& e : log_) {
        if (e.link == "client/0") {
            t.push_back({e.to_server ? Direction::ClientToGateway : Direction::GatewayToClient,
                         e.frame});
        }
    }
    return t;
}

} // namespace splitauth
