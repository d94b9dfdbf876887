#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "splitauth/frame.hpp"
#include "splitauth/hex.hpp"
#include "splitauth/net.hpp"
#include "splitauth/sim.hpp"
#include "testutil.hpp"

using namespace splitauth;
using testutil::NodeRunner;
using testutil::TempDir;

namespace {

NodeConfig shareserver_config(const std::string& store_path,
                              std::optional<std::uint64_t> seed = std::nullopt) {
    NodeConfig cfg;
    cfg.role = NodeRole::ShareServer;
    cfg.listen = {"127.0.0.1", 0};
    cfg.store_path = store_path;
    cfg.seed = seed;
    return cfg;
}

NodeConfig gateway_config(const std::string& store_path, std::vector<Endpoint> peers,
                          SplitMode mode = SplitMode::Segment,
                          std::optional<std::uint64_t> seed = std::nullopt) {
    NodeConfig cfg;
    cfg.role = NodeRole::Gateway;
    cfg.listen = {"127.0.0.1", 0};
    cfg.peers = std::move(peers);
    cfg.mode = mode;
    cfg.store_path = store_path;
    cfg.fetch_timeout_ms = 500;
    cfg.seed = seed;
    return cfg;
}

/// Scripted TCP client that keeps the raw frame bytes of everything it sends
/// and receives, for wire-level assertions.
class RawClient {
public:
    explicit RawClient(const Endpoint& gateway)
        : stream_(TcpStream::connect(gateway, 2000)) {
        stream_.set_recv_timeout(5000);
    }

    Message exchange(const Message& request) {
        auto frame = encode_frame(request);
        frames_.push_back({Direction::ClientToGateway, frame});
        stream_.send_all(frame);
        return read_reply();
    }

    Message read_reply() {
        while (true) {
            DecodeResult r = decode_frame(buffer_);
            if (r.status == DecodeStatus::Ok) {
                frames_.push_back(
                    {Direction::GatewayToClient,
                     {buffer_.begin(), buffer_.begin() + static_cast<long>(r.consumed)}});
                buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(r.consumed));
                return std::move(*r.message);
            }
            REQUIRE(r.status == DecodeStatus::Incomplete);
            std::uint8_t chunk[4096];
            std::size_t n = stream_.recv_some(chunk);
            REQUIRE(n > 0);
            buffer_.insert(buffer_.end(), chunk, chunk + n);
        }
    }

    bool register_user(const std::string& username, const std::string& password) {
        auto [session, msg] = client_start_register(username, password);
        ClientResult r = client_on_message(std::move(session), exchange(msg));
        return r.event == ClientEvent::Registered;
    }

    struct Login {
        bool success = false;
        std::string reason;
        std::optional<SessionKey> key;
    };

    Login login(const std::string& username, const std::string& password, RandomSource& rng,
                bool logout_after = false) {
        auto [session, msg] = client_start_login(username, password, rng);
        ClientResult r = client_on_message(std::move(session), exchange(msg));
        if (r.reply) {
            r = client_on_message(std::move(r.session), exchange(*r.reply));
        }
        Login out;
        out.success = r.event == ClientEvent::LoginSucceeded;
        out.reason = r.reason;
        out.key = r.session.session_key;
        if (out.success && logout_after) {
            exchange(MsgLogout{});
        }
        return out;
    }

    const Transcript& frames() const { return frames_; }
    TcpStream& stream() { return stream_; }

private:
    TcpStream stream_;
    std::vector<std::uint8_t> buffer_;
    Transcript frames_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("two-node deployment: register then login succeeds") {
    TempDir dir;
    NodeRunner ss(shareserver_config(dir.file("ss.jsonl")));
    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss.endpoint()}));

    RawClient client(gw.endpoint());
    REQUIRE(client.register_user("Alex", "0504"));

    SystemRandomSource rng;
    auto login = client.login("Alex", "0504", rng, true);
    CHECK(login.success);
    CHECK(login.key.has_value());

    auto bad = client.login("Alex", "6451", rng);
    CHECK_FALSE(bad.success);
    CHECK(bad.reason == "invalid");
}

TEST_CASE("no single store file holds a complete digest for n=2") {
    TempDir dir;
    NodeRunner ss(shareserver_config(dir.file("ss.jsonl")));
    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss.endpoint()}));

    RawClient client(gw.endpoint());
    REQUIRE(client.register_user("Alex", "0504"));

    std::string digest_hex = to_hex(compute_digest("0504").bytes);
    std::string gw_file = read_file(dir.file("gw.jsonl"));
    std::string ss_file = read_file(dir.file("ss.jsonl"));
    CHECK(gw_file.find(digest_hex) == std::string::npos);
    CHECK(ss_file.find(digest_hex) == std::string::npos);
    // each holds exactly its half
    CHECK(gw_file.find(digest_hex.substr(0, 32)) != std::string::npos);
    CHECK(ss_file.find(digest_hex.substr(32)) != std::string::npos);
}

TEST_CASE("share server down yields unavailable, not invalid") {
    TempDir dir;
    NodeRunner ss(shareserver_config(dir.file("ss.jsonl")));
    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss.endpoint()}));

    {
        RawClient client(gw.endpoint());
        REQUIRE(client.register_user("Alex", "0504"));
    }
    ss.stop();

    RawClient client(gw.endpoint());
    SystemRandomSource rng;
    auto login = client.login("Alex", "0504", rng);
    CHECK_FALSE(login.success);
    CHECK(login.reason == "unavailable");
}

TEST_CASE("stores are durable across node restarts") {
    TempDir dir;
    SystemRandomSource rng;
    NodeRunner ss(shareserver_config(dir.file("ss.jsonl")));

    {
        NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss.endpoint()}));
        RawClient client(gw.endpoint());
        REQUIRE(client.register_user("Alex", "0504"));
    }

    // gateway alone restarted
    {
        NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss.endpoint()}));
        RawClient client(gw.endpoint());
        CHECK(client.login("Alex", "0504", rng).success);
    }

    // then the share server as well
    ss.stop();
    NodeRunner ss2(shareserver_config(dir.file("ss.jsonl")));
    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss2.endpoint()}));
    RawClient client(gw.endpoint());
    CHECK(client.login("Alex", "0504", rng).success);
}

TEST_CASE("binding an occupied port is a startup error") {
    TempDir dir;
    NodeRunner first(shareserver_config(dir.file("a.jsonl")));

    NodeConfig clash = shareserver_config(dir.file("b.jsonl"));
    clash.listen = {"127.0.0.1", first.port()};
    Node node(clash);
    CHECK_THROWS_AS(node.start(), NetError);
}

TEST_CASE("single-server baseline works without peers") {
    TempDir dir;
    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {}));
    RawClient client(gw.endpoint());
    REQUIRE(client.register_user("Alex", "0504"));

    // the full digest lives in the one store, by construction
    std::string digest_hex = to_hex(compute_digest("0504").bytes);
    CHECK(read_file(dir.file("gw.jsonl")).find(digest_hex) != std::string::npos);

    SystemRandomSource rng;
    CHECK(client.login("Alex", "0504", rng).success);
}

TEST_CASE("registration against a dead peer aborts and is retryable") {
    TempDir dir;
    std::uint16_t dead_port;
    {
        TcpListener probe = TcpListener::bind({"127.0.0.1", 0});
        dead_port = probe.port();
        probe.stop();
    }

    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {{"127.0.0.1", dead_port}}));
    {
        RawClient client(gw.endpoint());
        auto [session, msg] = client_start_register("Alex", "0504");
        ClientResult r = client_on_message(std::move(session), client.exchange(msg));
        CHECK(r.event == ClientEvent::RegistrationFailed);
        CHECK(r.reason == "registration aborted");
    }
    // compensation removed the local share
    CHECK(read_file(dir.file("gw.jsonl")).find("\"op\":\"del\"") != std::string::npos);

    NodeRunner ss(shareserver_config(dir.file("ss.jsonl")));
    NodeRunner gw2(gateway_config(dir.file("gw2.jsonl"), {ss.endpoint()}));
    RawClient client(gw2.endpoint());
    CHECK(client.register_user("Alex", "0504"));
}

TEST_CASE("malformed frame is connection-fatal") {
    TempDir dir;
    NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {}));

    TcpStream stream = TcpStream::connect(gw.endpoint(), 2000);
    stream.set_recv_timeout(2000);
    std::vector<std::uint8_t> garbage = {0x00, 0x00, 0x00, 0x02, '{', '!'};
    stream.send_all(garbage);

    std::uint8_t buf[16];
    CHECK(stream.recv_some(buf) == 0); // server closed without replying
}

TEST_CASE("simulation and networked node emit identical frame sequences") {
    const std::uint64_t master = 20260809;

    for (SplitMode mode : {SplitMode::Segment, SplitMode::Xor}) {
        CAPTURE(split_mode_name(mode));

        // --- real deployment, seeded like the sim ---
        TempDir dir;
        NodeRunner ss(shareserver_config(dir.file("ss.jsonl"), derive_seed(master, 1)));
        NodeRunner gw(gateway_config(dir.file("gw.jsonl"), {ss.endpoint()}, mode,
                                     derive_seed(master, 0)));

        RawClient client(gw.endpoint());
        DeterministicRandomSource client_rng(derive_seed(master, 1000));
        REQUIRE(client.register_user("Alex", "0504"));
        REQUIRE(client.register_user("Rony", "6451"));
        REQUIRE(client.login("Alex", "0504", client_rng, true).success);
        REQUIRE_FALSE(client.login("Alex", "6451", client_rng).success);

        // --- simulated deployment, same seeds, same script ---
        SimCluster sim(2, mode, master);
        REQUIRE(sim.register_user("Alex", "0504"));
        REQUIRE(sim.register_user("Rony", "6451"));
        REQUIRE(sim.login("Alex", "0504", true).success);
        REQUIRE_FALSE(sim.login("Alex", "6451", true).success);

        Transcript sim_frames = sim.client_frames();
        const Transcript& real_frames = client.frames();
        REQUIRE(sim_frames.size() == real_frames.size());
        for (std::size_t i = 0; i < sim_frames.size(); ++i) {
            CAPTURE(i);
            CHECK(sim_frames[i].dir == real_frames[i].dir);
            CHECK(to_hex(sim_frames[i].frame) == to_hex(real_frames[i].frame));
        }
    }
}
