#include "splitauth/repl.hpp"

#include <stdlib.h>
#include <termios.h>
#include <unistd.h>

#include <filesystem>
#include <istream>
#include <ostream>
#include <thread>

#include "splitauth/client.hpp"
#include "splitauth/node.hpp"

namespace splitauth {

namespace {

constexpr const char* kBanner = "Welcome to the system. Kindly register to login.";
constexpr const char* kOptionsLoggedOut = "Options: register/login/logout";
constexpr const char* kOptionsLoggedIn = "Options: logout";
constexpr const char* kInvalid = "Invalid username or password";
constexpr const char* kUnavailable = "Service unavailable";

class TtyEchoGuard {
public:
    explicit TtyEchoGuard(bool disable) {
        if (disable && ::isatty(STDIN_FILENO)) {
            if (::tcgetattr(STDIN_FILENO, &saved_) == 0) {
                termios t = saved_;
                t.c_lflag &= ~static_cast<tcflag_t>(ECHO);
                if (::tcsetattr(STDIN_FILENO, TCSANOW, &t) == 0) {
                    active_ = true;
                }
            }
        }
    }
    ~TtyEchoGuard() {
        if (active_) ::tcsetattr(STDIN_FILENO, TCSANOW, &saved_);
    }

private:
    termios saved_{};
    bool active_ = false;
};

struct ReplIo {
    std::istream& in;
    std::ostream& out;
    const ReplOptions& options;

    /// Prints a prompt and reads one line; echoes it per options.
    std::optional<std::string> ask(const std::string& prompt, bool secret = false) {
        out << prompt << std::flush;
        std::string line;
        {
            TtyEchoGuard guard(secret && options.mask_password);
            if (!std::getline(in, line)) return std::nullopt;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (options.echo_input) {
            if (secret && options.mask_password) {
                out << "\n";
            } else {
                out << line << "\n";
            }
        } else if (secret && options.mask_password && ::isatty(STDIN_FILENO)) {
            out << "\n"; // terminal echo was off; finish the prompt line
        }
        return line;
    }
};

/// One request/reply step; throws NetError on transport failure.
Message request_reply(FramedConnection& conn, const Message& request) {
    conn.write_message(request);
    auto reply = conn.read_message();
    if (!reply) {
        throw NetError("gateway closed the connection");
    }
    return std::move(*reply);
}

} // namespace

int repl(std::istream& in, std::ostream& out, const ReplOptions& options) {
    std::unique_ptr<RandomSource> rng;
    if (options.seed) {
        rng = std::make_unique<DeterministicRandomSource>(*options.seed);
    } else {
        rng = std::make_unique<SystemRandomSource>();
    }

    std::optional<FramedConnection> conn;
    try {
        TcpStream stream = TcpStream::connect(options.gateway, options.connect_timeout_ms);
        stream.set_recv_timeout(options.reply_timeout_ms);
        conn.emplace(std::move(stream));
    } catch (const NetError&) {
        out << kUnavailable << "\n";
        return 1;
    }

    ReplIo io{in, out, options};
    out << kBanner << "\n" << kOptionsLoggedOut << "\n";

    std::optional<std::string> logged_in;
    std::optional<SessionKey> session_key; // held, never printed

    try {
        while (true) {
            std::string prompt = logged_in ? *logged_in + " > " : "> ";
            auto command = io.ask(prompt);
            if (!command) break; // end of input exits

            if (logged_in) {
                if (*command == "logout") {
                    Message reply = request_reply(*conn, MsgLogout{});
                    (void)reply; // LogoutOk
                    out << "Logging out...\n";
                    logged_in.reset();
                    session_key.reset();
                } else {
                    out << kOptionsLoggedIn << "\n";
                }
                continue;
            }

            if (*command == "register") {
                auto username = io.ask("New username: ");
                if (!username) break;
                auto password = io.ask("New password: ", true);
                if (!password) break;
                out << "Creating account...\n";

                ClientSession session;
                Message request;
                try {
                    std::tie(session, request) = client_start_register(*username, *password);
                } catch (const std::invalid_argument&) {
                    out << kInvalid << "\n";
                    continue;
                }
                ClientResult r = client_on_message(std::move(session),
                                                   request_reply(*conn, request));
                if (r.event == ClientEvent::Registered) {
                    out << "Account has been created\n";
                } else if (r.reason == "username already exists") {
                    out << "Username already exists\n";
                } else {
                    out << kUnavailable << "\n";
                }
            } else if (*command == "login") {
                auto username = io.ask("Username: ");
                if (!username) break;
                auto password = io.ask("Password: ", true);
                if (!password) break;

                ClientSession session;
                Message request;
                try {
                    std::tie(session, request) = client_start_login(*username, *password, *rng);
                } catch (const std::invalid_argument&) {
                    out << kInvalid << "\n";
                    continue;
                }
                ClientResult r =
                    client_on_message(std::move(session), request_reply(*conn, request));
                if (r.reply) {
                    r = client_on_message(std::move(r.session), request_reply(*conn, *r.reply));
                }

                if (r.event == ClientEvent::LoginSucceeded) {
                    out << "Login successful\n";
                    out << "Welcome to your account " << *username << "\n";
                    out << kOptionsLoggedIn << "\n";
                    logged_in = *username;
                    session_key = r.session.session_key;
                } else if (r.reason == "unavailable") {
                    out << kUnavailable << "\n";
                } else {
                    out << kInvalid << "\n";
                }
            } else {
                out << kOptionsLoggedOut << "\n";
            }
        }
    } catch (const NetError&) {
        out << kUnavailable << "\n";
        return 1;
    }
    return 0;
}

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "splitauth-demo-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (::mkdtemp(buf.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

} // namespace

int run_demo(const DemoOptions& options, std::istream& in, std::ostream& out,
             std::ostream& diag) {
    if (options.n < 1 || (options.mode == SplitMode::Segment && options.n > 32)) {
        diag << "demo: n out of range for mode\n";
        return 2;
    }

    TempDir dir;
    std::vector<std::unique_ptr<Node>> nodes;
    std::vector<std::thread> threads;

    auto shutdown = [&] {
        for (auto& node : nodes) node->stop();
        for (auto& t : threads) {
            if (t.joinable()) t.join();
        }
    };

    try {
        std::vector<Endpoint> peer_endpoints;
        for (std::uint32_t i = 1; i < options.n; ++i) {
            NodeConfig cfg;
            cfg.role = NodeRole::ShareServer;
            cfg.listen = {"127.0.0.1", 0};
            cfg.mode = options.mode;
            cfg.store_path = (dir.path / ("share" + std::to_string(i) + ".jsonl")).string();
            cfg.seed = derive_seed(options.seed, i);
            nodes.push_back(std::make_unique<Node>(cfg));
            nodes.back()->start();
            peer_endpoints.push_back({"127.0.0.1", nodes.back()->port()});
        }

        NodeConfig gw;
        gw.role = NodeRole::Gateway;
        gw.listen = {"127.0.0.1", 0};
        gw.peers = peer_endpoints;
        gw.mode = options.mode;
        gw.store_path = (dir.path / "gateway.jsonl").string();
        gw.seed = derive_seed(options.seed, 0);
        nodes.push_back(std::make_unique<Node>(gw));
        nodes.back()->start();
        Endpoint gateway_endpoint{"127.0.0.1", nodes.back()->port()};

        for (auto& node : nodes) {
            threads.emplace_back([&node] { node->serve(); });
        }

        diag << "demo cluster up: gateway " << gateway_endpoint.to_string() << ", n="
             << options.n << ", mode=" << split_mode_name(options.mode) << "\n";

        ReplOptions repl_options;
        repl_options.gateway = gateway_endpoint;
        repl_options.echo_input = options.echo_input;
        repl_options.mask_password = options.mask_password;
        repl_options.seed = derive_seed(options.seed, 1000);

        int rc = repl(in, out, repl_options);
        shutdown();
        return rc;
    } catch (const std::exception& e) {
        diag << "demo: " << e.what() << "\n";
        shutdown();
        return 2;
    }
}

} // namespace splitauth
