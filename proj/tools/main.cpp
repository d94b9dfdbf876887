#include <unistd.h>

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "splitauth/attacks.hpp"
#include "splitauth/node.hpp"
#include "splitauth/repl.hpp"

namespace {

using namespace splitauth;

int cmd_client(const std::string& gateway, bool mask, std::optional<std::uint64_t> seed) {
    ReplOptions options;
    options.gateway = parse_endpoint(gateway);
    options.echo_input = ::isatty(STDIN_FILENO) == 0;
    options.mask_password = mask;
    options.seed = seed;
    return repl(std::cin, std::cout, options);
}

int cmd_serve(const std::string& role, const std::string& listen,
              const std::vector<std::string>& peers, const std::string& mode,
              const std::string& store, int timeout_ms, std::optional<std::uint64_t> seed) {
    NodeConfig config;
    config.role = role == "gateway" ? NodeRole::Gateway : NodeRole::ShareServer;
    config.listen = parse_endpoint(listen);
    for (const std::string& peer : peers) {
        config.peers.push_back(parse_endpoint(peer));
    }
    config.mode = parse_split_mode(mode);
    config.store_path = store;
    config.fetch_timeout_ms = timeout_ms;
    config.seed = seed;

    Node node(config);
    node.start();
    std::cout << "listening on " << config.listen.host << ":" << node.port() << std::endl;
    node.serve();
    return 0;
}

int cmd_demo(std::uint32_t n, const std::string& mode, std::uint64_t seed, bool mask) {
    DemoOptions options;
    options.n = n;
    options.mode = parse_split_mode(mode);
    options.seed = seed;
    options.echo_input = ::isatty(STDIN_FILENO) == 0;
    options.mask_password = mask;
    return run_demo(options, std::cin, std::cout, std::cerr);
}

int cmd_attacklab(std::uint64_t seed, const std::string& dict_path,
                  const std::string& csv_path) {
    std::ifstream in(dict_path);
    if (!in.good()) {
        std::cerr << "attacklab: cannot open dictionary " << dict_path << "\n";
        return 2;
    }
    std::vector<std::string> dictionary;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) dictionary.push_back(line);
    }
    if (dictionary.empty()) {
        std::cerr << "attacklab: dictionary " << dict_path << " is empty\n";
        return 2;
    }

    ComparisonReport report = run_comparison_report(seed, dictionary);
    std::cout << report.text;

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::trunc);
        if (!csv.good()) {
            std::cerr << "attacklab: cannot write " << csv_path << "\n";
            return 2;
        }
        csv << report.csv;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"split-verifier password authentication service, client and attack lab"};
    app.require_subcommand(1);

    std::string gateway;
    bool mask = false;
    std::optional<std::uint64_t> client_seed;
    auto* client = app.add_subcommand("client", "interactive terminal client");
    client->add_option("--gateway", gateway, "gateway HOST:PORT")->required();
    client->add_flag("--mask", mask, "do not echo passwords");
    client->add_option("--seed", client_seed, "deterministic client nonces (testing)");

    std::string role, listen, mode = "segment", store;
    std::vector<std::string> peers;
    int timeout_ms = kDefaultFetchTimeoutMs;
    std::optional<std::uint64_t> serve_seed;
    auto* serve = app.add_subcommand("serve", "run one node");
    serve->add_option("--role", role, "gateway|shareserver")
        ->required()
        ->check(CLI::IsMember({"gateway", "shareserver"}));
    serve->add_option("--listen", listen, "HOST:PORT to listen on")->required();
    serve->add_option("--peer", peers, "share server HOST:PORT, repeatable, ordered");
    serve->add_option("--mode", mode, "segment|xor")
        ->check(CLI::IsMember({"segment", "xor"}));
    serve->add_option("--store", store, "share store file")->required();
    serve->add_option("--timeout-ms", timeout_ms, "peer fetch timeout");
    serve->add_option("--seed", serve_seed, "deterministic rng (testing)");

    std::uint32_t demo_n = 2;
    std::string demo_mode = "segment";
    std::uint64_t demo_seed = 1;
    bool demo_mask = false;
    auto* demo = app.add_subcommand("demo", "local cluster plus client");
    demo->add_option("--n", demo_n, "number of servers (gateway included)");
    demo->add_option("--mode", demo_mode, "segment|xor")
        ->check(CLI::IsMember({"segment", "xor"}));
    demo->add_option("--seed", demo_seed, "cluster rng seed");
    demo->add_flag("--mask", demo_mask, "do not echo passwords");

    std::uint64_t lab_seed = 0;
    std::string dict_path, csv_path;
    auto* attacklab = app.add_subcommand("attacklab", "run the attack comparison report");
    attacklab->add_option("--seed", lab_seed, "rng seed")->required();
    attacklab->add_option("--dict", dict_path, "newline-separated dictionary file")->required();
    attacklab->add_option("--csv", csv_path, "also write rows as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(client)) {
            return cmd_client(gateway, mask, client_seed);
        }
        if (app.got_subcommand(serve)) {
            return cmd_serve(role, listen, peers, mode, store, timeout_ms, serve_seed);
        }
        if (app.got_subcommand(demo)) {
            return cmd_demo(demo_n, demo_mode, demo_seed, demo_mask);
        }
        if (app.got_subcommand(attacklab)) {
            return cmd_attacklab(lab_seed, dict_path, csv_path);
        }
    } catch (const std::exception& e) {
        std::cerr << argv[0] << ": " << e.what() << "\n";
        return 2;
    }
    return 2;
}
