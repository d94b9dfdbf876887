#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "splitauth/core.hpp"
#include "splitauth/net.hpp"

namespace splitauth {

struct ReplOptions {
    Endpoint gateway;
    /// Echo each line read from the input back to the output. On when input
    /// is piped so the dialogue transcript reads like an interactive session;
    /// off on a TTY, where the terminal already echoes.
    bool echo_input = true;
    /// Suppress password echo (and disable TTY echo while reading one).
    bool mask_password = false;
    std::optional<std::uint64_t> seed; // deterministic client nonces
    int connect_timeout_ms = 3000;
    int reply_timeout_ms = 10000;
};

/// Interactive terminal client. Returns the process exit code: 0 on normal
/// exit (including end of input), nonzero when the gateway is unreachable or
/// the connection drops.
int repl(std::istream& in, std::ostream& out, const ReplOptions& options);

struct DemoOptions {
    std::uint32_t n = 2;
    SplitMode mode = SplitMode::Segment;
    std::uint64_t seed = 1;
    bool echo_input = true;
    bool mask_password = false;
};

/// Launches a gateway plus n-1 share servers on loopback ephemeral ports with
/// temporary stores, runs the repl against the gateway, and tears everything
/// down. Cluster diagnostics go to `diag`, the dialogue to `out`.
int run_demo(const DemoOptions& options, std::istream& in, std::ostream& out,
             std::ostream& diag);

} // namespace splitauth
