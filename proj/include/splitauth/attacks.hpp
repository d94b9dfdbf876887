#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "splitauth/sim.hpp"

namespace splitauth {

struct AttackReport {
    std::string attack; // replay | impersonation | compromise | eavesdrop
    std::uint32_t n = 0;
    SplitMode mode = SplitMode::Segment;
    std::uint32_t compromised = 0; // node count; 0 when not applicable
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::size_t dictionary_size = 0; // 0 when not applicable
    std::string notes;
};

/// Re-sends a recorded Login and ChallengeResponse against fresh sessions;
/// a success is reaching LoginOk. The transcript must contain a completed
/// login exchange.
AttackReport replay_attack(SimCluster& cluster, const Transcript& transcript,
                           std::uint64_t trials = 100);

/// Whether a candidate digest is consistent with a set of obtained shares.
/// Segment shares pin digest byte slices; a full xor set pins the whole
/// digest; a partial xor set admits every digest.
bool shares_admit_digest(const PasswordDigest& candidate,
                         const std::vector<DigestShare>& shares);

/// Reads the stores of the compromised nodes and tests every dictionary word
/// for consistency with the obtained shares (segment: byte-slice comparison;
/// xor: only a full set admits a test). A success is the unique
/// identification of the target user's true password.
AttackReport compromise_attack(SimCluster& cluster,
                               std::span<const std::size_t> compromised_node_indices,
                               std::span<const std::string> dictionary);

/// Offline check of every dictionary word against an observed exchange:
/// a login transcript exposes (server nonce, client nonce, proof) to test
/// against; a registration transcript exposes the digest itself. successes
/// counts the words the transcript confirms.
AttackReport eavesdrop_dictionary_attack(const Transcript& transcript,
                                         std::span<const std::string> dictionary);

/// Random-proof login attempts against a registered username.
AttackReport impersonation_attack(SimCluster& cluster, const std::string& username,
                                  std::uint64_t trials, RandomSource& rng);

struct ComparisonReport {
    std::vector<AttackReport> rows;
    std::string text; // human-readable table
    std::string csv;  // attack,n,mode,compromised,trials,successes
};

/// Runs all four attacks across {n=1 baseline, n=2 segment, n=2 xor, n=3 xor}
/// with every compromise count per configuration. Deterministic: the same
/// seed and dictionary give byte-identical text and csv.
ComparisonReport run_comparison_report(std::uint64_t seed,
                                       std::span<const std::string> dictionary);

} // namespace splitauth
