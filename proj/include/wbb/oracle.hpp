#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "wbb/event.hpp"
#include "wbb/slash.hpp"

namespace wbb {

using IdSet = std::set<ProcessId>;

struct OracleParams {
    std::uint64_t d = 0;        // own-witness radius
    std::uint64_t gamma = 0;    // potential witnesses use d + gamma
    std::uint64_t mu = 0;       // assumed history-uncertainty radius
    double expected_w = 0;      // target expected own-witness-set size
    std::size_t k = 1;          // witness reply threshold

    void validate(const SlashParams& sp) const;
};

struct WitnessSelection {
    IdSet own;
    IdSet potential;
};

/// Per-event witness selection. Every candidate id v is tested against its
/// own view of the history hash: the B-dimensional accumulator is permuted
/// and filtered with seed h(v), shifted by the event point M(h(source||seq)),
/// and compared with the shuffled id point M(h(v||h(source||seq))). Ids
/// within distance d join the own set, those within d + gamma the potential
/// set.
WitnessSelection select_witnesses(const SlashState& history,
                                  const std::vector<ProcessId>& members,
                                  const EventId& event, const OracleParams& params);

/// Commit-reveal wrapper for the value that will drive a future SLASH
/// update. The default reveal horizon is the b*r^2 mixing estimate.
struct Commitment {
    ProcessId owner;
    Digest commit_hash{};
    std::uint64_t reveal_after = 0;  // instances until the value must be revealed
    std::optional<Digest> revealed_value;
};

Commitment commit(const ProcessId& owner, const Digest& value, const SlashParams& sp,
                  std::optional<std::uint64_t> reveal_after = std::nullopt);
bool verify_reveal(const Commitment& cm, const Digest& value);
Commitment reveal(const Commitment& cm, const Digest& value);  // records the value if it matches

std::uint64_t default_reveal_horizon(const SlashParams& sp);  // b * r^2

}  // namespace wbb
