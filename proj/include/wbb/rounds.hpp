#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "wbb/event.hpp"

namespace wbb {

/// Per-round log a process shares with everyone: what it has delivered and
/// every message it has sent READY for (witness path or recovery).
struct RoundLog {
    std::uint64_t round = 0;
    ProcessId owner;
    std::set<EventId> delivered;
    std::set<std::pair<EventId, std::uint64_t>> ready_sent;  // (event, body)
};

struct RoundConfig {
    std::uint64_t delta_ticks = 0;  // round length
    std::uint64_t d_log = 0;        // permitted log difference
    std::uint64_t gamma = 0;        // maximum tolerable history difference
    double th_max = 0;              // maximum throughput, messages per tick

    // History closeness is guaranteed only when gamma > 3*d_log +
    // 2*delta*th_max.
    bool feasible() const;
    void validate() const;
};

enum class RoundDecision { UseWbb, UseRecovery };

/// End-of-round gate: a process keeps using the witness path next round only
/// if (1) at least n-f of the logs it holds have a delivered set within
/// d_log of its own, and (2) its delivered set is within d_log of the set of
/// events backed by f+1 READY logs.
RoundDecision round_tick(const RoundLog& local, const std::vector<RoundLog>& received,
                         std::size_t n, std::size_t f, const RoundConfig& cfg);

}  // namespace wbb
