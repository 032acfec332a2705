#include "wbb/rounds.hpp"

#include <map>
#include <stdexcept>

#include "wbb/slash.hpp"

namespace wbb {

bool RoundConfig::feasible() const {
    return static_cast<double>(gamma) >
           3.0 * static_cast<double>(d_log) + 2.0 * static_cast<double>(delta_ticks) * th_max;
}

void RoundConfig::validate() const {
    if (delta_ticks == 0) {
        throw std::invalid_argument("round config: round length must be positive");
    }
}

RoundDecision round_tick(const RoundLog& local, const std::vector<RoundLog>& received,
                         std::size_t n, std::size_t f, const RoundConfig& cfg) {
    // Condition 1: enough close delivered sets among the logs at hand.
    std::size_t close = 0;
    for (const RoundLog& log : received) {
        if (set_dist(local.delivered, log.delivered) <= cfg.d_log) {
            ++close;
        }
    }
    if (close < n - f) {
        return RoundDecision::UseRecovery;
    }
    // Condition 2: the delivered set must track readyM, the events backed by
    // f+1 READY logs on a common body.
    std::map<std::pair<EventId, std::uint64_t>, std::size_t> ready_votes;
    for (const RoundLog& log : received) {
        for (const auto& entry : log.ready_sent) {
            ++ready_votes[entry];
        }
    }
    std::set<EventId> ready_m;
    for (const auto& [entry, votes] : ready_votes) {
        if (votes >= f + 1) {
            ready_m.insert(entry.first);
        }
    }
    if (set_dist(local.delivered, ready_m) > cfg.d_log) {
        return RoundDecision::UseRecovery;
    }
    return RoundDecision::UseWbb;
}

}  // namespace wbb
