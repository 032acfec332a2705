#pragma once

#include <string>
#include <vector>

#include "wbb/netsim/metrics.hpp"

namespace wbb::netsim {

struct CompareRow {
    std::string label;
    Protocol protocol = Protocol::Wbb;
    double throughput = 0;
    double mean_latency = 0;
    std::uint64_t messages = 0;
    // normalized against the first BRACHA row
    double throughput_ratio = 0;
    double latency_ratio = 0;
    double messages_ratio = 0;
};

/// Runs every config and normalizes throughput/latency/message counts
/// against the first BRACHA row. All configs must share n, workload and
/// seed.
std::vector<CompareRow> compare(const std::vector<ScenarioConfig>& cfgs);

std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace wbb::netsim
