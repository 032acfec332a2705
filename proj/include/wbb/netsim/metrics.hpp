#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <vector>

#include "wbb/event.hpp"
#include "wbb/netsim/config.hpp"

namespace wbb::netsim {

struct InstanceMetrics {
    EventId instance;
    std::size_t source_index = 0;
    bool source_correct = true;
    std::uint64_t broadcast_tick = 0;
    std::uint64_t messages = 0;
    std::uint64_t byte_units = 0;
    std::map<std::size_t, std::uint64_t> delivery_tick;   // correct process -> tick
    std::map<std::size_t, std::uint64_t> delivered_body;  // correct process -> body

    std::size_t distinct_bodies() const;
    bool consistent() const { return distinct_bodies() <= 1; }
};

struct RunSummary {
    std::string label;
    Protocol protocol = Protocol::Wbb;
    std::size_t n = 0;
    std::size_t f = 0;
    std::uint64_t seed = 0;
    std::size_t instances = 0;
    std::uint64_t messages = 0;       // protocol messages (LOG traffic excluded)
    std::map<std::string, std::uint64_t> messages_by_kind;
    std::uint64_t byte_units = 0;
    std::uint64_t log_messages = 0;
    std::uint64_t log_byte_units = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t duration = 0;
    double throughput_per_ktick = 0;  // fully-delivered instances per 1000 ticks
    double mean_latency = 0;
    double p50_latency = 0;
    double p95_latency = 0;
    std::uint64_t max_latency = 0;
    std::size_t consistency_violations = 0;
    std::size_t liveness_failures = 0;
    double measured_message_constant = 0;  // max instance messages / (n * |V|)
    std::size_t witness_w = 0;
    std::size_t witness_v = 0;
    std::size_t witness_k = 0;
    std::uint64_t oracle_d = 0;
    std::uint64_t oracle_gamma = 0;
    bool truncated = false;
    // Round mechanism observations.
    std::size_t rounds_run = 0;
    std::size_t decisions_wbb = 0;
    std::size_t decisions_recovery = 0;
    std::uint64_t max_wbb_pair_history_diff = 0;
    std::uint64_t max_round_deliveries = 0;  // per process, over adjacent round pairs
    // smallest number of correct READY logs backing a message delivered
    // before the previous round boundary (SIZE_MAX sentinel collapsed to 0
    // when no such message existed)
    std::size_t min_ready_log_support = 0;
    bool gate_feasible = false;
};

struct RunResult {
    std::vector<InstanceMetrics> instances;
    RunSummary summary;
};

/// One CSV row per instance, ordered by (broadcast tick, source, seq); the
/// body is a pure function of the scenario config.
std::string metrics_csv(const RunResult& result);
nlohmann::json summary_json(const RunResult& result);

}  // namespace wbb::netsim
