#include "wbb/netsim/metrics.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

namespace wbb::netsim {

std::size_t InstanceMetrics::distinct_bodies() const {
    std::set<std::uint64_t> bodies;
    for (const auto& [idx, body] : delivered_body) {
        bodies.insert(body);
    }
    return bodies.size();
}

std::string metrics_csv(const RunResult& result) {
    std::ostringstream out;
    out << "source,seq,protocol,messages,byte_units,deliveries,distinct_payloads,"
           "broadcast_tick,first_delivery_tick,last_delivery_tick,mean_latency,"
           "max_latency,consistent\n";
    for (const InstanceMetrics& im : result.instances) {
        std::uint64_t first = 0;
        std::uint64_t last = 0;
        std::uint64_t sum = 0;
        bool any = false;
        for (const auto& [idx, tick] : im.delivery_tick) {
            if (!any || tick < first) {
                first = tick;
            }
            if (!any || tick > last) {
                last = tick;
            }
            sum += tick - im.broadcast_tick;
            any = true;
        }
        const std::size_t got = im.delivery_tick.size();
        out << im.source_index << ',' << im.instance.seq << ','
            << to_string(result.summary.protocol) << ',' << im.messages << ','
            << im.byte_units << ',' << got << ',' << im.distinct_bodies() << ','
            << im.broadcast_tick << ',';
        if (any) {
            out << first << ',' << last << ','
                << static_cast<double>(sum) / static_cast<double>(got) << ','
                << (last - im.broadcast_tick);
        } else {
            out << ",,,";
        }
        out << ',' << (im.consistent() ? 1 : 0) << '\n';
    }
    return out.str();
}

nlohmann::json summary_json(const RunResult& result) {
    const RunSummary& s = result.summary;
    nlohmann::json j;
    j["label"] = s.label;
    j["protocol"] = to_string(s.protocol);
    j["n"] = s.n;
    j["f"] = s.f;
    j["seed"] = s.seed;
    j["instances"] = s.instances;
    j["messages"] = s.messages;
    j["messages_by_kind"] = s.messages_by_kind;
    j["byte_units"] = s.byte_units;
    j["log_messages"] = s.log_messages;
    j["log_byte_units"] = s.log_byte_units;
    j["deliveries"] = s.deliveries;
    j["duration_ticks"] = s.duration;
    j["throughput_per_ktick"] = s.throughput_per_ktick;
    j["latency"] = {{"mean", s.mean_latency},
                    {"p50", s.p50_latency},
                    {"p95", s.p95_latency},
                    {"max", s.max_latency}};
    j["consistency_violations"] = s.consistency_violations;
    j["liveness_failures"] = s.liveness_failures;
    j["measured_message_constant"] = s.measured_message_constant;
    j["witness"] = {{"w", s.witness_w},
                    {"v", s.witness_v},
                    {"k", s.witness_k},
                    {"d", s.oracle_d},
                    {"gamma", s.oracle_gamma}};
    j["truncated"] = s.truncated;
    if (s.rounds_run > 0) {
        j["rounds"] = {{"run", s.rounds_run},
                       {"decisions_wbb", s.decisions_wbb},
                       {"decisions_recovery", s.decisions_recovery},
                       {"max_wbb_pair_history_diff", s.max_wbb_pair_history_diff},
                       {"max_round_deliveries", s.max_round_deliveries},
                       {"min_ready_log_support", s.min_ready_log_support},
                       {"gate_feasible", s.gate_feasible}};
    }
    return j;
}

}  // namespace wbb::netsim
