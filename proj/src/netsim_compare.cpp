#include "wbb/netsim/compare.hpp"

#include <sstream>
#include <stdexcept>

#include "wbb/netsim/sim.hpp"

namespace wbb::netsim {

std::vector<CompareRow> compare(const std::vector<ScenarioConfig>& cfgs) {
    if (cfgs.empty()) {
        throw std::invalid_argument("compare: no configs");
    }
    const ScenarioConfig& first = cfgs.front();
    for (const ScenarioConfig& cfg : cfgs) {
        if (cfg.n != first.n || cfg.seed != first.seed ||
            cfg.workload.instances_per_process != first.workload.instances_per_process ||
            cfg.workload.sources != first.workload.sources ||
            cfg.workload.closed_loop != first.workload.closed_loop) {
            throw std::invalid_argument("compare: configs must share n, workload and seed");
        }
    }
    std::vector<CompareRow> rows;
    for (const ScenarioConfig& cfg : cfgs) {
        const RunResult result = run(cfg);
        CompareRow row;
        row.label = cfg.label;
        row.protocol = cfg.protocol;
        row.throughput = result.summary.throughput_per_ktick;
        row.mean_latency = result.summary.mean_latency;
        row.messages = result.summary.messages;
        rows.push_back(row);
    }
    const CompareRow* base = nullptr;
    for (const CompareRow& row : rows) {
        if (row.protocol == Protocol::Bracha) {
            base = &row;
            break;
        }
    }
    if (base == nullptr) {
        throw std::invalid_argument("compare: need a BRACHA baseline row");
    }
    for (CompareRow& row : rows) {
        row.throughput_ratio = base->throughput > 0 ? row.throughput / base->throughput : 0;
        row.latency_ratio = base->mean_latency > 0 ? row.mean_latency / base->mean_latency : 0;
        row.messages_ratio =
            base->messages > 0
                ? static_cast<double>(row.messages) / static_cast<double>(base->messages)
                : 0;
    }
    return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << "label,protocol,throughput_per_ktick,mean_latency,messages,"
           "throughput_ratio,latency_ratio,messages_ratio\n";
    for (const CompareRow& row : rows) {
        out << row.label << ',' << to_string(row.protocol) << ',' << row.throughput << ','
            << row.mean_latency << ',' << row.messages << ',' << row.throughput_ratio << ','
            << row.latency_ratio << ',' << row.messages_ratio << '\n';
    }
    return out.str();
}

}  // namespace wbb::netsim
