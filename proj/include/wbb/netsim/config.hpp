#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wbb/oracle.hpp"
#include "wbb/ring.hpp"
#include "wbb/rounds.hpp"

namespace wbb::netsim {

enum class Protocol { Wbb, Bracha, WbbWithRecovery };

enum class OracleMode {
    Slash,       // history-driven selection per process
    ForcedGood,  // one global witness set per instance with a correct majority
    ForcedBad,   // witness sets replaced by the set of corrupted processes
};

enum class AdvMode {
    EquivocatingSource,
    MuteWitness,
    ConflictingValidate,
    SlowAdaptive,
};

struct DelayModel {
    std::uint64_t base = 1;
    std::uint64_t jitter = 0;       // uniform extra delay in [0, jitter]
    double loss_prob = 0.0;         // a "lost" message is re-dispatched later
    std::uint64_t loss_penalty = 0; // 0 = 4 * base
    std::vector<std::size_t> slow;  // links touching these processes are slower
    std::uint64_t slow_factor = 1;

    std::uint64_t penalty() const { return loss_penalty == 0 ? 4 * base : loss_penalty; }
    double mean_delay() const {
        return static_cast<double>(base) + static_cast<double>(jitter) / 2.0;
    }
};

struct AdversarySpec {
    std::set<AdvMode> modes;
    std::size_t count = 0;                 // corruption budget
    std::vector<std::size_t> corrupted;    // explicit indices; empty = seeded draw
    std::uint64_t delta = 0;               // instances a slow-adaptive corruption waits
    std::optional<std::size_t> adaptive_target_instance;  // global broadcast ordinal
};

struct WitnessConfig {
    OracleMode mode = OracleMode::Slash;
    std::optional<double> w_size;   // default 3*log2(n)
    std::optional<double> v_size;   // default 4*log2(n)
    std::optional<std::size_t> k;   // default floor(|W|/2)+1
};

struct WorkloadConfig {
    bool closed_loop = true;            // next broadcast once the previous delivered
    std::uint64_t pace_interval = 0;    // paced mode: one source kicked every interval
    std::size_t instances_per_process = 1;
    std::vector<std::size_t> sources;   // empty = every process
};

struct RoundsSetup {
    bool enabled = false;
    RoundConfig cfg;
    std::uint64_t budget = 0;  // number of rounds to run
};

struct ScenarioConfig {
    std::string label = "scenario";
    std::size_t n = 0;
    std::optional<std::size_t> f;
    std::optional<double> fault_ratio;
    Protocol protocol = Protocol::Wbb;
    std::uint64_t seed = 0;

    SlashParams slash;
    std::uint64_t oracle_mu = 0;
    WitnessConfig witness;
    DelayModel delay;
    AdversarySpec adversary;
    WorkloadConfig workload;
    std::optional<std::uint64_t> timeout_ticks;  // default 10 * mean delay * 6
    RoundsSetup rounds;
    std::optional<std::uint64_t> duration_ticks;
    std::uint64_t max_events = 200'000'000;
    bool guarantees_expected = false;

    std::size_t resolved_f() const;
    double resolved_w_size() const;
    double resolved_v_size() const;
    std::uint64_t resolved_timeout() const;
    bool recovery_enabled() const { return protocol == Protocol::WbbWithRecovery; }
    void validate() const;

    static ScenarioConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

const char* to_string(Protocol p);
const char* to_string(OracleMode m);
const char* to_string(AdvMode m);

}  // namespace wbb::netsim
