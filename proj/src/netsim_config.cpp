#include "wbb/netsim/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace wbb::netsim {

using nlohmann::json;

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::Wbb: return "WBB";
        case Protocol::Bracha: return "BRACHA";
        case Protocol::WbbWithRecovery: return "WBB_WITH_RECOVERY";
    }
    return "?";
}

const char* to_string(OracleMode m) {
    switch (m) {
        case OracleMode::Slash: return "SLASH";
        case OracleMode::ForcedGood: return "FORCED_GOOD";
        case OracleMode::ForcedBad: return "FORCED_BAD";
    }
    return "?";
}

const char* to_string(AdvMode m) {
    switch (m) {
        case AdvMode::EquivocatingSource: return "EQUIVOCATING_SOURCE";
        case AdvMode::MuteWitness: return "MUTE_WITNESS";
        case AdvMode::ConflictingValidate: return "CONFLICTING_VALIDATE";
        case AdvMode::SlowAdaptive: return "SLOW_ADAPTIVE";
    }
    return "?";
}

namespace {

Protocol protocol_from(const std::string& s) {
    if (s == "WBB") return Protocol::Wbb;
    if (s == "BRACHA") return Protocol::Bracha;
    if (s == "WBB_WITH_RECOVERY") return Protocol::WbbWithRecovery;
    throw std::invalid_argument("config: unknown protocol " + s);
}

OracleMode oracle_from(const std::string& s) {
    if (s == "SLASH") return OracleMode::Slash;
    if (s == "FORCED_GOOD") return OracleMode::ForcedGood;
    if (s == "FORCED_BAD") return OracleMode::ForcedBad;
    throw std::invalid_argument("config: unknown witness mode " + s);
}

AdvMode adv_from(const std::string& s) {
    if (s == "EQUIVOCATING_SOURCE") return AdvMode::EquivocatingSource;
    if (s == "MUTE_WITNESS") return AdvMode::MuteWitness;
    if (s == "CONFLICTING_VALIDATE") return AdvMode::ConflictingValidate;
    if (s == "SLOW_ADAPTIVE") return AdvMode::SlowAdaptive;
    throw std::invalid_argument("config: unknown adversary mode " + s);
}

}  // namespace

std::size_t ScenarioConfig::resolved_f() const {
    if (f.has_value()) {
        return *f;
    }
    if (fault_ratio.has_value()) {
        return static_cast<std::size_t>(*fault_ratio * static_cast<double>(n));
    }
    return 0;
}

double ScenarioConfig::resolved_w_size() const {
    const double def = 3.0 * std::log2(static_cast<double>(n));
    double w = witness.w_size.value_or(def);
    return std::min(w, static_cast<double>(n));
}

double ScenarioConfig::resolved_v_size() const {
    const double def = 4.0 * std::log2(static_cast<double>(n));
    double v = witness.v_size.value_or(def);
    return std::min(std::max(v, resolved_w_size()), static_cast<double>(n));
}

std::uint64_t ScenarioConfig::resolved_timeout() const {
    if (timeout_ticks.has_value()) {
        return *timeout_ticks;
    }
    return static_cast<std::uint64_t>(10.0 * delay.mean_delay() * 6.0);
}

void ScenarioConfig::validate() const {
    if (n == 0) {
        throw std::invalid_argument("config: zero processes");
    }
    const std::size_t ff = resolved_f();
    if (3 * ff >= n && (guarantees_expected || ff > 0)) {
        // quorum arithmetic itself needs f < n/3
        throw std::invalid_argument("config: fault bound requires f < n/3");
    }
    if (adversary.count > ff) {
        throw std::invalid_argument("config: corruption budget exceeds f");
    }
    for (std::size_t idx : adversary.corrupted) {
        if (idx >= n) {
            throw std::invalid_argument("config: corrupted index out of range");
        }
    }
    if (adversary.corrupted.size() > adversary.count) {
        throw std::invalid_argument("config: corrupted list exceeds budget");
    }
    for (std::size_t idx : workload.sources) {
        if (idx >= n) {
            throw std::invalid_argument("config: source index out of range");
        }
    }
    for (std::size_t idx : delay.slow) {
        if (idx >= n) {
            throw std::invalid_argument("config: slow index out of range");
        }
    }
    if (!workload.closed_loop && workload.pace_interval == 0) {
        throw std::invalid_argument("config: paced workload needs an interval");
    }
    if (delay.loss_prob < 0 || delay.loss_prob >= 1) {
        throw std::invalid_argument("config: loss probability out of range");
    }
    slash.validate();
    if (rounds.enabled) {
        rounds.cfg.validate();
        if (protocol != Protocol::WbbWithRecovery) {
            throw std::invalid_argument("config: rounds need the recovery protocol");
        }
    }
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    ScenarioConfig cfg;
    try {
        cfg.label = j.value("label", cfg.label);
        cfg.n = j.at("n").get<std::size_t>();
        if (j.contains("f")) {
            cfg.f = j.at("f").get<std::size_t>();
        }
        if (j.contains("fault_ratio")) {
            cfg.fault_ratio = j.at("fault_ratio").get<double>();
        }
        cfg.protocol = protocol_from(j.at("protocol").get<std::string>());
        cfg.seed = j.at("seed").get<std::uint64_t>();

        if (j.contains("slash")) {
            const json& s = j.at("slash");
            cfg.slash.c = s.value("c", cfg.slash.c);
            cfg.slash.b = s.value("b", cfg.slash.b);
            cfg.slash.big_b = s.value("B", cfg.slash.big_b);
            cfg.slash.r = s.value("r", cfg.slash.r);
            cfg.slash.seed = s.value("seed", cfg.slash.seed);
            cfg.oracle_mu = s.value("mu", cfg.oracle_mu);
        }
        if (j.contains("witness")) {
            const json& w = j.at("witness");
            if (w.contains("mode")) {
                cfg.witness.mode = oracle_from(w.at("mode").get<std::string>());
            }
            if (w.contains("w_size")) cfg.witness.w_size = w.at("w_size").get<double>();
            if (w.contains("v_size")) cfg.witness.v_size = w.at("v_size").get<double>();
            if (w.contains("k")) cfg.witness.k = w.at("k").get<std::size_t>();
        }
        if (j.contains("delay")) {
            const json& d = j.at("delay");
            cfg.delay.base = d.value("base", cfg.delay.base);
            cfg.delay.jitter = d.value("jitter", cfg.delay.jitter);
            cfg.delay.loss_prob = d.value("loss_prob", cfg.delay.loss_prob);
            cfg.delay.loss_penalty = d.value("loss_penalty", cfg.delay.loss_penalty);
            if (d.contains("slow")) {
                cfg.delay.slow = d.at("slow").get<std::vector<std::size_t>>();
            }
            cfg.delay.slow_factor = d.value("slow_factor", cfg.delay.slow_factor);
        }
        if (j.contains("adversary")) {
            const json& a = j.at("adversary");
            if (a.contains("modes")) {
                for (const auto& m : a.at("modes")) {
                    cfg.adversary.modes.insert(adv_from(m.get<std::string>()));
                }
            }
            cfg.adversary.count = a.value("count", cfg.adversary.count);
            if (a.contains("corrupted")) {
                cfg.adversary.corrupted = a.at("corrupted").get<std::vector<std::size_t>>();
            }
            cfg.adversary.delta = a.value("delta", cfg.adversary.delta);
            if (a.contains("adaptive_target_instance")) {
                cfg.adversary.adaptive_target_instance =
                    a.at("adaptive_target_instance").get<std::size_t>();
            }
        }
        if (j.contains("workload")) {
            const json& w = j.at("workload");
            if (w.contains("mode")) {
                const std::string mode = w.at("mode").get<std::string>();
                if (mode == "closed_loop") {
                    cfg.workload.closed_loop = true;
                } else if (mode == "paced") {
                    cfg.workload.closed_loop = false;
                } else {
                    throw std::invalid_argument("config: unknown workload mode " + mode);
                }
            }
            cfg.workload.pace_interval = w.value("pace_interval", cfg.workload.pace_interval);
            cfg.workload.instances_per_process =
                w.value("instances_per_process", cfg.workload.instances_per_process);
            if (w.contains("sources")) {
                cfg.workload.sources = w.at("sources").get<std::vector<std::size_t>>();
            }
        }
        if (j.contains("timeout_ticks")) {
            cfg.timeout_ticks = j.at("timeout_ticks").get<std::uint64_t>();
        }
        if (j.contains("rounds")) {
            const json& r = j.at("rounds");
            cfg.rounds.enabled = true;
            cfg.rounds.cfg.delta_ticks = r.at("delta_ticks").get<std::uint64_t>();
            cfg.rounds.cfg.d_log = r.value("d_log", cfg.rounds.cfg.d_log);
            cfg.rounds.cfg.gamma = r.value("gamma", cfg.rounds.cfg.gamma);
            cfg.rounds.cfg.th_max = r.value("th_max", cfg.rounds.cfg.th_max);
            cfg.rounds.budget = r.value("budget", cfg.rounds.budget);
        }
        if (j.contains("duration_ticks")) {
            cfg.duration_ticks = j.at("duration_ticks").get<std::uint64_t>();
        }
        cfg.max_events = j.value("max_events", cfg.max_events);
        cfg.guarantees_expected = j.value("guarantees_expected", cfg.guarantees_expected);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json ScenarioConfig::to_json() const {
    json j;
    j["label"] = label;
    j["n"] = n;
    if (f.has_value()) j["f"] = *f;
    if (fault_ratio.has_value()) j["fault_ratio"] = *fault_ratio;
    j["protocol"] = to_string(protocol);
    j["seed"] = seed;
    j["slash"] = {{"c", slash.c}, {"b", slash.b},     {"B", slash.big_b},
                  {"r", slash.r}, {"seed", slash.seed}, {"mu", oracle_mu}};
    json w;
    w["mode"] = to_string(witness.mode);
    if (witness.w_size.has_value()) w["w_size"] = *witness.w_size;
    if (witness.v_size.has_value()) w["v_size"] = *witness.v_size;
    if (witness.k.has_value()) w["k"] = *witness.k;
    j["witness"] = w;
    json dj = {{"base", delay.base},
               {"jitter", delay.jitter},
               {"loss_prob", delay.loss_prob},
               {"loss_penalty", delay.loss_penalty},
               {"slow_factor", delay.slow_factor}};
    if (!delay.slow.empty()) {
        dj["slow"] = delay.slow;
    }
    j["delay"] = dj;
    json a;
    a["count"] = adversary.count;
    a["delta"] = adversary.delta;
    json modes = json::array();
    for (AdvMode m : adversary.modes) {
        modes.push_back(to_string(m));
    }
    a["modes"] = modes;
    if (!adversary.corrupted.empty()) a["corrupted"] = adversary.corrupted;
    if (adversary.adaptive_target_instance.has_value()) {
        a["adaptive_target_instance"] = *adversary.adaptive_target_instance;
    }
    j["adversary"] = a;
    json wk;
    wk["mode"] = workload.closed_loop ? "closed_loop" : "paced";
    wk["pace_interval"] = workload.pace_interval;
    wk["instances_per_process"] = workload.instances_per_process;
    if (!workload.sources.empty()) wk["sources"] = workload.sources;
    j["workload"] = wk;
    if (timeout_ticks.has_value()) j["timeout_ticks"] = *timeout_ticks;
    if (rounds.enabled) {
        j["rounds"] = {{"delta_ticks", rounds.cfg.delta_ticks},
                       {"d_log", rounds.cfg.d_log},
                       {"gamma", rounds.cfg.gamma},
                       {"th_max", rounds.cfg.th_max},
                       {"budget", rounds.budget}};
    }
    if (duration_ticks.has_value()) j["duration_ticks"] = *duration_ticks;
    j["max_events"] = max_events;
    j["guarantees_expected"] = guarantees_expected;
    return j;
}

}  // namespace wbb::netsim
