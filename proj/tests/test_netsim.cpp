#include <doctest.h>

#include <stdexcept>

#include <sstream>

#include "wbb/netsim/compare.hpp"
#include "wbb/netsim/sim.hpp"

using namespace wbb;
using namespace wbb::netsim;

namespace {

ScenarioConfig base_config(std::size_t n, std::size_t f, Protocol proto) {
    ScenarioConfig cfg;
    cfg.label = "test";
    cfg.n = n;
    cfg.f = f;
    cfg.protocol = proto;
    cfg.seed = 7;
    cfg.witness.mode = OracleMode::ForcedGood;
    cfg.workload.instances_per_process = 1;
    cfg.workload.sources = {0};
    return cfg;
}

}  // namespace

TEST_CASE("config validation rejects broken inputs") {
    ScenarioConfig cfg = base_config(4, 1, Protocol::Wbb);
    CHECK_NOTHROW(cfg.validate());
    ScenarioConfig bad = cfg;
    bad.n = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.f = 2;  // 3f >= n
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.adversary.count = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.workload.sources = {9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("synchronous unit-delay wbb delivers everywhere within six ticks") {
    ScenarioConfig cfg = base_config(4, 0, Protocol::Wbb);
    const RunResult result = run(cfg);
    REQUIRE(result.instances.size() == 1);
    const InstanceMetrics& im = result.instances[0];
    CHECK(im.delivery_tick.size() == 4);
    for (const auto& [idx, tick] : im.delivery_tick) {
        CHECK(tick - im.broadcast_tick <= 6);
    }
    CHECK(result.summary.consistency_violations == 0);
    CHECK(result.summary.liveness_failures == 0);
}

TEST_CASE("synchronous bracha delivers within three ticks") {
    ScenarioConfig cfg = base_config(4, 0, Protocol::Bracha);
    const RunResult result = run(cfg);
    REQUIRE(result.instances.size() == 1);
    for (const auto& [idx, tick] : result.instances[0].delivery_tick) {
        CHECK(tick - result.instances[0].broadcast_tick <= 3);
    }
}

TEST_CASE("identical configs produce identical traces and metrics") {
    ScenarioConfig cfg = base_config(7, 2, Protocol::Wbb);
    cfg.delay.jitter = 5;
    cfg.delay.loss_prob = 0.05;
    cfg.workload.sources = {0, 3, 5};
    std::ostringstream trace_a, trace_b;
    const RunResult a = run(cfg, &trace_a);
    const RunResult b = run(cfg, &trace_b);
    CHECK(trace_a.str() == trace_b.str());
    CHECK(metrics_csv(a) == metrics_csv(b));
    CHECK(a.summary.messages == b.summary.messages);
    // a different seed moves the trace
    ScenarioConfig other = cfg;
    other.seed = 8;
    std::ostringstream trace_c;
    run(other, &trace_c);
    CHECK(trace_a.str() != trace_c.str());
}

TEST_CASE("loss is extra delay, never a drop") {
    ScenarioConfig cfg = base_config(4, 0, Protocol::Wbb);
    cfg.delay.loss_prob = 0.4;
    cfg.delay.loss_penalty = 11;
    const RunResult result = run(cfg);
    REQUIRE(result.instances.size() == 1);
    // every process still delivers despite heavy loss
    CHECK(result.instances[0].delivery_tick.size() == 4);
    CHECK(result.summary.liveness_failures == 0);
}

TEST_CASE("wbb message complexity stays within the n*v envelope") {
    ScenarioConfig cfg = base_config(16, 0, Protocol::Wbb);
    const RunResult result = run(cfg);
    CHECK(result.summary.measured_message_constant > 0);
    CHECK(result.summary.measured_message_constant <= 6.0);
}

TEST_CASE("slash-mode witness selection drives delivery") {
    ScenarioConfig cfg = base_config(16, 0, Protocol::Wbb);
    cfg.witness.mode = OracleMode::Slash;
    cfg.slash.b = 4;
    cfg.slash.big_b = 16;
    cfg.slash.r = 1 << 12;
    cfg.workload.sources = {0, 5};
    const RunResult result = run(cfg);
    CHECK(result.summary.consistency_violations == 0);
    for (const InstanceMetrics& im : result.instances) {
        CHECK(im.delivery_tick.size() == 16);
    }
}

TEST_CASE("equivocating source cannot split correct processes") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        ScenarioConfig cfg = base_config(7, 2, Protocol::Wbb);
        cfg.seed = seed;
        cfg.delay.jitter = 4;
        cfg.adversary.modes = {AdvMode::EquivocatingSource, AdvMode::ConflictingValidate};
        cfg.adversary.count = 2;
        cfg.adversary.corrupted = {0, 1};
        cfg.workload.sources = {0, 2};
        const RunResult result = run(cfg);
        CHECK(result.summary.consistency_violations == 0);
    }
}

TEST_CASE("mute witnesses leave enough correct ones when k is safe") {
    ScenarioConfig cfg = base_config(10, 3, Protocol::Wbb);
    cfg.adversary.modes = {AdvMode::MuteWitness};
    cfg.adversary.count = 3;
    cfg.adversary.corrupted = {7, 8, 9};
    cfg.workload.sources = {0};
    cfg.delay.jitter = 2;
    const RunResult result = run(cfg);
    REQUIRE(result.instances.size() == 1);
    CHECK(result.summary.consistency_violations == 0);
    CHECK(result.summary.liveness_failures == 0);
    CHECK(result.instances[0].delivery_tick.size() == 7);  // correct processes
}

TEST_CASE("fully faulty witness sets recover through timeouts") {
    ScenarioConfig cfg = base_config(7, 2, Protocol::WbbWithRecovery);
    cfg.witness.mode = OracleMode::ForcedBad;
    cfg.adversary.modes = {AdvMode::MuteWitness};
    cfg.adversary.count = 2;
    cfg.adversary.corrupted = {5, 6};
    cfg.workload.sources = {0};
    cfg.delay.jitter = 3;
    const RunResult result = run(cfg);
    REQUIRE(result.instances.size() == 1);
    CHECK(result.instances[0].delivery_tick.size() == 5);
    CHECK(result.instances[0].distinct_bodies() == 1);
    CHECK(result.summary.liveness_failures == 0);
}

TEST_CASE("slow adaptive corruption waits for delta instances") {
    ScenarioConfig cfg = base_config(7, 2, Protocol::Wbb);
    cfg.adversary.modes = {AdvMode::SlowAdaptive};
    cfg.adversary.count = 1;
    cfg.adversary.delta = 4;
    cfg.adversary.adaptive_target_instance = 2;
    cfg.workload.instances_per_process = 12;
    cfg.workload.sources = {0, 1, 2};
    std::ostringstream trace;
    const RunResult result = run(cfg, &trace);
    const std::string t = trace.str();
    const auto armed_at = t.find("corrupt_armed");
    REQUIRE(armed_at != std::string::npos);
    const auto corrupted_at = t.find("\"ev\":\"corrupt\"");
    // corruption, if it fired, must come after arming
    if (corrupted_at != std::string::npos) {
        CHECK(corrupted_at > armed_at);
    }
    // runs long enough to complete delta instances do corrupt the target
    CHECK(result.summary.instances == 36);
}

TEST_CASE("compare normalizes against the bracha row") {
    std::vector<ScenarioConfig> cfgs;
    ScenarioConfig bracha = base_config(16, 0, Protocol::Bracha);
    bracha.label = "bracha";
    ScenarioConfig wbb = base_config(16, 0, Protocol::Wbb);
    wbb.label = "wbb";
    cfgs.push_back(bracha);
    cfgs.push_back(wbb);
    cfgs.push_back(bracha);  // self-comparison row
    const auto rows = compare(cfgs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].messages_ratio == doctest::Approx(1.0));
    CHECK(rows[2].messages_ratio == doctest::Approx(1.0));
    CHECK(rows[2].latency_ratio == doctest::Approx(1.0));
    CHECK(rows[1].messages > 0);
}

TEST_CASE("compare rejects mismatched workloads") {
    std::vector<ScenarioConfig> cfgs;
    cfgs.push_back(base_config(16, 0, Protocol::Bracha));
    ScenarioConfig other = base_config(16, 0, Protocol::Wbb);
    other.workload.instances_per_process = 3;
    cfgs.push_back(other);
    CHECK_THROWS_AS(compare(cfgs), std::invalid_argument);
}

TEST_CASE("round gating keeps wbb histories close") {
    ScenarioConfig cfg = base_config(9, 2, Protocol::WbbWithRecovery);
    cfg.witness.mode = OracleMode::ForcedGood;
    cfg.workload.closed_loop = false;
    cfg.workload.pace_interval = 60;
    cfg.workload.instances_per_process = 6;
    cfg.workload.sources = {0, 1, 2, 3, 4, 5, 6};
    cfg.delay.jitter = 4;
    cfg.rounds.enabled = true;
    cfg.rounds.cfg.delta_ticks = 300;
    cfg.rounds.cfg.d_log = 3;
    cfg.rounds.cfg.gamma = 30;  // > 3*3 + 2*300*0.02
    cfg.rounds.cfg.th_max = 0.02;
    cfg.rounds.budget = 12;
    const RunResult result = run(cfg);
    CHECK(result.summary.gate_feasible);
    CHECK(result.summary.rounds_run >= 12);
    CHECK(result.summary.max_wbb_pair_history_diff <= cfg.rounds.cfg.gamma);
    CHECK(result.summary.consistency_violations == 0);
}

TEST_CASE("bracha under an equivocating source over many seeds") {
    std::size_t violations = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        ScenarioConfig cfg = base_config(7, 2, Protocol::Bracha);
        cfg.seed = seed;
        cfg.delay.jitter = 5;
        cfg.adversary.modes = {AdvMode::EquivocatingSource};
        cfg.adversary.count = 2;
        cfg.adversary.corrupted = {0, 1};
        cfg.workload.sources = {0};
        violations += run(cfg).summary.consistency_violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("adaptive corruption beyond the budget is rejected") {
    ScenarioConfig cfg = base_config(7, 2, Protocol::Wbb);
    cfg.adversary.modes = {AdvMode::SlowAdaptive, AdvMode::MuteWitness};
    cfg.adversary.count = 1;
    cfg.adversary.corrupted = {6};  // budget already spent
    cfg.adversary.delta = 2;
    cfg.adversary.adaptive_target_instance = 1;
    cfg.workload.instances_per_process = 8;
    cfg.workload.sources = {0, 1};
    std::ostringstream trace;
    const RunResult result = run(cfg, &trace);
    CHECK(trace.str().find("corrupt_rejected") != std::string::npos);
    CHECK(trace.str().find("\"ev\":\"corrupt\"") == std::string::npos);
    CHECK(result.summary.consistency_violations == 0);
}

TEST_CASE("recovery racing the witness path stays consistent under equivocation") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        ScenarioConfig cfg = base_config(10, 3, Protocol::WbbWithRecovery);
        cfg.seed = seed;
        cfg.delay.jitter = 9;
        cfg.delay.loss_prob = 0.08;
        cfg.timeout_ticks = 18;  // short enough to race normal operation
        cfg.adversary.modes = {AdvMode::EquivocatingSource, AdvMode::ConflictingValidate};
        cfg.adversary.count = 3;
        cfg.adversary.corrupted = {0, 1, 2};
        cfg.workload.sources = {0, 3, 4};
        cfg.workload.instances_per_process = 2;
        const RunResult result = run(cfg);
        CHECK(result.summary.consistency_violations == 0);
        for (const InstanceMetrics& im : result.instances) {
            // correct sources deliver everywhere; byzantine instances deliver
            // everywhere or nowhere
            if (im.source_correct || !im.delivery_tick.empty()) {
                CHECK(im.delivery_tick.size() == 7);
            }
        }
    }
}

TEST_CASE("degraded slash witness sets are rescued by the fallback") {
    std::size_t rescued = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        ScenarioConfig cfg = base_config(24, 7, Protocol::WbbWithRecovery);
        cfg.seed = seed;
        cfg.witness.mode = OracleMode::Slash;
        cfg.slash.b = 8;
        cfg.slash.big_b = 32;
        cfg.slash.r = 1 << 12;
        cfg.delay.jitter = 6;
        cfg.delay.loss_prob = 0.03;
        cfg.timeout_ticks = 90;
        cfg.adversary.modes = {AdvMode::MuteWitness};
        cfg.adversary.count = 7;
        cfg.adversary.corrupted = {17, 18, 19, 20, 21, 22, 23};
        cfg.workload.sources = {0, 1, 2};
        cfg.workload.instances_per_process = 2;
        const RunResult result = run(cfg);
        CHECK(result.summary.consistency_violations == 0);
        CHECK(result.summary.liveness_failures == 0);
        if (result.summary.max_latency > 90) {
            ++rescued;
        }
    }
    CHECK(rescued > 0);  // the fallback path must actually fire in the sweep
}
