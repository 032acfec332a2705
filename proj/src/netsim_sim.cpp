#include "wbb/netsim/sim.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "wbb/analysis.hpp"
#include "wbb/bracha.hpp"
#include "wbb/longlived.hpp"
#include "wbb/rng.hpp"
#include "wbb/wbb_instance.hpp"

namespace wbb::netsim {

namespace {

std::uint64_t message_units(const ProtocolMessage& msg, std::uint64_t log_delta) {
    if (msg.kind == MsgKind::LOG) {
        return 24 + 24 * log_delta;
    }
    std::uint64_t units = 48;
    if (msg.payload.has_value()) {
        units += 80;
    }
    if (msg.embedded_kind.has_value()) {
        units += 8;
    }
    return units;
}

struct QueuedEvent {
    enum class Type { Message, Timer, Round, Kick };

    std::uint64_t t = 0;
    std::size_t sender = 0;  // tie-break after the timestamp
    std::uint64_t seqno = 0;
    Type type = Type::Message;
    std::size_t dst = 0;
    ProtocolMessage msg;
    EventId timer_event;
};

struct EventAfter {
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.sender != b.sender) return a.sender > b.sender;
        return a.seqno > b.seqno;
    }
};

template <typename MapA, typename MapB>
std::uint64_t key_set_dist(const MapA& a, const MapB& b) {
    std::uint64_t diff = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++diff;
            ++ia;
        } else if (ib->first < ia->first) {
            ++diff;
            ++ib;
        } else {
            ++ia;
            ++ib;
        }
    }
    diff += std::distance(ia, a.end());
    diff += std::distance(ib, b.end());
    return diff;
}

struct SimProcess {
    std::size_t index = 0;
    ProcessId id;
    bool corrupted = false;
    LongLivedProcess app;
    SlashState history;
    std::map<EventId, WbbInstance> wbb;
    std::map<EventId, BrachaInstance> bracha;
    std::size_t instances_left = 0;
    bool is_source = false;
    // rounds
    RoundDecision decision = RoundDecision::UseWbb;
    std::set<std::pair<EventId, std::uint64_t>> ready_log;
    std::map<std::uint64_t, std::vector<RoundLog>> log_buffer;
    RoundLog prev_sent_log;
    std::vector<std::uint64_t> deliveries_by_round;
    // slow-adaptive corruption
    std::optional<std::size_t> corrupt_after_deliveries;

    SimProcess(std::size_t idx, ProcessId pid, const SlashParams& sp)
        : index(idx), id(pid), app(pid), history(SlashState::empty(sp)) {}
};

class Sim {
public:
    Sim(const ScenarioConfig& cfg, std::ostream* trace)
        : cfg_(cfg), rng_(cfg.seed), trace_(trace) {
        cfg_.validate();
        n_ = cfg_.n;
        f_ = cfg_.resolved_f();
        recovery_ = cfg_.recovery_enabled();
        timeout_ = cfg_.resolved_timeout();
        setup_roster();
        setup_oracle();
        setup_workload();
        setup_rounds();
    }

    RunResult run();

private:
    void setup_roster();
    void setup_oracle();
    void setup_workload();
    void setup_rounds();

    WitnessSets sample_witnesses(SimProcess& p, const EventId& event);
    void handle_kick(std::size_t src);
    void handle_message(std::size_t dst, const ProtocolMessage& msg);
    void handle_timer(std::size_t dst, const EventId& event);
    void handle_round_boundary();
    void apply(SimProcess& p, const EventId& event, Emission&& em);
    void route(SimProcess& sender, Send&& send, std::uint64_t log_delta = 0);
    std::vector<Send> adversary_transform(SimProcess& p, const EventId& event,
                                          std::vector<Send>&& sends);
    void app_deliver(SimProcess& p, const Payload& payload);
    void check_history_gap(const SimProcess& changed);
    std::uint64_t draw_delay(std::size_t from, std::size_t to);
    void schedule(QueuedEvent ev);
    void trace_event(const char* type, std::size_t proc, const std::string& extra);
    void finalize(RunResult& result);

    ScenarioConfig cfg_;
    Rng rng_;
    std::ostream* trace_;

    std::size_t n_ = 0;
    std::size_t f_ = 0;
    bool recovery_ = false;
    std::uint64_t timeout_ = 0;

    std::vector<SimProcess> procs_;
    std::vector<ProcessId> roster_;
    std::unordered_map<ProcessId, std::size_t, ProcessIdHash> index_of_;
    std::set<std::pair<EventId, std::uint64_t>> sig_table_;
    std::map<EventId, std::pair<std::uint64_t, std::uint64_t>> equiv_bodies_;
    std::map<EventId, WitnessSets> forced_cache_;

    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, EventAfter> queue_;
    std::uint64_t seqno_ = 0;
    std::uint64_t now_ = 0;
    std::uint64_t events_processed_ = 0;

    OracleParams slash_oracle_;
    std::size_t forced_w_ = 0;
    std::size_t forced_v_ = 0;
    std::size_t nominal_k_ = 0;
    std::size_t nominal_v_ = 0;

    std::vector<std::size_t> sources_;
    std::size_t broadcast_ordinal_ = 0;
    std::size_t corrupted_count_ = 0;
    bool adaptive_pending_ = false;

    std::uint64_t round_index_ = 0;
    std::uint64_t max_pair_gap_ = 0;
    std::set<EventId> prev_round_delivered_;
    std::size_t min_ready_support_ = SIZE_MAX;

    std::map<EventId, InstanceMetrics> metrics_;
    RunSummary summary_;
    bool truncated_ = false;
};

void Sim::setup_roster() {
    roster_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        Bytes seed_bytes = {'n', 'o', 'd', 'e'};
        for (int s = 7; s >= 0; --s) {
            seed_bytes.push_back(static_cast<std::uint8_t>(cfg_.seed >> (8 * s)));
        }
        for (int s = 7; s >= 0; --s) {
            seed_bytes.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(i) >> (8 * s)));
        }
        ProcessId pid{sha256(seed_bytes)};
        roster_.push_back(pid);
        index_of_[pid] = i;
        procs_.emplace_back(i, pid, cfg_.slash);
    }
    // corrupted set: explicit indices, topped up by seeded draw
    std::set<std::size_t> corrupted(cfg_.adversary.corrupted.begin(),
                                    cfg_.adversary.corrupted.end());
    if (corrupted.size() < cfg_.adversary.count &&
        !cfg_.adversary.modes.contains(AdvMode::SlowAdaptive)) {
        for (std::size_t idx : rng_.sample_indices(n_, n_)) {
            if (corrupted.size() >= cfg_.adversary.count) {
                break;
            }
            corrupted.insert(idx);
        }
    }
    for (std::size_t idx : corrupted) {
        procs_[idx].corrupted = true;
    }
    corrupted_count_ = corrupted.size();
    adaptive_pending_ = cfg_.adversary.modes.contains(AdvMode::SlowAdaptive);
}

void Sim::setup_oracle() {
    const double w_size = cfg_.resolved_w_size();
    const double v_size = cfg_.resolved_v_size();
    forced_w_ = std::max<std::size_t>(1, static_cast<std::size_t>(w_size + 0.5));
    forced_v_ = std::max(forced_w_, static_cast<std::size_t>(v_size + 0.5));
    forced_w_ = std::min(forced_w_, n_);
    forced_v_ = std::min(forced_v_, n_);
    nominal_k_ = cfg_.witness.k.value_or(forced_w_ / 2 + 1);
    nominal_v_ = forced_v_;
    if (cfg_.witness.mode == OracleMode::Slash && cfg_.protocol != Protocol::Bracha) {
        const std::uint64_t d = analysis::calibrate_radius(cfg_.slash.r, cfg_.slash.b, n_, w_size);
        const std::uint64_t dv = analysis::calibrate_radius(cfg_.slash.r, cfg_.slash.b, n_, v_size);
        slash_oracle_.d = d;
        slash_oracle_.gamma = dv > d ? dv - d : 0;
        slash_oracle_.mu = cfg_.oracle_mu;
        slash_oracle_.expected_w = w_size;
        slash_oracle_.k = cfg_.witness.k.value_or(1);
    }
    summary_.witness_w = forced_w_;
    summary_.witness_v = forced_v_;
    summary_.witness_k = nominal_k_;
    summary_.oracle_d = slash_oracle_.d;
    summary_.oracle_gamma = slash_oracle_.gamma;
}

void Sim::setup_workload() {
    sources_ = cfg_.workload.sources;
    if (sources_.empty()) {
        for (std::size_t i = 0; i < n_; ++i) {
            sources_.push_back(i);
        }
    }
    for (std::size_t idx : sources_) {
        procs_[idx].instances_left = cfg_.workload.instances_per_process;
        procs_[idx].is_source = true;
    }
    if (cfg_.workload.closed_loop) {
        for (std::size_t idx : sources_) {
            schedule(QueuedEvent{0, idx, 0, QueuedEvent::Type::Kick, idx, {}, {}});
        }
    } else {
        const std::uint64_t interval = cfg_.workload.pace_interval;
        const std::size_t total = sources_.size() * cfg_.workload.instances_per_process;
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t src = sources_[i % sources_.size()];
            schedule(QueuedEvent{interval * (i + 1), src, 0, QueuedEvent::Type::Kick, src,
                                 {}, {}});
        }
    }
}

void Sim::setup_rounds() {
    if (!cfg_.rounds.enabled) {
        return;
    }
    for (std::uint64_t r = 0; r <= cfg_.rounds.budget; ++r) {
        schedule(QueuedEvent{r * cfg_.rounds.cfg.delta_ticks, 0, 0, QueuedEvent::Type::Round,
                             0, {}, {}});
    }
    summary_.gate_feasible = cfg_.rounds.cfg.feasible();
}

void Sim::schedule(QueuedEvent ev) {
    ev.seqno = seqno_++;
    queue_.push(std::move(ev));
}

std::uint64_t Sim::draw_delay(std::size_t from, std::size_t to) {
    std::uint64_t d = cfg_.delay.base;
    if (cfg_.delay.jitter > 0) {
        d += rng_.below(cfg_.delay.jitter + 1);
    }
    if (cfg_.delay.loss_prob > 0 && rng_.chance(cfg_.delay.loss_prob)) {
        d += cfg_.delay.penalty();  // lost once, re-dispatched after the penalty
    }
    if (cfg_.delay.slow_factor > 1) {
        for (std::size_t idx : cfg_.delay.slow) {
            if (idx == from || idx == to) {
                d *= cfg_.delay.slow_factor;
                break;
            }
        }
    }
    return d;
}

void Sim::trace_event(const char* type, std::size_t proc, const std::string& extra) {
    if (trace_ == nullptr) {
        return;
    }
    (*trace_) << "{\"t\":" << now_ << ",\"ev\":\"" << type << "\",\"p\":" << proc;
    if (!extra.empty()) {
        (*trace_) << "," << extra;
    }
    (*trace_) << "}\n";
}

WitnessSets Sim::sample_witnesses(SimProcess& p, const EventId& event) {
    WitnessSets ws;
    switch (cfg_.witness.mode) {
        case OracleMode::Slash: {
            const WitnessSelection sel =
                select_witnesses(p.history, roster_, event, slash_oracle_);
            ws.own = sel.own;
            ws.potential = sel.potential;
            ws.k = cfg_.witness.k.value_or(std::max<std::size_t>(1, ws.own.size() / 2 + 1));
            break;
        }
        case OracleMode::ForcedGood: {
            auto it = forced_cache_.find(event);
            if (it == forced_cache_.end()) {
                // One global witness set per instance with at least k correct
                // and at most k-1 faulty members.
                const std::size_t w = forced_w_;
                const std::size_t k = cfg_.witness.k.value_or(w / 2 + 1);
                std::vector<std::size_t> correct_idx, faulty_idx;
                for (const SimProcess& q : procs_) {
                    (q.corrupted ? faulty_idx : correct_idx).push_back(q.index);
                }
                const std::size_t wf = std::min(faulty_idx.size(), w - k);
                const std::size_t wc = std::min(correct_idx.size(), w - wf);
                rng_.shuffle(correct_idx);
                rng_.shuffle(faulty_idx);
                WitnessSets sets;
                sets.k = k;
                for (std::size_t i = 0; i < wc; ++i) {
                    sets.own.insert(roster_[correct_idx[i]]);
                }
                for (std::size_t i = 0; i < wf; ++i) {
                    sets.own.insert(roster_[faulty_idx[i]]);
                }
                sets.potential = sets.own;
                for (std::size_t i = wc; i < correct_idx.size(); ++i) {
                    if (sets.potential.size() >= forced_v_) {
                        break;
                    }
                    sets.potential.insert(roster_[correct_idx[i]]);
                }
                it = forced_cache_.emplace(event, std::move(sets)).first;
            }
            ws = it->second;
            break;
        }
        case OracleMode::ForcedBad: {
            for (const SimProcess& q : procs_) {
                if (q.corrupted) {
                    ws.own.insert(q.id);
                }
            }
            ws.potential = ws.own;
            ws.k = cfg_.witness.k.value_or(std::max<std::size_t>(1, ws.own.size() / 2 + 1));
            break;
        }
    }
    // Slow-adaptive target lock: the adversary picks a witness of the marked
    // instance and gains control after that process completes delta more
    // instances.
    if (adaptive_pending_ && cfg_.adversary.adaptive_target_instance.has_value() &&
        broadcast_ordinal_ == *cfg_.adversary.adaptive_target_instance + 1) {
        for (const ProcessId& candidate : ws.own) {
            SimProcess& target = procs_[index_of_.at(candidate)];
            if (!target.corrupted && !target.corrupt_after_deliveries.has_value()) {
                target.corrupt_after_deliveries =
                    target.app.history().size() + cfg_.adversary.delta;
                adaptive_pending_ = false;
                trace_event("corrupt_armed", target.index, "");
                break;
            }
        }
    }
    return ws;
}

void Sim::handle_kick(std::size_t src) {
    SimProcess& p = procs_[src];
    if (p.instances_left == 0 || p.app.own_in_flight()) {
        return;
    }
    --p.instances_left;
    const EventId event = p.app.next_event();
    const std::uint64_t body = rng_.next_u64();
    sig_table_.insert({event, body});
    ++broadcast_ordinal_;
    const Payload payload{event, body};

    InstanceMetrics im;
    im.instance = event;
    im.source_index = src;
    im.source_correct = !p.corrupted;
    im.broadcast_tick = now_;
    metrics_.emplace(event, im);

    if (p.corrupted && cfg_.adversary.modes.contains(AdvMode::EquivocatingSource)) {
        const std::uint64_t alt = rng_.next_u64();
        sig_table_.insert({event, alt});
        equiv_bodies_[event] = {body, alt};
    }
    trace_event("broadcast", src, "\"seq\":" + std::to_string(event.seq));

    if (cfg_.protocol == Protocol::Bracha) {
        auto [it, fresh] = p.bracha.emplace(event, BrachaInstance(event, p.id, n_, f_));
        apply(p, event, it->second.broadcast(payload));
        return;
    }
    auto [it, fresh] = p.wbb.emplace(event, WbbInstance(event, p.id, n_, f_, recovery_));
    apply(p, event, it->second.init(sample_witnesses(p, event)));
    if (cfg_.rounds.enabled && p.decision == RoundDecision::UseRecovery && !p.corrupted) {
        apply(p, event, it->second.broadcast_recovery_only(payload));
    } else {
        apply(p, event, it->second.broadcast(payload));
    }
}

void Sim::handle_message(std::size_t dst, const ProtocolMessage& msg) {
    SimProcess& p = procs_[dst];
    if (trace_ != nullptr) {
        std::ostringstream extra;
        extra << "\"kind\":\"" << to_string(msg.kind) << "\",\"tag\":\""
              << to_string(msg.tag) << "\",\"src\":" << index_of_.at(msg.sender)
              << ",\"seq\":" << msg.instance.seq;
        if (msg.payload.has_value()) {
            extra << ",\"body\":" << msg.payload->body;
        }
        trace_event("recv", dst, extra.str());
    }
    if (msg.kind == MsgKind::LOG) {
        if (msg.log != nullptr) {
            p.log_buffer[msg.log->round].push_back(*msg.log);
        }
        return;
    }
    const EventId event = msg.instance;
    if (cfg_.protocol == Protocol::Bracha) {
        auto it = p.bracha.find(event);
        if (it == p.bracha.end()) {
            it = p.bracha.emplace(event, BrachaInstance(event, p.id, n_, f_)).first;
        }
        apply(p, event, it->second.on_message(msg));
        return;
    }
    auto it = p.wbb.find(event);
    if (it == p.wbb.end()) {
        it = p.wbb.emplace(event, WbbInstance(event, p.id, n_, f_, recovery_)).first;
        apply(p, event, it->second.init(sample_witnesses(p, event)));
    }
    apply(p, event, it->second.on_message(msg));
}

void Sim::handle_timer(std::size_t dst, const EventId& event) {
    SimProcess& p = procs_[dst];
    auto it = p.wbb.find(event);
    if (it == p.wbb.end()) {
        return;
    }
    trace_event("timeout", dst, "\"seq\":" + std::to_string(event.seq));
    apply(p, event, it->second.on_timeout());
}

void Sim::apply(SimProcess& p, const EventId& event, Emission&& em) {
    if (em.arm_timeout && recovery_) {
        schedule(QueuedEvent{now_ + timeout_, p.index, 0, QueuedEvent::Type::Timer, p.index,
                             {}, event});
    }
    if (em.deliver.has_value()) {
        app_deliver(p, *em.deliver);
    }
    if (em.sends.empty()) {
        return;
    }
    // Round logs track every READY this process emits, witness path or
    // recovery alike.
    for (const Send& s : em.sends) {
        if ((s.msg.kind == MsgKind::READY || s.msg.kind == MsgKind::RECOVERY_READY) &&
            s.msg.payload.has_value()) {
            p.ready_log.insert({s.msg.payload->event, s.msg.payload->body});
        }
    }
    std::vector<Send> sends = adversary_transform(p, event, std::move(em.sends));
    for (Send& s : sends) {
        route(p, std::move(s));
    }
}

std::vector<Send> Sim::adversary_transform(SimProcess& p, const EventId& event,
                                           std::vector<Send>&& sends) {
    if (!p.corrupted) {
        return std::move(sends);
    }
    const auto equiv = equiv_bodies_.find(event);
    std::vector<Send> out;
    for (Send& s : sends) {
        const bool is_notify_broadcast =
            s.msg.kind == MsgKind::NOTIFY && p.id == event.source;
        if (is_notify_broadcast && equiv != equiv_bodies_.end() &&
            cfg_.adversary.modes.contains(AdvMode::EquivocatingSource)) {
            // One half of the witnesses sees one payload, the rest the other.
            std::vector<ProcessId> targets;
            if (s.to_all) {
                targets = roster_;
            } else {
                targets.assign(s.to.begin(), s.to.end());
            }
            const std::size_t half = targets.size() / 2;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                Send split = s;
                split.to_all = false;
                split.to = IdSet{targets[i]};
                split.msg.payload =
                    Payload{event, i < half ? equiv->second.first : equiv->second.second};
                out.push_back(std::move(split));
            }
            continue;
        }
        const bool conflicting =
            cfg_.adversary.modes.contains(AdvMode::ConflictingValidate) &&
            equiv != equiv_bodies_.end() &&
            (s.msg.kind == MsgKind::VALIDATE ||
             (s.msg.kind == MsgKind::READY && s.msg.tag == MsgTag::W));
        if (conflicting) {
            std::vector<ProcessId> targets;
            if (s.to_all) {
                targets = roster_;
            } else {
                targets.assign(s.to.begin(), s.to.end());
            }
            const std::size_t half = targets.size() / 2;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                Send split = s;
                split.to_all = false;
                split.to = IdSet{targets[i]};
                split.msg.payload =
                    Payload{event, i < half ? equiv->second.first : equiv->second.second};
                out.push_back(std::move(split));
            }
            continue;
        }
        if (cfg_.adversary.modes.contains(AdvMode::MuteWitness)) {
            continue;  // silent otherwise
        }
        out.push_back(std::move(s));
    }
    return out;
}

void Sim::route(SimProcess& sender, Send&& send, std::uint64_t log_delta) {
    ProtocolMessage msg = std::move(send.msg);
    msg.sender = sender.id;  // the transport authenticates senders
    if (msg.payload.has_value()) {
        msg.source_signed = sig_table_.contains({msg.payload->event, msg.payload->body});
    }
    std::vector<std::size_t> targets;
    if (send.to_all) {
        targets.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            targets[i] = i;
        }
    } else {
        targets.reserve(send.to.size());
        for (const ProcessId& pid : send.to) {
            targets.push_back(index_of_.at(pid));
        }
    }
    const std::uint64_t units = message_units(msg, log_delta);
    for (std::size_t dst : targets) {
        if (msg.kind == MsgKind::LOG) {
            summary_.log_messages += 1;
            summary_.log_byte_units += units;
        } else {
            auto it = metrics_.find(msg.instance);
            if (it == metrics_.end()) {
                InstanceMetrics im;
                im.instance = msg.instance;
                im.source_index = index_of_.contains(msg.instance.source)
                                      ? index_of_.at(msg.instance.source)
                                      : 0;
                im.broadcast_tick = now_;
                it = metrics_.emplace(msg.instance, im).first;
            }
            it->second.messages += 1;
            it->second.byte_units += units;
            summary_.messages += 1;
            summary_.messages_by_kind[to_string(msg.kind)] += 1;
            summary_.byte_units += units;
        }
        schedule(QueuedEvent{now_ + draw_delay(sender.index, dst), sender.index, 0,
                             QueuedEvent::Type::Message, dst, msg, {}});
    }
}

void Sim::app_deliver(SimProcess& p, const Payload& payload) {
    auto it = metrics_.find(payload.event);
    if (it != metrics_.end() && !p.corrupted) {
        it->second.delivery_tick.emplace(p.index, now_);
        it->second.delivered_body.emplace(p.index, payload.body);
        summary_.deliveries += 1;
    }
    trace_event("deliver", p.index,
                "\"seq\":" + std::to_string(payload.event.seq) +
                    ",\"body\":" + std::to_string(payload.body));
    p.app.on_deliver(payload);
    slash_absorb_inplace(p.history, encode_event(payload.event));
    // a delivered message always counts as READY-backed in the round log
    p.ready_log.insert({payload.event, payload.body});
    if (cfg_.rounds.enabled) {
        if (p.deliveries_by_round.size() <= round_index_) {
            p.deliveries_by_round.resize(round_index_ + 1, 0);
        }
        p.deliveries_by_round[round_index_] += 1;
        if (!p.corrupted && p.decision == RoundDecision::UseWbb) {
            check_history_gap(p);
        }
    }
    // slow-adaptive corruption becomes effective after the target finishes
    // enough instances
    if (p.corrupt_after_deliveries.has_value() &&
        p.app.history().size() >= *p.corrupt_after_deliveries && !p.corrupted) {
        if (corrupted_count_ < cfg_.adversary.count) {
            p.corrupted = true;
            ++corrupted_count_;
            trace_event("corrupt", p.index, "");
        } else {
            p.corrupt_after_deliveries.reset();
            trace_event("corrupt_rejected", p.index, "");
        }
    }
    if (cfg_.workload.closed_loop && payload.event.source == p.id && p.is_source &&
        p.instances_left > 0) {
        schedule(QueuedEvent{now_, p.index, 0, QueuedEvent::Type::Kick, p.index, {}, {}});
    }
}

void Sim::check_history_gap(const SimProcess& changed) {
    for (const SimProcess& q : procs_) {
        if (q.index == changed.index || q.corrupted ||
            q.decision != RoundDecision::UseWbb) {
            continue;
        }
        const std::uint64_t gap = key_set_dist(changed.app.history(), q.app.history());
        max_pair_gap_ = std::max(max_pair_gap_, gap);
    }
}

void Sim::handle_round_boundary() {
    const RoundConfig& rc = cfg_.rounds.cfg;
    // Every message delivered before the previous boundary must be READY-
    // backed by enough correct logs now; track the worst support seen.
    for (const EventId& event : prev_round_delivered_) {
        std::size_t support = 0;
        for (const SimProcess& q : procs_) {
            if (q.corrupted) {
                continue;
            }
            auto it = q.ready_log.lower_bound({event, 0});
            if (it != q.ready_log.end() && it->first == event) {
                ++support;
            }
        }
        min_ready_support_ = std::min(min_ready_support_, support);
    }
    prev_round_delivered_.clear();
    for (const SimProcess& q : procs_) {
        if (!q.corrupted) {
            for (const auto& [event, body] : q.app.history()) {
                prev_round_delivered_.insert(event);
            }
        }
    }
    if (round_index_ > 0) {
        const std::uint64_t prev = round_index_ - 1;
        for (SimProcess& p : procs_) {
            if (p.corrupted) {
                continue;
            }
            RoundLog local;
            local.round = prev;
            local.owner = p.id;
            for (const auto& [event, body] : p.app.history()) {
                local.delivered.insert(event);
            }
            local.ready_sent = p.ready_log;
            std::vector<RoundLog> received;
            auto buf = p.log_buffer.find(prev);
            if (buf != p.log_buffer.end()) {
                received = buf->second;
            }
            received.push_back(local);  // a process holds its own log
            p.decision = round_tick(local, received, n_, f_, rc);
            if (p.decision == RoundDecision::UseWbb) {
                summary_.decisions_wbb += 1;
            } else {
                summary_.decisions_recovery += 1;
            }
            trace_event("decide", p.index,
                        "\"round\":" + std::to_string(round_index_) + ",\"wbb\":" +
                            (p.decision == RoundDecision::UseWbb ? "1" : "0"));
            p.log_buffer.erase(p.log_buffer.begin(), p.log_buffer.upper_bound(prev));
        }
        // check the history gap right after decisions take effect
        for (const SimProcess& p : procs_) {
            if (!p.corrupted && p.decision == RoundDecision::UseWbb) {
                check_history_gap(p);
            }
        }
    }
    summary_.rounds_run = round_index_ + 1;
    for (SimProcess& p : procs_) {
        RoundLog log;
        log.round = round_index_;
        log.owner = p.id;
        for (const auto& [event, body] : p.app.history()) {
            log.delivered.insert(event);
        }
        log.ready_sent = p.ready_log;
        const std::uint64_t delta = set_dist(log.delivered, p.prev_sent_log.delivered) +
                                    set_dist(log.ready_sent, p.prev_sent_log.ready_sent);
        ProtocolMessage msg;
        msg.instance = EventId{p.id, round_index_};
        msg.kind = MsgKind::LOG;
        msg.sender = p.id;
        msg.log = std::make_shared<const RoundLog>(log);
        p.prev_sent_log = log;
        IdSet others;
        for (const SimProcess& q : procs_) {
            if (q.index != p.index) {
                others.insert(q.id);
            }
        }
        Send send{false, std::move(others), std::move(msg)};
        std::vector<Send> sends;
        sends.push_back(std::move(send));
        sends = adversary_transform(p, EventId{p.id, round_index_}, std::move(sends));
        for (Send& s : sends) {
            route(p, std::move(s), delta);
        }
    }
    ++round_index_;
}

RunResult Sim::run() {
    while (!queue_.empty()) {
        if (++events_processed_ > cfg_.max_events) {
            truncated_ = true;
            break;
        }
        QueuedEvent ev = queue_.top();
        queue_.pop();
        if (cfg_.duration_ticks.has_value() && ev.t > *cfg_.duration_ticks) {
            truncated_ = true;
            break;
        }
        now_ = ev.t;
        switch (ev.type) {
            case QueuedEvent::Type::Message:
                handle_message(ev.dst, ev.msg);
                break;
            case QueuedEvent::Type::Timer:
                handle_timer(ev.dst, ev.timer_event);
                break;
            case QueuedEvent::Type::Round:
                handle_round_boundary();
                break;
            case QueuedEvent::Type::Kick:
                handle_kick(ev.dst);
                break;
        }
    }
    RunResult result;
    finalize(result);
    return result;
}

void Sim::finalize(RunResult& result) {
    summary_.label = cfg_.label;
    summary_.protocol = cfg_.protocol;
    summary_.n = n_;
    summary_.f = f_;
    summary_.seed = cfg_.seed;
    summary_.duration = now_;
    summary_.truncated = truncated_;
    summary_.max_wbb_pair_history_diff = max_pair_gap_;
    summary_.min_ready_log_support =
        min_ready_support_ == SIZE_MAX ? 0 : min_ready_support_;

    std::size_t n_correct = 0;
    for (const SimProcess& p : procs_) {
        if (!p.corrupted) {
            ++n_correct;
        }
    }
    std::vector<std::uint64_t> latencies;
    std::size_t fully_delivered = 0;
    for (auto& [event, im] : metrics_) {
        summary_.instances += 1;
        if (!im.consistent()) {
            summary_.consistency_violations += 1;
        }
        const std::size_t got = im.delivery_tick.size();
        if (!truncated_ && got < n_correct && (got > 0 || im.source_correct)) {
            summary_.liveness_failures += 1;
        }
        if (got == n_correct && n_correct > 0) {
            ++fully_delivered;
        }
        for (const auto& [idx, tick] : im.delivery_tick) {
            latencies.push_back(tick - im.broadcast_tick);
        }
        if (cfg_.protocol != Protocol::Bracha && nominal_v_ > 0) {
            const double c = static_cast<double>(im.messages) /
                             (static_cast<double>(n_) * static_cast<double>(nominal_v_));
            summary_.measured_message_constant =
                std::max(summary_.measured_message_constant, c);
        }
    }
    if (!latencies.empty()) {
        std::sort(latencies.begin(), latencies.end());
        std::uint64_t sum = 0;
        for (std::uint64_t v : latencies) {
            sum += v;
        }
        summary_.mean_latency = static_cast<double>(sum) / static_cast<double>(latencies.size());
        summary_.p50_latency = static_cast<double>(latencies[latencies.size() / 2]);
        const std::size_t p95_idx = std::min(latencies.size() - 1, latencies.size() * 95 / 100);
        summary_.p95_latency = static_cast<double>(latencies[p95_idx]);
        summary_.max_latency = latencies.back();
    }
    if (now_ > 0) {
        summary_.throughput_per_ktick =
            1000.0 * static_cast<double>(fully_delivered) / static_cast<double>(now_);
    }
    if (cfg_.rounds.enabled) {
        for (const SimProcess& p : procs_) {
            if (p.corrupted) {
                continue;
            }
            for (std::size_t r = 0; r + 1 < p.deliveries_by_round.size(); ++r) {
                summary_.max_round_deliveries =
                    std::max(summary_.max_round_deliveries,
                             p.deliveries_by_round[r] + p.deliveries_by_round[r + 1]);
            }
            if (p.deliveries_by_round.size() == 1) {
                summary_.max_round_deliveries =
                    std::max(summary_.max_round_deliveries, p.deliveries_by_round[0]);
            }
        }
    }
    result.instances.reserve(metrics_.size());
    for (auto& [event, im] : metrics_) {
        result.instances.push_back(im);
    }
    std::sort(result.instances.begin(), result.instances.end(),
              [](const InstanceMetrics& a, const InstanceMetrics& b) {
                  if (a.broadcast_tick != b.broadcast_tick) {
                      return a.broadcast_tick < b.broadcast_tick;
                  }
                  if (a.source_index != b.source_index) {
                      return a.source_index < b.source_index;
                  }
                  return a.instance.seq < b.instance.seq;
              });
    result.summary = summary_;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg, std::ostream* trace) {
    Sim sim(cfg, trace);
    return sim.run();
}

}  // namespace wbb::netsim
