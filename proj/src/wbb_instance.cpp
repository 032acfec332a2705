#include "wbb/wbb_instance.hpp"

#include <stdexcept>

namespace wbb {

const char* to_string(MsgKind k) {
    switch (k) {
        case MsgKind::NOTIFY: return "NOTIFY";
        case MsgKind::ECHO: return "ECHO";
        case MsgKind::READY: return "READY";
        case MsgKind::VALIDATE: return "VALIDATE";
        case MsgKind::RECOVER: return "RECOVER";
        case MsgKind::REPLY: return "REPLY";
        case MsgKind::RECOVERY_ECHO: return "RECOVERY_ECHO";
        case MsgKind::RECOVERY_READY: return "RECOVERY_READY";
        case MsgKind::LOG: return "LOG";
    }
    return "?";
}

const char* to_string(MsgTag t) {
    switch (t) {
        case MsgTag::NONE: return "-";
        case MsgTag::W: return "W";
        case MsgTag::PI: return "PI";
    }
    return "?";
}

void Emission::merge(Emission&& other) {
    for (Send& s : other.sends) {
        sends.push_back(std::move(s));
    }
    if (!deliver.has_value()) {
        deliver = other.deliver;
    }
    arm_timeout = arm_timeout || other.arm_timeout;
    rejected += other.rejected;
}

bool Emission::empty() const {
    return sends.empty() && !deliver.has_value() && !arm_timeout;
}

std::size_t quorum_size(std::size_t n, std::size_t f) {
    if (3 * f >= n) {
        throw std::invalid_argument("quorum_size: fault bound requires f < n/3");
    }
    return (n + f) / 2 + 1;
}

WbbInstance::WbbInstance(EventId event, ProcessId self, std::size_t n, std::size_t f,
                         bool recovery_enabled)
    : event_(event),
      self_(self),
      n_(n),
      f_(f),
      quorum_(quorum_size(n, f)),
      recovery_enabled_(recovery_enabled),
      recovery_(event, self, n, f) {}

Emission WbbInstance::init(const WitnessSets& ws) {
    Emission out;
    if (initialized_) {
        return out;  // at-most-once init
    }
    if (ws.k < 1) {
        throw std::invalid_argument("wbb init: threshold below 1");
    }
    initialized_ = true;
    ws_ = ws;
    witness_role_ = ws_.potential.contains(self_);
    out.arm_timeout = recovery_enabled_;
    return out;
}

ProtocolMessage WbbInstance::make(MsgKind kind, MsgTag tag, const Payload& payload) {
    ProtocolMessage msg;
    msg.instance = event_;
    msg.kind = kind;
    msg.tag = tag;
    msg.payload = payload;
    msg.sender = self_;
    return msg;
}

namespace {

int pi_rank(MsgKind kind) {
    switch (kind) {
        case MsgKind::NOTIFY: return 0;
        case MsgKind::ECHO: return 1;
        case MsgKind::READY: return 2;
        default: return -1;
    }
}

}  // namespace

void WbbInstance::note_pi_send(const ProtocolMessage& msg) {
    // The recovery envelope keeps the most advanced PI-tagged message: a
    // READY record must not be displaced by an ECHO that happens to be
    // emitted later under reordered deliveries.
    if (last_pi_.has_value() && pi_rank(msg.kind) < pi_rank(last_pi_->kind)) {
        return;
    }
    last_pi_ = msg;
    recovery_.set_last_pi(msg);
}

void WbbInstance::push_all(Emission& out, ProtocolMessage msg) {
    if (msg.tag == MsgTag::PI) {
        note_pi_send(msg);
    }
    out.sends.push_back(Send{true, {}, std::move(msg)});
}

void WbbInstance::push_potential(Emission& out, ProtocolMessage msg) {
    if (msg.tag == MsgTag::PI) {
        note_pi_send(msg);
    }
    if (!ws_.potential.empty()) {
        out.sends.push_back(Send{false, ws_.potential, std::move(msg)});
    }
}

Emission WbbInstance::broadcast(const Payload& m) {
    if (!initialized_) {
        throw std::logic_error("wbb broadcast: instance not initialized");
    }
    if (event_.source != self_ || m.event != event_) {
        throw std::logic_error("wbb broadcast: caller is not the source of this instance");
    }
    if (broadcast_called_) {
        throw std::logic_error("wbb broadcast: already broadcast on this instance");
    }
    broadcast_called_ = true;
    relayed_notify_ = true;  // the source's own NOTIFY doubles as the relay
    Emission out;
    push_potential(out, make(MsgKind::NOTIFY, MsgTag::PI, m));
    return out;
}

Emission WbbInstance::broadcast_recovery_only(const Payload& m) {
    if (!initialized_) {
        throw std::logic_error("wbb broadcast: instance not initialized");
    }
    if (event_.source != self_ || m.event != event_) {
        throw std::logic_error("wbb broadcast: caller is not the source of this instance");
    }
    if (broadcast_called_) {
        throw std::logic_error("wbb broadcast: already broadcast on this instance");
    }
    broadcast_called_ = true;
    relayed_notify_ = true;
    phase_ = InstancePhase::Recovering;
    // The would-be NOTIFY becomes the recovery envelope's content.
    note_pi_send(make(MsgKind::NOTIFY, MsgTag::PI, m));
    return recovery_.on_timeout();
}

Emission WbbInstance::on_timeout() {
    Emission out;
    if (!initialized_) {
        return out;
    }
    if (!delivered_.has_value()) {
        phase_ = InstancePhase::Recovering;
    }
    Emission rec = recovery_.on_timeout();
    if (rec.deliver.has_value()) {
        apply_delivery(rec, *rec.deliver);
    }
    out.merge(std::move(rec));
    return out;
}

void WbbInstance::apply_delivery(Emission& out, const Payload& payload) {
    if (!delivered_.has_value()) {
        delivered_ = payload;
        out.deliver = payload;
        out.merge(recovery_.note_delivery(payload));
    }
}

bool WbbInstance::record_vote(const ProtocolMessage& msg) {
    auto& bucket = votes_[{msg.kind, msg.tag}];
    return bucket.emplace(msg.sender, *msg.payload).second;
}

std::size_t WbbInstance::votes(MsgKind kind, MsgTag tag, const Payload& payload,
                               const IdSet* restrict_to) const {
    auto it = votes_.find({kind, tag});
    if (it == votes_.end()) {
        return 0;
    }
    std::size_t count = 0;
    for (const auto& [sender, voted] : it->second) {
        if (voted == payload && (restrict_to == nullptr || restrict_to->contains(sender))) {
            ++count;
        }
    }
    return count;
}

Emission WbbInstance::on_message(const ProtocolMessage& msg) {
    Emission out;
    if (!initialized_) {
        throw std::logic_error("wbb on_message: instance not initialized");
    }
    if (msg.instance != event_) {
        ++rejected_;
        return out;
    }
    switch (msg.kind) {
        case MsgKind::NOTIFY:
        case MsgKind::ECHO:
        case MsgKind::READY:
        case MsgKind::VALIDATE:
            return handle_witness_path(msg);
        case MsgKind::RECOVER:
        case MsgKind::REPLY:
        case MsgKind::RECOVERY_ECHO:
        case MsgKind::RECOVERY_READY: {
            Emission rec = recovery_.on_message(msg);
            if (rec.deliver.has_value()) {
                const Payload payload = *rec.deliver;
                rec.deliver.reset();
                apply_delivery(rec, payload);
            }
            return rec;
        }
        default:
            ++rejected_;
            return out;
    }
}

Emission WbbInstance::handle_witness_path(const ProtocolMessage& msg) {
    Emission out;
    // Tag discipline: NOTIFY is PI-tagged, ECHO/READY are W- or PI-tagged,
    // VALIDATE is untagged. Anything else signals a Byzantine sender.
    const bool tag_ok = (msg.kind == MsgKind::NOTIFY && msg.tag == MsgTag::PI) ||
                        (msg.kind == MsgKind::ECHO && msg.tag != MsgTag::NONE) ||
                        (msg.kind == MsgKind::READY && msg.tag != MsgTag::NONE) ||
                        (msg.kind == MsgKind::VALIDATE && msg.tag == MsgTag::NONE);
    if (!tag_ok || !msg.payload.has_value() || msg.payload->event != event_ ||
        !msg.source_signed) {
        ++rejected_;
        return out;
    }
    if (!record_vote(msg)) {
        return out;  // duplicate sender for this (kind, tag)
    }
    const Payload m = *msg.payload;

    // First sighting of a payload is relayed to the potential witnesses so
    // they can make progress even when the source never reached them.
    if (recovery_enabled_ && !relayed_notify_) {
        relayed_notify_ = true;
        push_potential(out, make(MsgKind::NOTIFY, MsgTag::PI, m));
    }

    switch (msg.kind) {
        case MsgKind::NOTIFY:
            if (witness_role_ && !sent_echo_w_) {
                sent_echo_w_ = true;
                push_all(out, make(MsgKind::ECHO, MsgTag::W, m));
            }
            break;
        case MsgKind::ECHO:
            if (msg.tag == MsgTag::W) {
                if (!sent_echo_pi_) {
                    sent_echo_pi_ = true;
                    push_potential(out, make(MsgKind::ECHO, MsgTag::PI, m));
                }
            } else if (witness_role_ && !sent_ready_w_ &&
                       votes(MsgKind::ECHO, MsgTag::PI, m, nullptr) >= quorum_) {
                sent_ready_w_ = true;
                push_all(out, make(MsgKind::READY, MsgTag::W, m));
            }
            break;
        case MsgKind::READY:
            if (msg.tag == MsgTag::W) {
                if (!sent_ready_pi_ && votes(MsgKind::READY, MsgTag::W, m, &ws_.own) >= ws_.k) {
                    sent_ready_pi_ = true;
                    push_potential(out, make(MsgKind::READY, MsgTag::PI, m));
                }
            } else {
                if (witness_role_ && !sent_ready_w_ &&
                    votes(MsgKind::READY, MsgTag::PI, m, nullptr) >= f_ + 1) {
                    sent_ready_w_ = true;
                    push_all(out, make(MsgKind::READY, MsgTag::W, m));
                }
                if (witness_role_ && !sent_validate_ &&
                    votes(MsgKind::READY, MsgTag::PI, m, nullptr) >= quorum_) {
                    sent_validate_ = true;
                    push_all(out, make(MsgKind::VALIDATE, MsgTag::NONE, m));
                }
            }
            break;
        case MsgKind::VALIDATE:
            if (votes(MsgKind::VALIDATE, MsgTag::NONE, m, &ws_.own) >= ws_.k) {
                apply_delivery(out, m);
            }
            break;
        default:
            break;
    }
    return out;
}

}  // namespace wbb
