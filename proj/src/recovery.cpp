#include "wbb/recovery.hpp"

#include "wbb/wbb_instance.hpp"

namespace wbb {

RecoveryState::RecoveryState(EventId event, ProcessId self, std::size_t n, std::size_t f)
    : event_(event), self_(self), n_(n), f_(f), quorum_(quorum_size(n, f)) {}

void RecoveryState::set_last_pi(const ProtocolMessage& msg) {
    last_pi_ = msg;
}

ProtocolMessage RecoveryState::make(MsgKind kind, const std::optional<Payload>& payload) const {
    ProtocolMessage msg;
    msg.instance = event_;
    msg.kind = kind;
    msg.tag = MsgTag::NONE;
    msg.payload = payload;
    msg.sender = self_;
    return msg;
}

Emission RecoveryState::note_delivery(const Payload& payload) {
    if (!delivered_.has_value()) {
        delivered_ = payload;
    }
    if (!gate_open_) {
        gate_open_ = true;
        return open_gate();
    }
    return {};
}

Emission RecoveryState::open_gate() {
    Emission out;
    replaying_ = true;
    std::vector<ProtocolMessage> pending;
    pending.swap(buffer_);
    for (const ProtocolMessage& msg : pending) {
        out.merge(process(msg));
    }
    replaying_ = false;
    return out;
}

Emission RecoveryState::send_own_recover() {
    Emission out;
    recover_sent_ = true;
    ProtocolMessage msg = make(MsgKind::RECOVER,
                               last_pi_.has_value() ? last_pi_->payload : std::nullopt);
    if (last_pi_.has_value()) {
        msg.embedded_kind = last_pi_->kind;
    }
    out.sends.push_back(Send{true, {}, std::move(msg)});
    return out;
}

Emission RecoveryState::on_timeout() {
    Emission out;
    const bool was_open = gate_open_;
    gate_open_ = true;
    if (!delivered_.has_value() && !recover_sent_) {
        out.merge(send_own_recover());
    }
    if (!was_open) {
        out.merge(open_gate());
    }
    return out;
}

Emission RecoveryState::on_message(const ProtocolMessage& msg) {
    if (msg.instance != event_) {
        ++rejected_;
        return {};
    }
    if (!gate_open_) {
        buffer_.push_back(msg);
        return {};
    }
    return process(msg);
}

Emission RecoveryState::process(const ProtocolMessage& msg) {
    Emission out;
    // Payload-bearing recovery messages must embed this instance and pass
    // the source-signature check.
    if (msg.payload.has_value() &&
        (msg.payload->event != event_ || !msg.source_signed)) {
        ++rejected_;
        return out;
    }
    switch (msg.kind) {
        case MsgKind::RECOVER: {
            if (msg.payload.has_value() != msg.embedded_kind.has_value()) {
                ++rejected_;
                return out;
            }
            rec_hist_.emplace(msg.sender, RecoverRecord{msg.payload, msg.embedded_kind});
            if (delivered_.has_value()) {
                Emission reply;
                reply.sends.push_back(
                    Send{false, IdSet{msg.sender}, make(MsgKind::REPLY, *delivered_)});
                out.merge(std::move(reply));
            }
            if (rec_hist_.size() >= f_ + 1 && !recover_sent_) {
                out.merge(send_own_recover());
            }
            maybe_echo(out);
            break;
        }
        case MsgKind::REPLY: {
            if (!msg.payload.has_value()) {
                ++rejected_;
                return out;
            }
            replies_.emplace(msg.sender, *msg.payload);
            std::size_t votes = 0;
            for (const auto& [sender, payload] : replies_) {
                if (payload == *msg.payload) {
                    ++votes;
                }
            }
            if (votes >= f_ + 1 && !delivered_.has_value()) {
                delivered_ = *msg.payload;
                out.deliver = *msg.payload;
            }
            break;
        }
        case MsgKind::RECOVERY_ECHO: {
            if (!msg.payload.has_value()) {
                ++rejected_;
                return out;
            }
            echoes_.emplace(msg.sender, *msg.payload);
            maybe_ready(out);
            break;
        }
        case MsgKind::RECOVERY_READY: {
            if (!msg.payload.has_value()) {
                ++rejected_;
                return out;
            }
            readies_.emplace(msg.sender, *msg.payload);
            maybe_ready(out);
            maybe_deliver(out);
            break;
        }
        default:
            ++rejected_;
            break;
    }
    return out;
}

void RecoveryState::maybe_echo(Emission& out) {
    if (echo_sent_) {
        return;
    }
    // A value backed by f+1 READY-PI envelopes may be echoed outright.
    std::map<Payload, std::size_t> ready_votes;
    for (const auto& [sender, rec] : rec_hist_) {
        if (rec.payload.has_value() && rec.kind == MsgKind::READY) {
            const std::size_t votes = ++ready_votes[*rec.payload];
            if (votes >= f_ + 1) {
                echo_sent_ = true;
                out.sends.push_back(Send{true, {}, make(MsgKind::RECOVERY_ECHO, *rec.payload)});
                maybe_ready(out);
                return;
            }
        }
    }
    // Otherwise a quorum of RECOVER envelopes naming one unique value decides.
    if (rec_hist_.size() < quorum_) {
        return;
    }
    std::optional<Payload> unique;
    bool ambiguous = false;
    for (const auto& [sender, rec] : rec_hist_) {
        if (!rec.payload.has_value()) {
            continue;
        }
        if (!unique.has_value()) {
            unique = rec.payload;
        } else if (*unique != *rec.payload) {
            ambiguous = true;
            break;
        }
    }
    if (unique.has_value() && !ambiguous) {
        echo_sent_ = true;
        out.sends.push_back(Send{true, {}, make(MsgKind::RECOVERY_ECHO, *unique)});
        maybe_ready(out);
    }
}

void RecoveryState::maybe_ready(Emission& out) {
    if (ready_sent_) {
        return;
    }
    std::map<Payload, std::size_t> echo_votes;
    for (const auto& [sender, payload] : echoes_) {
        ++echo_votes[payload];
    }
    std::map<Payload, std::size_t> ready_votes;
    for (const auto& [sender, payload] : readies_) {
        ++ready_votes[payload];
    }
    for (const auto& [payload, votes] : echo_votes) {
        if (votes >= quorum_) {
            ready_sent_ = true;
            out.sends.push_back(Send{true, {}, make(MsgKind::RECOVERY_READY, payload)});
            return;
        }
    }
    for (const auto& [payload, votes] : ready_votes) {
        if (votes >= f_ + 1) {
            ready_sent_ = true;
            out.sends.push_back(Send{true, {}, make(MsgKind::RECOVERY_READY, payload)});
            return;
        }
    }
}

void RecoveryState::maybe_deliver(Emission& out) {
    if (delivered_.has_value()) {
        return;
    }
    std::map<Payload, std::size_t> ready_votes;
    for (const auto& [sender, payload] : readies_) {
        ++ready_votes[payload];
    }
    for (const auto& [payload, votes] : ready_votes) {
        if (votes >= quorum_) {
            delivered_ = payload;
            out.deliver = payload;
            return;
        }
    }
}

}  // namespace wbb
