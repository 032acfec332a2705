#include "wbb/bracha.hpp"

#include <stdexcept>

#include "wbb/wbb_instance.hpp"

namespace wbb {

BrachaInstance::BrachaInstance(EventId event, ProcessId self, std::size_t n, std::size_t f)
    : event_(event), self_(self), n_(n), f_(f), quorum_(quorum_size(n, f)) {}

ProtocolMessage BrachaInstance::make(MsgKind kind, const Payload& payload) const {
    ProtocolMessage msg;
    msg.instance = event_;
    msg.kind = kind;
    msg.tag = MsgTag::PI;
    msg.payload = payload;
    msg.sender = self_;
    return msg;
}

std::size_t BrachaInstance::votes(MsgKind kind, const Payload& payload) const {
    auto it = votes_.find({kind, MsgTag::PI});
    if (it == votes_.end()) {
        return 0;
    }
    std::size_t count = 0;
    for (const auto& [sender, voted] : it->second) {
        if (voted == payload) {
            ++count;
        }
    }
    return count;
}

Emission BrachaInstance::broadcast(const Payload& m) {
    if (event_.source != self_ || m.event != event_) {
        throw std::logic_error("bracha broadcast: caller is not the source of this instance");
    }
    if (broadcast_called_) {
        throw std::logic_error("bracha broadcast: already broadcast on this instance");
    }
    broadcast_called_ = true;
    Emission out;
    out.sends.push_back(Send{true, {}, make(MsgKind::NOTIFY, m)});
    return out;
}

Emission BrachaInstance::on_message(const ProtocolMessage& msg) {
    Emission out;
    if (msg.instance != event_ || !msg.payload.has_value() ||
        msg.payload->event != event_ || !msg.source_signed || msg.tag != MsgTag::PI) {
        ++rejected_;
        return out;
    }
    auto& bucket = votes_[{msg.kind, msg.tag}];
    if (!bucket.emplace(msg.sender, *msg.payload).second) {
        return out;
    }
    const Payload m = *msg.payload;
    switch (msg.kind) {
        case MsgKind::NOTIFY:
            if (msg.sender == event_.source && !sent_echo_) {
                sent_echo_ = true;
                out.sends.push_back(Send{true, {}, make(MsgKind::ECHO, m)});
            }
            break;
        case MsgKind::ECHO:
            if (!sent_ready_ && votes(MsgKind::ECHO, m) >= quorum_) {
                sent_ready_ = true;
                out.sends.push_back(Send{true, {}, make(MsgKind::READY, m)});
            }
            break;
        case MsgKind::READY:
            if (!sent_ready_ && votes(MsgKind::READY, m) >= f_ + 1) {
                sent_ready_ = true;
                out.sends.push_back(Send{true, {}, make(MsgKind::READY, m)});
            }
            if (!delivered_.has_value() && votes(MsgKind::READY, m) >= quorum_) {
                delivered_ = m;
                out.deliver = m;
            }
            break;
        default:
            ++rejected_;
            break;
    }
    return out;
}

}  // namespace wbb
