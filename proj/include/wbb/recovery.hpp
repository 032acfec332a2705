#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wbb/message.hpp"

namespace wbb {

/// Timeout-triggered fallback for one broadcast instance. Harvests the last
/// PI-tagged messages of peers through RECOVER envelopes and completes via a
/// classical echo/ready quorum exchange. Inputs are processed only once the
/// owner has timed out or delivered; earlier messages are buffered and
/// replayed in arrival order.
class RecoveryState {
public:
    RecoveryState(EventId event, ProcessId self, std::size_t n, std::size_t f);

    // Owner bookkeeping: the latest PI-tagged message sent in the instance
    // and deliveries made through the witness path.
    void set_last_pi(const ProtocolMessage& msg);
    Emission note_delivery(const Payload& payload);

    Emission on_timeout();
    Emission on_message(const ProtocolMessage& msg);

    bool gate_open() const { return gate_open_; }
    bool recover_sent() const { return recover_sent_; }
    const std::optional<Payload>& delivered() const { return delivered_; }

private:
    struct RecoverRecord {
        std::optional<Payload> payload;
        std::optional<MsgKind> kind;
    };

    Emission open_gate();
    Emission process(const ProtocolMessage& msg);
    Emission send_own_recover();
    void maybe_echo(Emission& out);
    void maybe_ready(Emission& out);
    void maybe_deliver(Emission& out);
    ProtocolMessage make(MsgKind kind, const std::optional<Payload>& payload) const;

    EventId event_;
    ProcessId self_;
    std::size_t n_;
    std::size_t f_;
    std::size_t quorum_;

    bool gate_open_ = false;
    bool recover_sent_ = false;
    bool echo_sent_ = false;
    bool ready_sent_ = false;

    std::optional<ProtocolMessage> last_pi_;
    std::optional<Payload> delivered_;

    std::map<ProcessId, RecoverRecord> rec_hist_;
    std::map<ProcessId, Payload> replies_;
    std::map<ProcessId, Payload> echoes_;
    std::map<ProcessId, Payload> readies_;
    std::vector<ProtocolMessage> buffer_;
    bool replaying_ = false;

    std::size_t rejected_ = 0;
};

}  // namespace wbb
