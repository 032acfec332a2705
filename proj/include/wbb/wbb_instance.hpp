#pragma once

#include <map>
#include <optional>

#include "wbb/message.hpp"
#include "wbb/recovery.hpp"

namespace wbb {

/// floor((n+f)/2) + 1; any two such quorums intersect in at least f+1
/// processes. Requires f < n/3.
std::size_t quorum_size(std::size_t n, std::size_t f);

struct WitnessSets {
    IdSet own;        // W_i: the set whose replies the process waits on
    IdSet potential;  // V_i: the superset it transmits to
    std::size_t k = 1;
};

enum class InstancePhase { Witness, Recovering };

/// One instance of witness-based broadcast.
///
/// Message flow in a good run: the source NOTIFYs its potential witnesses;
/// witnesses ECHO (tag W) to everyone; every process relays an ECHO (tag PI)
/// to its potential witnesses; witnesses collect a quorum of those and READY
/// (tag W) to everyone; every process that hears k own-witness READYs relays
/// a READY (tag PI); witnesses collect a quorum and VALIDATE; a process
/// delivers on k own-witness VALIDATEs. Every action fires at most once per
/// instance, and a sender is counted at most once per (kind, tag).
///
/// With recovery enabled the instance also arms a timer at initialization,
/// relays the first payload it sees as a NOTIFY, and hands RECOVER traffic
/// to the embedded RecoveryState.
class WbbInstance {
public:
    WbbInstance(EventId event, ProcessId self, std::size_t n, std::size_t f,
                bool recovery_enabled);

    /// Samples are fixed for the rest of the instance; re-init is a no-op.
    Emission init(const WitnessSets& ws);

    /// Source-only entry point.
    Emission broadcast(const Payload& m);
    /// Source entry point that skips the witness path and goes straight to
    /// recovery, carrying the would-be NOTIFY inside the RECOVER envelope.
    Emission broadcast_recovery_only(const Payload& m);

    Emission on_message(const ProtocolMessage& msg);
    Emission on_timeout();

    bool initialized() const { return initialized_; }
    bool is_witness() const { return witness_role_; }
    const std::optional<Payload>& delivered() const { return delivered_; }
    InstancePhase phase() const { return phase_; }
    const WitnessSets& witnesses() const { return ws_; }
    std::size_t rejected_count() const { return rejected_; }
    const EventId& event() const { return event_; }

private:
    Emission handle_witness_path(const ProtocolMessage& msg);
    bool record_vote(const ProtocolMessage& msg);
    std::size_t votes(MsgKind kind, MsgTag tag, const Payload& payload,
                      const IdSet* restrict_to) const;
    ProtocolMessage make(MsgKind kind, MsgTag tag, const Payload& payload);
    void note_pi_send(const ProtocolMessage& msg);
    void push_all(Emission& out, ProtocolMessage msg);
    void push_potential(Emission& out, ProtocolMessage msg);
    void apply_delivery(Emission& out, const Payload& payload);

    EventId event_;
    ProcessId self_;
    std::size_t n_;
    std::size_t f_;
    std::size_t quorum_;
    bool recovery_enabled_;

    WitnessSets ws_;
    bool initialized_ = false;
    bool witness_role_ = false;
    bool broadcast_called_ = false;
    bool relayed_notify_ = false;

    bool sent_echo_w_ = false;
    bool sent_echo_pi_ = false;
    bool sent_ready_w_ = false;
    bool sent_ready_pi_ = false;
    bool sent_validate_ = false;

    // (kind, tag) -> sender -> first payload voted for
    std::map<std::pair<MsgKind, MsgTag>, std::map<ProcessId, Payload>> votes_;

    std::optional<Payload> delivered_;
    std::optional<ProtocolMessage> last_pi_;
    InstancePhase phase_ = InstancePhase::Witness;
    RecoveryState recovery_;
    std::size_t rejected_ = 0;
};

}  // namespace wbb
