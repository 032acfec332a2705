#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wbb/event.hpp"
#include "wbb/oracle.hpp"

namespace wbb {

enum class MsgKind : std::uint8_t {
    NOTIFY,
    ECHO,
    READY,
    VALIDATE,
    RECOVER,
    REPLY,
    RECOVERY_ECHO,
    RECOVERY_READY,
    LOG,
};

enum class MsgTag : std::uint8_t { NONE, W, PI };

const char* to_string(MsgKind k);
const char* to_string(MsgTag t);

struct RoundLog;  // rounds.hpp

struct ProtocolMessage {
    EventId instance;
    MsgKind kind = MsgKind::NOTIFY;
    MsgTag tag = MsgTag::NONE;
    std::optional<Payload> payload;
    ProcessId sender;           // authenticated by the transport
    bool source_signed = true;  // source signature on the payload verified
    // RECOVER envelope: the kind of the last PI-tagged message the sender
    // emitted in this instance; absent together with payload means bottom.
    std::optional<MsgKind> embedded_kind;
    std::shared_ptr<const RoundLog> log;  // LOG messages only
};

struct Send {
    bool to_all = false;
    IdSet to;  // used when to_all is false
    ProtocolMessage msg;
};

/// Result of feeding one input to a protocol state machine: messages to
/// route, an optional application-level delivery, and an optional request to
/// arm the instance timer.
struct Emission {
    std::vector<Send> sends;
    std::optional<Payload> deliver;
    bool arm_timeout = false;
    std::size_t rejected = 0;  // malformed inputs observed

    void merge(Emission&& other);
    bool empty() const;
};

}  // namespace wbb
