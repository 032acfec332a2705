#pragma once

#include <map>
#include <optional>

#include "wbb/message.hpp"

namespace wbb {

/// Classical three-phase reliable broadcast used as the quorum baseline:
/// the source NOTIFYs everyone; on the source's value every process ECHOs to
/// everyone; a quorum of ECHOs (or f+1 READYs) triggers a READY to everyone;
/// a quorum of READYs delivers. All messages are PI-tagged.
class BrachaInstance {
public:
    BrachaInstance(EventId event, ProcessId self, std::size_t n, std::size_t f);

    Emission broadcast(const Payload& m);
    Emission on_message(const ProtocolMessage& msg);

    const std::optional<Payload>& delivered() const { return delivered_; }
    std::size_t rejected_count() const { return rejected_; }

private:
    ProtocolMessage make(MsgKind kind, const Payload& payload) const;
    std::size_t votes(MsgKind kind, const Payload& payload) const;

    EventId event_;
    ProcessId self_;
    std::size_t n_;
    std::size_t f_;
    std::size_t quorum_;

    bool broadcast_called_ = false;
    bool sent_echo_ = false;
    bool sent_ready_ = false;
    std::map<std::pair<MsgKind, MsgTag>, std::map<ProcessId, Payload>> votes_;
    std::optional<Payload> delivered_;
    std::size_t rejected_ = 0;
};

}  // namespace wbb
