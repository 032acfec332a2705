#pragma once

#include <cstdint>
#include <map>

#include "wbb/event.hpp"

namespace wbb {

/// Long-lived wrapper: assigns sequence numbers to own broadcasts and keeps
/// the history of delivered messages keyed by EventId. Correct processes use
/// it sequentially, waiting for their previous broadcast to deliver before
/// starting the next one.
class LongLivedProcess {
public:
    explicit LongLivedProcess(ProcessId self) : self_(self) {}

    EventId next_event();
    void on_deliver(const Payload& m);

    bool own_in_flight() const { return own_in_flight_; }
    std::uint64_t seq() const { return seq_; }
    const ProcessId& self() const { return self_; }
    const std::map<EventId, std::uint64_t>& history() const { return history_; }

private:
    ProcessId self_;
    std::uint64_t seq_ = 0;
    bool own_in_flight_ = false;
    std::map<EventId, std::uint64_t> history_;  // EventId -> delivered body
};

}  // namespace wbb
