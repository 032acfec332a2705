#include "wbb/longlived.hpp"

#include <stdexcept>

namespace wbb {

EventId LongLivedProcess::next_event() {
    if (own_in_flight_) {
        throw std::logic_error("long-lived broadcast: previous own broadcast still in flight");
    }
    ++seq_;
    own_in_flight_ = true;
    return EventId{self_, seq_};
}

void LongLivedProcess::on_deliver(const Payload& m) {
    history_.emplace(m.event, m.body);  // set semantics: re-delivery keeps the first body
    if (m.event.source == self_) {
        own_in_flight_ = false;
    }
}

}  // namespace wbb
