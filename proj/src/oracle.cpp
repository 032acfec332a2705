#include "wbb/oracle.hpp"

#include <stdexcept>

namespace wbb {

void OracleParams::validate(const SlashParams& sp) const {
    if (d > sp.max_distance()) {
        throw std::invalid_argument("oracle params: radius exceeds b*floor(r/2)");
    }
    if (k < 1) {
        throw std::invalid_argument("oracle params: threshold below 1");
    }
}

WitnessSelection select_witnesses(const SlashState& history,
                                  const std::vector<ProcessId>& members,
                                  const EventId& event, const OracleParams& params) {
    if (members.empty()) {
        throw std::invalid_argument("select_witnesses: no members");
    }
    params.validate(history.params);
    const SlashParams& sp = history.params;
    const HashFamily& h = history.family;

    const auto event_bytes = encode_event(event);
    const Digest event_hash = h.hash(event_bytes);
    const RingPoint event_point = map_id(event_hash, sp);

    WitnessSelection out;
    for (const ProcessId& v : members) {
        const Digest member_seed = h.hash(v.bytes);
        const RingPoint view = ring_add(permute_filter(history.acc, member_seed, sp.b),
                                        event_point);
        // Shuffled id: selection for different events must be independent.
        const Digest shuffled = h.hash(concat(v.bytes, event_hash));
        const std::uint64_t dist = ring_dist(map_id(shuffled, sp), view);
        if (dist <= params.d) {
            out.own.insert(v);
        }
        if (dist <= params.d + params.gamma) {
            out.potential.insert(v);
        }
    }
    return out;
}

std::uint64_t default_reveal_horizon(const SlashParams& sp) {
    return static_cast<std::uint64_t>(sp.b) * sp.r * sp.r;
}

Commitment commit(const ProcessId& owner, const Digest& value, const SlashParams& sp,
                  std::optional<std::uint64_t> reveal_after) {
    Commitment cm;
    cm.owner = owner;
    cm.commit_hash = sha256(value);
    cm.reveal_after = reveal_after.value_or(default_reveal_horizon(sp));
    return cm;
}

bool verify_reveal(const Commitment& cm, const Digest& value) {
    return sha256(value) == cm.commit_hash;
}

Commitment reveal(const Commitment& cm, const Digest& value) {
    Commitment out = cm;
    if (verify_reveal(cm, value)) {
        out.revealed_value = value;
    }
    return out;
}

}  // namespace wbb
