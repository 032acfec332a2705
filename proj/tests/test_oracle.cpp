#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "wbb/oracle.hpp"
#include "wbb/rng.hpp"

using namespace wbb;

namespace {

std::vector<ProcessId> make_members(std::size_t count, std::uint64_t seed) {
    std::vector<ProcessId> out;
    for (std::size_t i = 0; i < count; ++i) {
        Bytes b = {'m'};
        for (int s = 7; s >= 0; --s) {
            b.push_back(static_cast<std::uint8_t>(seed >> (8 * s)));
        }
        b.push_back(static_cast<std::uint8_t>(i));
        out.push_back(ProcessId{sha256(b)});
    }
    return out;
}

SlashState history_with(const SlashParams& params, std::size_t items) {
    SlashState s = SlashState::empty(params);
    for (std::size_t i = 0; i < items; ++i) {
        Bytes b = {'h', static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i >> 8)};
        slash_absorb_inplace(s, b);
    }
    return s;
}

}  // namespace

TEST_CASE("maximal radius selects every member") {
    SlashParams params;
    params.b = 4;
    params.big_b = 8;
    params.r = 64;
    const SlashState history = history_with(params, 12);
    const auto members = make_members(20, 1);
    OracleParams op;
    op.d = params.max_distance();
    op.gamma = 0;
    op.k = 1;
    const WitnessSelection sel = select_witnesses(history, members, EventId{members[0], 1}, op);
    CHECK(sel.own.size() == members.size());
    CHECK(sel.potential == sel.own);
}

TEST_CASE("gamma zero makes own equal potential") {
    SlashParams params;
    params.b = 4;
    params.big_b = 8;
    params.r = 64;
    const SlashState history = history_with(params, 5);
    const auto members = make_members(40, 2);
    OracleParams op;
    op.d = params.max_distance() / 3;
    op.gamma = 0;
    op.k = 1;
    const WitnessSelection sel = select_witnesses(history, members, EventId{members[3], 7}, op);
    CHECK(sel.own == sel.potential);
}

TEST_CASE("own is monotone in the radius and contained in potential") {
    SlashParams params;
    params.b = 4;
    params.big_b = 8;
    params.r = 64;
    const SlashState history = history_with(params, 9);
    const auto members = make_members(60, 3);
    const EventId event{members[1], 4};
    OracleParams wide;
    wide.d = params.max_distance() / 2;
    wide.gamma = 10;
    wide.k = 1;
    OracleParams narrow = wide;
    narrow.d = wide.d / 2;
    const WitnessSelection big = select_witnesses(history, members, event, wide);
    const WitnessSelection small = select_witnesses(history, members, event, narrow);
    for (const ProcessId& p : big.own) {
        CHECK(big.potential.contains(p));
    }
    for (const ProcessId& p : small.own) {
        CHECK(big.own.contains(p));
    }
}

TEST_CASE("selection matches an independent reimplementation") {
    SlashParams params;
    params.b = 6;
    params.big_b = 12;
    params.r = 128;
    const SlashState history = history_with(params, 21);
    const auto members = make_members(8, 4);
    const EventId event{members[5], 9};
    OracleParams op;
    op.d = 150;
    op.gamma = 40;
    op.k = 1;
    const WitnessSelection sel = select_witnesses(history, members, event, op);

    // straight-line recomputation of the distance test
    IdSet own, potential;
    const HashFamily& h = history.family;
    const auto event_bytes = encode_event(event);
    const Digest event_hash = h.hash(event_bytes);
    const RingPoint offset = map_id(event_hash, params);
    for (const ProcessId& v : members) {
        const RingPoint filtered = permute_filter(history.acc, h.hash(v.bytes), params.b);
        RingPoint y = RingPoint::zeros(params.b, params.r);
        for (std::size_t j = 0; j < y.dims(); ++j) {
            y.coords[j] = (filtered.coords[j] + offset.coords[j]) % params.r;
        }
        const Digest shuffled = h.hash(concat(v.bytes, event_hash));
        std::uint64_t dist = 0;
        const RingPoint vp = map_id(shuffled, params);
        for (std::size_t j = 0; j < y.dims(); ++j) {
            const std::uint64_t fwd = (vp.coords[j] + params.r - y.coords[j]) % params.r;
            const std::uint64_t bwd = (y.coords[j] + params.r - vp.coords[j]) % params.r;
            dist += std::min(fwd, bwd);
        }
        if (dist <= op.d) {
            own.insert(v);
        }
        if (dist <= op.d + op.gamma) {
            potential.insert(v);
        }
    }
    CHECK(sel.own == own);
    CHECK(sel.potential == potential);
}

TEST_CASE("selection is deterministic") {
    SlashParams params;
    params.b = 4;
    params.big_b = 16;
    params.r = 256;
    const SlashState history = history_with(params, 30);
    const auto members = make_members(25, 6);
    OracleParams op;
    op.d = 200;
    op.gamma = 30;
    op.k = 1;
    const EventId event{members[2], 11};
    const WitnessSelection first = select_witnesses(history, members, event, op);
    for (int i = 0; i < 5; ++i) {
        const WitnessSelection again = select_witnesses(history, members, event, op);
        CHECK(again.own == first.own);
        CHECK(again.potential == first.potential);
    }
}

TEST_CASE("select_witnesses rejects empty membership") {
    SlashParams params;
    const SlashState history = SlashState::empty(params);
    OracleParams op;
    op.d = 1;
    CHECK_THROWS_AS(select_witnesses(history, {}, EventId{}, op), std::invalid_argument);
}

TEST_CASE("commit and reveal round trip") {
    SlashParams params;
    const auto members = make_members(1, 7);
    Digest value = sha256(Bytes{'v'});
    const Commitment cm = commit(members[0], value, params);
    CHECK(verify_reveal(cm, value));
    Digest other = sha256(Bytes{'w'});
    CHECK_FALSE(verify_reveal(cm, other));
    const Commitment revealed = reveal(cm, value);
    CHECK(revealed.revealed_value.has_value());
    CHECK(*revealed.revealed_value == value);
    const Commitment not_revealed = reveal(cm, other);
    CHECK_FALSE(not_revealed.revealed_value.has_value());
}

TEST_CASE("default reveal horizon is b * r^2") {
    SlashParams params;
    params.b = 4;
    params.big_b = 8;
    params.r = 32;
    const auto members = make_members(1, 8);
    const Commitment cm = commit(members[0], Digest{}, params);
    CHECK(cm.reveal_after == 4ull * 32 * 32);
    const Commitment custom = commit(members[0], Digest{}, params, 17);
    CHECK(custom.reveal_after == 17);
}
