#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "wbb/longlived.hpp"
#include "wbb/wbb_instance.hpp"

using namespace wbb;

namespace {

ProcessId pid(std::uint8_t i) {
    ProcessId p;
    p.bytes[0] = i;
    p.bytes[31] = 0xee;
    return p;
}

struct Fixture {
    std::vector<ProcessId> ids;
    EventId event;
    Payload m;
    WitnessSets ws;
    std::size_t n;
    std::size_t f;

    explicit Fixture(std::size_t n_ = 4, std::size_t f_ = 1) : n(n_), f(f_) {
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back(pid(static_cast<std::uint8_t>(i)));
        }
        event = EventId{ids[0], 1};
        m = Payload{event, 777};
        for (const ProcessId& p : ids) {
            ws.own.insert(p);
            ws.potential.insert(p);
        }
        ws.k = n / 2 + 1;
    }

    WbbInstance instance(std::size_t self, bool recovery = false) const {
        WbbInstance inst(event, ids[self], n, f, recovery);
        inst.init(ws);
        return inst;
    }

    ProtocolMessage msg(MsgKind kind, MsgTag tag, std::size_t sender,
                        std::optional<Payload> payload = std::nullopt) const {
        ProtocolMessage out;
        out.instance = event;
        out.kind = kind;
        out.tag = tag;
        out.payload = payload.has_value() ? payload : std::optional<Payload>(m);
        out.sender = ids[sender];
        return out;
    }
};

std::size_t count_kind(const Emission& em, MsgKind kind) {
    std::size_t c = 0;
    for (const Send& s : em.sends) {
        if (s.msg.kind == kind) {
            ++c;
        }
    }
    return c;
}

}  // namespace

TEST_CASE("quorum size formula and fault bound") {
    CHECK(quorum_size(4, 1) == 3);
    CHECK(quorum_size(1024, 341) == 683);
    CHECK_THROWS_AS(quorum_size(3, 1), std::invalid_argument);
    CHECK_THROWS_AS(quorum_size(6, 2), std::invalid_argument);
}

TEST_CASE("every pair of quorums intersects in f+1 processes") {
    for (std::size_t n = 4; n <= 40; ++n) {
        for (std::size_t f = 0; 3 * f < n; ++f) {
            const std::size_t q = quorum_size(n, f);
            CHECK(2 * q >= n + f + 1);  // two quorums overlap in >= f+1
        }
    }
}

TEST_CASE("init is idempotent and fixes the witness role") {
    Fixture fx;
    WbbInstance inst(fx.event, fx.ids[1], fx.n, fx.f, false);
    CHECK_FALSE(inst.initialized());
    inst.init(fx.ws);
    CHECK(inst.initialized());
    CHECK(inst.is_witness());
    WitnessSets other;  // re-init with different sets must not take
    other.own.insert(fx.ids[0]);
    other.potential.insert(fx.ids[0]);
    other.k = 1;
    inst.init(other);
    CHECK(inst.witnesses().own.size() == fx.n);
}

TEST_CASE("non-member of the potential set never acts as witness") {
    Fixture fx;
    WitnessSets ws = fx.ws;
    ws.own.erase(fx.ids[3]);
    ws.potential.erase(fx.ids[3]);
    WbbInstance inst(fx.event, fx.ids[3], fx.n, fx.f, false);
    inst.init(ws);
    CHECK_FALSE(inst.is_witness());
    const Emission em = inst.on_message(fx.msg(MsgKind::NOTIFY, MsgTag::PI, 0));
    CHECK(count_kind(em, MsgKind::ECHO) == 0);
}

TEST_CASE("broadcast notifies every potential witness exactly once") {
    Fixture fx;
    WbbInstance inst = fx.instance(0);
    const Emission em = inst.broadcast(fx.m);
    REQUIRE(em.sends.size() == 1);
    CHECK_FALSE(em.sends[0].to_all);
    CHECK(em.sends[0].to.size() == fx.n);
    CHECK(em.sends[0].msg.kind == MsgKind::NOTIFY);
    CHECK(em.sends[0].msg.tag == MsgTag::PI);
    CHECK_THROWS_AS(inst.broadcast(fx.m), std::logic_error);
}

TEST_CASE("broadcast from the wrong process is misuse") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    CHECK_THROWS_AS(inst.broadcast(fx.m), std::logic_error);
    // payload naming another instance is misuse as well
    WbbInstance src = fx.instance(0);
    Payload alien = fx.m;
    alien.event.seq = 99;
    CHECK_THROWS_AS(src.broadcast(alien), std::logic_error);
}

TEST_CASE("witness echoes the first notify to everyone") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    const Emission em = inst.on_message(fx.msg(MsgKind::NOTIFY, MsgTag::PI, 0));
    REQUIRE(count_kind(em, MsgKind::ECHO) == 1);
    CHECK(em.sends.back().to_all);
    CHECK(em.sends.back().msg.tag == MsgTag::W);
    // duplicate notify is ignored
    const Emission again = inst.on_message(fx.msg(MsgKind::NOTIFY, MsgTag::PI, 0));
    CHECK(again.empty());
}

TEST_CASE("witness-tagged echo triggers the relay once") {
    Fixture fx;
    WbbInstance inst = fx.instance(2);
    const Emission em = inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::W, 1));
    REQUIRE(count_kind(em, MsgKind::ECHO) == 1);
    CHECK(em.sends.back().msg.tag == MsgTag::PI);
    const Emission again = inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::W, 3));
    CHECK(count_kind(again, MsgKind::ECHO) == 0);
}

TEST_CASE("quorum of pi echoes makes a witness ready") {
    Fixture fx;  // n=4, f=1, quorum=3
    WbbInstance inst = fx.instance(1);
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 0)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 2)).empty());
    const Emission em = inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 3));
    REQUIRE(count_kind(em, MsgKind::READY) == 1);
    CHECK(em.sends.back().msg.tag == MsgTag::W);
}

TEST_CASE("f+1 pi readies amplify a witness ready without echoes") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    CHECK(inst.on_message(fx.msg(MsgKind::READY, MsgTag::PI, 2)).empty());
    const Emission em = inst.on_message(fx.msg(MsgKind::READY, MsgTag::PI, 3));
    CHECK(count_kind(em, MsgKind::READY) == 1);
}

TEST_CASE("k witness readies trigger the pi ready") {
    Fixture fx;  // k = 3
    WbbInstance inst = fx.instance(2);
    CHECK(inst.on_message(fx.msg(MsgKind::READY, MsgTag::W, 0)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::READY, MsgTag::W, 1)).empty());
    const Emission em = inst.on_message(fx.msg(MsgKind::READY, MsgTag::W, 3));
    REQUIRE(count_kind(em, MsgKind::READY) == 1);
    CHECK(em.sends.back().msg.tag == MsgTag::PI);
    CHECK_FALSE(em.sends.back().to_all);
}

TEST_CASE("k validates deliver exactly once") {
    Fixture fx;
    WbbInstance inst = fx.instance(3);
    CHECK(inst.on_message(fx.msg(MsgKind::VALIDATE, MsgTag::NONE, 0)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::VALIDATE, MsgTag::NONE, 1)).empty());
    const Emission em = inst.on_message(fx.msg(MsgKind::VALIDATE, MsgTag::NONE, 2));
    REQUIRE(em.deliver.has_value());
    CHECK(em.deliver->body == 777);
    CHECK(inst.delivered().has_value());
    // a fourth validate cannot deliver again
    const Emission late = inst.on_message(fx.msg(MsgKind::VALIDATE, MsgTag::NONE, 3));
    CHECK_FALSE(late.deliver.has_value());
}

TEST_CASE("duplicate senders are counted once per kind and tag") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 0)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 0)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 0)).empty());
    // still only one vote: quorum not reached with a second distinct sender
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 2)).empty());
}

TEST_CASE("an equivocating sender cannot vote for two payloads") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    const Payload other{fx.event, 888};
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 0)).empty());
    // the same sender switching payloads is ignored
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 0, other)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 2, other)).empty());
    CHECK(inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, 3, other)).empty());
    // two fresh votes for `other` plus the equivocator's ignored one: no quorum
    CHECK(inst.delivered() == std::nullopt);
}

TEST_CASE("malformed messages are rejected and flagged") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    // wrong tag on validate
    ProtocolMessage bad = fx.msg(MsgKind::VALIDATE, MsgTag::W, 0);
    CHECK(inst.on_message(bad).empty());
    CHECK(inst.rejected_count() == 1);
    // unsigned payload
    ProtocolMessage unsigned_msg = fx.msg(MsgKind::NOTIFY, MsgTag::PI, 0);
    unsigned_msg.source_signed = false;
    inst.on_message(unsigned_msg);
    CHECK(inst.rejected_count() == 2);
    // payload from a different instance
    ProtocolMessage alien = fx.msg(MsgKind::NOTIFY, MsgTag::PI, 0);
    alien.payload->event.seq = 3;
    inst.on_message(alien);
    CHECK(inst.rejected_count() == 3);
}

TEST_CASE("good run delivers everywhere within six steps") {
    // Synchronous four-process run driven by hand: each step routes the
    // previous step's sends to every destination.
    Fixture fx;
    std::vector<WbbInstance> procs;
    for (std::size_t i = 0; i < fx.n; ++i) {
        procs.push_back(fx.instance(i));
    }
    std::vector<ProtocolMessage> wire;
    {
        const Emission em = procs[0].broadcast(fx.m);
        for (const Send& s : em.sends) {
            wire.push_back(s.msg);
        }
    }
    std::size_t steps = 0;
    while (!wire.empty()) {
        ++steps;
        REQUIRE(steps <= 6);
        std::vector<ProtocolMessage> next;
        for (const ProtocolMessage& msg : wire) {
            for (std::size_t i = 0; i < fx.n; ++i) {
                // W-destined messages went to the potential set (everyone
                // here); ALL-destined ones reach everyone too.
                const Emission em = procs[i].on_message(msg);
                for (const Send& s : em.sends) {
                    next.push_back(s.msg);
                }
            }
        }
        wire = std::move(next);
    }
    CHECK(steps == 6);
    for (const WbbInstance& inst : procs) {
        REQUIRE(inst.delivered().has_value());
        CHECK(inst.delivered()->body == 777);
    }
}

TEST_CASE("at most once per action across message floods") {
    Fixture fx;
    WbbInstance inst = fx.instance(1);
    std::size_t echo_w = 0;
    std::size_t ready_w = 0;
    for (int round = 0; round < 3; ++round) {
        for (std::size_t sender = 0; sender < fx.n; ++sender) {
            Emission em = inst.on_message(fx.msg(MsgKind::NOTIFY, MsgTag::PI, sender));
            for (const Send& s : em.sends) {
                if (s.msg.kind == MsgKind::ECHO && s.msg.tag == MsgTag::W) ++echo_w;
            }
            em = inst.on_message(fx.msg(MsgKind::ECHO, MsgTag::PI, sender));
            for (const Send& s : em.sends) {
                if (s.msg.kind == MsgKind::READY && s.msg.tag == MsgTag::W) ++ready_w;
            }
        }
    }
    CHECK(echo_w == 1);
    CHECK(ready_w == 1);
}

TEST_CASE("long-lived wrapper assigns sequence numbers and tracks history") {
    LongLivedProcess app(pid(1));
    const EventId first = app.next_event();
    CHECK(first.seq == 1);
    CHECK(app.own_in_flight());
    // a second own broadcast before delivery is misuse
    CHECK_THROWS_AS(app.next_event(), std::logic_error);
    app.on_deliver(Payload{first, 10});
    CHECK_FALSE(app.own_in_flight());
    CHECK(app.next_event().seq == 2);
    // history has set semantics keyed by the event id
    const EventId foreign{pid(2), 1};
    app.on_deliver(Payload{foreign, 5});
    app.on_deliver(Payload{foreign, 6});  // re-delivery keeps the first body
    CHECK(app.history().size() == 2);
    CHECK(app.history().at(foreign) == 5);
}
