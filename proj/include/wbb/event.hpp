#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>

#include "wbb/hash.hpp"

namespace wbb {

/// c-bit node identity.
struct ProcessId {
    Digest bytes{};

    auto operator<=>(const ProcessId&) const = default;
};

/// Broadcast instance key: the source id plus its per-source sequence number.
struct EventId {
    ProcessId source;
    std::uint64_t seq = 0;

    auto operator<=>(const EventId&) const = default;
};

struct Payload {
    EventId event;
    std::uint64_t body = 0;

    auto operator<=>(const Payload&) const = default;
};

// Canonical item encoding absorbed into history hashes: source bytes
// followed by the big-endian sequence number.
inline std::array<std::uint8_t, kDigestBytes + 8> encode_event(const EventId& e) {
    std::array<std::uint8_t, kDigestBytes + 8> out{};
    for (std::size_t i = 0; i < kDigestBytes; ++i) {
        out[i] = e.source.bytes[i];
    }
    for (std::size_t i = 0; i < 8; ++i) {
        out[kDigestBytes + i] = static_cast<std::uint8_t>(e.seq >> (8 * (7 - i)));
    }
    return out;
}

struct ProcessIdHash {
    std::size_t operator()(const ProcessId& p) const {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < 8; ++i) {
            v = (v << 8) | p.bytes[i];
        }
        return static_cast<std::size_t>(v);
    }
};

struct EventIdHash {
    std::size_t operator()(const EventId& e) const {
        return ProcessIdHash{}(e.source) * 1000003u + static_cast<std::size_t>(e.seq);
    }
};

}  // namespace wbb
