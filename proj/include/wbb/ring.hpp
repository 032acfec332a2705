#pragma once

#include <cstdint>
#include <vector>

#include "wbb/hash.hpp"

namespace wbb {

/// Parameters of a SLASH hashing family instance.
struct SlashParams {
    std::uint32_t c = 256;          // hash output bits
    std::uint32_t b = 16;           // selection dimensions
    std::uint32_t big_b = 64;       // internal dimensions (B >= b)
    std::uint64_t r = 1ull << 16;   // ring modulus
    std::uint64_t seed = 0;         // hash-family instance index

    std::uint32_t chunk_bits() const;  // ceil(log2 r)
    void validate() const;
    // Largest possible ring distance: b * floor(r/2).
    std::uint64_t max_distance() const;
};

/// Point in Z_r^b under the wrap-around L1 metric.
struct RingPoint {
    std::vector<std::uint64_t> coords;
    std::uint64_t modulus = 0;

    static RingPoint zeros(std::size_t dims, std::uint64_t r);
    std::size_t dims() const { return coords.size(); }
    bool is_zero() const;

    auto operator<=>(const RingPoint&) const = default;
};

std::uint64_t ring_dist(const RingPoint& x, const RingPoint& y);
RingPoint ring_add(const RingPoint& x, const RingPoint& y);

// Splits a c-bit id into b big-endian chunks of ceil(log2 r) bits, each
// reduced mod r. Requires b * ceil(log2 r) <= c.
RingPoint map_id(const Digest& id, std::uint32_t b, std::uint64_t r);
RingPoint map_id(const Digest& id, const SlashParams& params);

}  // namespace wbb
