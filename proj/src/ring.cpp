#include "wbb/ring.hpp"

#include <stdexcept>

namespace wbb {

std::uint32_t SlashParams::chunk_bits() const {
    std::uint32_t bits = 0;
    while ((1ull << bits) < r) {
        ++bits;
    }
    return bits == 0 ? 1 : bits;
}

void SlashParams::validate() const {
    if (r < 2) {
        throw std::invalid_argument("slash params: ring modulus must be >= 2");
    }
    if (b < 1) {
        throw std::invalid_argument("slash params: need at least one dimension");
    }
    if (big_b < b) {
        throw std::invalid_argument("slash params: internal dimensions below selection dimensions");
    }
    if (c < 8) {
        throw std::invalid_argument("slash params: hash output too small");
    }
    if (static_cast<std::uint64_t>(b) * chunk_bits() > c) {
        throw std::invalid_argument("slash params: id space does not cover b chunks of ceil(log2 r) bits");
    }
}

std::uint64_t SlashParams::max_distance() const {
    return static_cast<std::uint64_t>(b) * (r / 2);
}

RingPoint RingPoint::zeros(std::size_t dims, std::uint64_t r) {
    RingPoint p;
    p.coords.assign(dims, 0);
    p.modulus = r;
    return p;
}

bool RingPoint::is_zero() const {
    for (std::uint64_t c : coords) {
        if (c != 0) {
            return false;
        }
    }
    return true;
}

std::uint64_t ring_dist(const RingPoint& x, const RingPoint& y) {
    if (x.modulus != y.modulus || x.dims() != y.dims()) {
        throw std::invalid_argument("ring_dist: dimension or modulus mismatch");
    }
    const std::uint64_t r = x.modulus;
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < x.dims(); ++j) {
        std::uint64_t fwd = (x.coords[j] + r - y.coords[j]) % r;
        std::uint64_t bwd = (y.coords[j] + r - x.coords[j]) % r;
        total += fwd < bwd ? fwd : bwd;
    }
    return total;
}

RingPoint ring_add(const RingPoint& x, const RingPoint& y) {
    if (x.modulus != y.modulus || x.dims() != y.dims()) {
        throw std::invalid_argument("ring_add: dimension or modulus mismatch");
    }
    RingPoint out = x;
    for (std::size_t j = 0; j < x.dims(); ++j) {
        out.coords[j] = (x.coords[j] + y.coords[j]) % x.modulus;
    }
    return out;
}

RingPoint map_id(const Digest& id, std::uint32_t b, std::uint64_t r) {
    SlashParams tmp;
    tmp.b = b;
    tmp.r = r;
    const std::uint32_t w = tmp.chunk_bits();
    if (static_cast<std::uint64_t>(b) * w > 8 * kDigestBytes) {
        throw std::invalid_argument("map_id: id too short for b chunks of ceil(log2 r) bits");
    }
    RingPoint p = RingPoint::zeros(b, r);
    for (std::uint32_t j = 0; j < b; ++j) {
        std::uint64_t chunk = 0;
        const std::size_t start = static_cast<std::size_t>(j) * w;
        for (std::uint32_t t = 0; t < w; ++t) {
            const std::size_t bit = start + t;
            const std::uint8_t byte = id[bit / 8];
            const int shift = 7 - static_cast<int>(bit % 8);
            chunk = (chunk << 1) | ((byte >> shift) & 1u);
        }
        p.coords[j] = chunk % r;
    }
    return p;
}

RingPoint map_id(const Digest& id, const SlashParams& params) {
    return map_id(id, params.b, params.r);
}

}  // namespace wbb
