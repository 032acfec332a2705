#pragma once

#include <cstdint>
#include <span>

#include "wbb/hash.hpp"
#include "wbb/ring.hpp"

namespace wbb {

/// Incremental SLASH accumulator over a set of items. The accumulator lives
/// at the internal dimension B; each absorbed item moves exactly one
/// coordinate by +-1 mod r, so the order of absorption does not matter.
struct SlashState {
    SlashParams params;
    HashFamily family;
    RingPoint acc;            // dimension B
    std::uint64_t count = 0;

    static SlashState empty(const SlashParams& params);
};

SlashState slash_absorb(const SlashState& state, std::span<const std::uint8_t> item);
void slash_absorb_inplace(SlashState& state, std::span<const std::uint8_t> item);

/// Symmetric-difference cardinality of two ordered sets.
template <typename Set>
std::size_t set_dist(const Set& s, const Set& t) {
    std::size_t diff = 0;
    auto is = s.begin();
    auto it = t.begin();
    while (is != s.end() && it != t.end()) {
        if (*is < *it) {
            ++diff;
            ++is;
        } else if (*it < *is) {
            ++diff;
            ++it;
        } else {
            ++is;
            ++it;
        }
    }
    diff += static_cast<std::size_t>(std::distance(is, s.end()));
    diff += static_cast<std::size_t>(std::distance(it, t.end()));
    return diff;
}

// Pseudo-random permutation of vec's coordinates driven by a hash-counter
// stream seeded from `seed`, followed by selection of the first b_out of
// them. Requires b_out <= vec.dims().
RingPoint permute_filter(const RingPoint& vec, const Digest& seed, std::uint32_t b_out);

}  // namespace wbb
