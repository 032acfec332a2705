#include "wbb/slash.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace wbb {

SlashState SlashState::empty(const SlashParams& params) {
    params.validate();
    return SlashState{params, HashFamily(params.seed),
                      RingPoint::zeros(params.big_b, params.r), 0};
}

void slash_absorb_inplace(SlashState& state, std::span<const std::uint8_t> item) {
    const Digest h = state.family.hash(item);
    const std::uint64_t dim = digest_mod(h, state.params.big_b);
    const bool negative = digest_div_parity(h, state.params.big_b);
    const std::uint64_t r = state.params.r;
    std::uint64_t& coord = state.acc.coords[dim];
    coord = negative ? (coord + r - 1) % r : (coord + 1) % r;
    ++state.count;
}

SlashState slash_absorb(const SlashState& state, std::span<const std::uint8_t> item) {
    SlashState next = state;
    slash_absorb_inplace(next, item);
    return next;
}

RingPoint permute_filter(const RingPoint& vec, const Digest& seed, std::uint32_t b_out) {
    const std::size_t dims = vec.dims();
    if (b_out > dims) {
        throw std::invalid_argument("permute_filter: selection exceeds vector dimension");
    }
    std::vector<std::uint32_t> perm(dims);
    std::iota(perm.begin(), perm.end(), 0u);
    HashStream stream(seed);
    for (std::size_t i = dims - 1; i > 0; --i) {
        const std::uint64_t j = stream.next_below(i + 1);
        std::swap(perm[i], perm[j]);
    }
    RingPoint out = RingPoint::zeros(b_out, vec.modulus);
    for (std::uint32_t t = 0; t < b_out; ++t) {
        out.coords[t] = vec.coords[perm[t]];
    }
    return out;
}

}  // namespace wbb
