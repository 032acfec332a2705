#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace wbb {

inline constexpr std::size_t kDigestBytes = 32;  // c = 256-bit hash output

using Digest = std::array<std::uint8_t, kDigestBytes>;
using Bytes = std::vector<std::uint8_t>;

Digest sha256(std::span<const std::uint8_t> data);

/// Keyed member h_i of the hash family: h_i(x) = SHA256(seed_i || x),
/// with seed_i derived from the family index.
class HashFamily {
public:
    explicit HashFamily(std::uint64_t index);

    Digest hash(std::span<const std::uint8_t> data) const;
    std::uint64_t index() const { return index_; }

private:
    std::uint64_t index_;
    Digest seed_;
};

// The digest interpreted as a big-endian 256-bit integer.
std::uint64_t digest_mod(const Digest& h, std::uint64_t m);
// Parity of floor(value(h) / m).
bool digest_div_parity(const Digest& h, std::uint64_t m);

Bytes concat(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Deterministic stream of pseudo-random words: block t = SHA256(seed || t).
class HashStream {
public:
    explicit HashStream(const Digest& seed);

    std::uint64_t next_u64();
    // Uniform-ish draw in [0, bound); bound >= 1. Plain modulo, fixed across
    // platforms.
    std::uint64_t next_below(std::uint64_t bound);

private:
    void refill();

    Digest seed_;
    std::uint64_t counter_ = 0;
    Digest block_{};
    std::size_t pos_ = kDigestBytes;
};

}  // namespace wbb
