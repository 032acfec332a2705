#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace wbb {

/// Seeded generator with fully specified draws (std distributions vary
/// across standard libraries; these do not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) {
            throw std::invalid_argument("rng: zero bound");
        }
        return engine_() % bound;
    }

    // Inclusive range.
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

    double unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // k distinct indices out of [0, pool).
    std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t k) {
        std::vector<std::size_t> all(pool);
        for (std::size_t i = 0; i < pool; ++i) {
            all[i] = i;
        }
        shuffle(all);
        all.resize(k < pool ? k : pool);
        return all;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace wbb
