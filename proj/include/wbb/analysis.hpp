#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace wbb::analysis {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Real = boost::multiprecision::cpp_bin_float_50;

/// Number of points of Z_r^b at ring distance <= d from the origin,
/// computed exactly by dimension-wise convolution of the one-dimensional
/// distance weights.
BigInt ball_volume(std::uint64_t r, std::uint32_t b, std::uint64_t d);

/// Cumulative volumes for every d in [0, dmax]: entry d holds ball_volume(d).
std::vector<BigInt> ball_volume_table(std::uint64_t r, std::uint32_t b, std::uint64_t dmax);

/// Largest radius d with members * ball_volume(d) / r^b <= expected_w.
std::uint64_t calibrate_radius(std::uint64_t r, std::uint32_t b, std::size_t members,
                               double expected_w);

/// Pr(X >= k) for X ~ Binomial(correct, p): the probability that at least k
/// correct processes land in the witness set.
template <typename Num>
Num pr_liveness(std::size_t correct, const Num& p, std::size_t k);

/// Pr(X < k) for X ~ Binomial(faulty, p): the probability that fewer than k
/// faulty processes land in the witness set.
template <typename Num>
Num pr_safety(std::size_t faulty, const Num& p, std::size_t k);

struct SecurityQuery {
    std::size_t n = 0;
    std::optional<std::size_t> f;        // faulty count ...
    std::optional<double> faulty_ratio;  // ... or ratio (floored to a count)
    std::uint64_t r = 1ull << 16;
    std::uint32_t b = 16;
    std::uint32_t c = 256;
    std::optional<std::uint64_t> d;      // selection radius ...
    std::optional<double> expected_w;    // ... or calibrate it from this
    std::uint64_t mu = 0;                // history-uncertainty radius
    std::optional<std::size_t> k;        // absent = balanced k

    std::size_t resolved_f() const;
    void validate() const;
};

struct EpsilonResult {
    Real epsilon;
    std::size_t k = 0;
    std::uint64_t d = 0;
    Real pr_live;
    Real pr_safe;
};

/// Failure probability of one witness-validated instance. With mu > 0 the
/// liveness term uses radius d - mu and the safety term d + mu. When no k is
/// given, picks the k that best balances the two failure tails (ties to the
/// smaller k).
EpsilonResult epsilon(const SecurityQuery& query);

struct GatheringQuery {
    std::size_t n = 0;
    std::uint32_t b = 2;
    std::uint64_t r = 256;
    double c = 1.0;  // witness-size coefficient: witness size = c * log2 n
    double t = 0.0;  // compromised population ratio
    double s = 0.0;  // target compromised witness ratio

    double q() const;            // (c log2 n / n)^(1/b)
    std::size_t walkers() const; // f = floor(t n)
    std::size_t threshold() const;  // k = floor(s c log2 n)
    void validate() const;
};

/// Approximated lower bound T_k = b * D_k^2 on the expected gathering time.
double gathering_bound(const GatheringQuery& query);

struct GatheringSample {
    std::uint64_t steps = 0;
    bool censored = false;
};

/// Runs `runs` independent experiments: f lazy random walks on Z_r^b from
/// uniform starts; each records the first step at which at least k walks
/// simultaneously sit within L-inf radius r*q/2 of the origin, censored at
/// step_cap.
std::vector<GatheringSample> gathering_sim(const GatheringQuery& query, std::size_t runs,
                                           std::uint64_t seed, std::uint64_t step_cap);

}  // namespace wbb::analysis
