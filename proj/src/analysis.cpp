#include "wbb/analysis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>

namespace wbb::analysis {

std::vector<BigInt> ball_volume_table(std::uint64_t r, std::uint32_t b, std::uint64_t dmax) {
    if (r < 2 || b < 1) {
        throw std::invalid_argument("ball_volume: ring modulus >= 2 and b >= 1 required");
    }
    const std::uint64_t max_d = static_cast<std::uint64_t>(b) * (r / 2);
    if (dmax > max_d) {
        throw std::invalid_argument("ball_volume: radius exceeds b*floor(r/2)");
    }
    // One-dimensional weights: one point at distance 0, two at each distance
    // in [1, ceil(r/2)-1], and one more at r/2 when r is even.
    const std::uint64_t half = r / 2;
    const bool even = (r % 2) == 0;
    const std::uint64_t wlim = even ? half - 1 : half;

    std::vector<BigInt> cnt(dmax + 1);
    cnt[0] = 1;
    for (std::uint32_t dim = 0; dim < b; ++dim) {
        std::vector<BigInt> next(dmax + 1);
        BigInt window = 0;  // 2 * sum of cnt[s-t] for t in [1, min(s, wlim)]
        for (std::uint64_t s = 0; s <= dmax; ++s) {
            if (s >= 1) {
                window += 2 * cnt[s - 1];
            }
            if (s >= wlim + 1) {
                window -= 2 * cnt[s - wlim - 1];
            }
            next[s] = cnt[s] + window;
            if (even && s >= half) {
                next[s] += cnt[s - half];
            }
        }
        cnt = std::move(next);
    }
    for (std::uint64_t s = 1; s <= dmax; ++s) {
        cnt[s] += cnt[s - 1];
    }
    return cnt;
}

namespace {

// Full cumulative tables are reused heavily by parameter sweeps; cache them.
std::shared_ptr<const std::vector<BigInt>> shared_table(std::uint64_t r, std::uint32_t b) {
    static std::mutex mu;
    static std::map<std::pair<std::uint64_t, std::uint32_t>,
                    std::shared_ptr<const std::vector<BigInt>>>
        cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(r, b);
    auto it = cache.find(key);
    if (it != cache.end()) {
        return it->second;
    }
    const std::uint64_t dmax = static_cast<std::uint64_t>(b) * (r / 2);
    auto table = std::make_shared<const std::vector<BigInt>>(ball_volume_table(r, b, dmax));
    cache.emplace(key, table);
    return table;
}

std::uint64_t calibrate_from(const std::vector<BigInt>& vols, std::uint64_t r, std::uint32_t b,
                             std::size_t members, double expected_w) {
    BigInt space = 1;
    for (std::uint32_t i = 0; i < b; ++i) {
        space *= r;
    }
    // Scale the real-valued target through a fixed denominator to stay exact.
    const std::uint64_t kScale = 1ull << 20;
    const BigInt limit = space * static_cast<std::uint64_t>(expected_w * kScale);
    const BigInt lhs_scale = BigInt(members) * kScale;
    if (lhs_scale * vols[0] > limit) {
        return 0;
    }
    std::uint64_t lo = 0;
    std::uint64_t hi = vols.size() - 1;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo + 1) / 2;
        if (lhs_scale * vols[mid] <= limit) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

}  // namespace

BigInt ball_volume(std::uint64_t r, std::uint32_t b, std::uint64_t d) {
    const std::uint64_t max_d = static_cast<std::uint64_t>(b) * (r / 2);
    if (d > max_d) {
        throw std::invalid_argument("ball_volume: radius exceeds b*floor(r/2)");
    }
    return (*shared_table(r, b))[d];
}

std::uint64_t calibrate_radius(std::uint64_t r, std::uint32_t b, std::size_t members,
                               double expected_w) {
    if (members == 0 || expected_w <= 0) {
        throw std::invalid_argument("calibrate_radius: positive members and target required");
    }
    return calibrate_from(*shared_table(r, b), r, b, members, expected_w);
}

namespace {

template <typename Num>
std::vector<Num> binomial_pmf(std::size_t n, const Num& p) {
    std::vector<Num> pmf(n + 1);
    const Num q = Num(1) - p;
    std::vector<Num> ppow(n + 1), qpow(n + 1);
    ppow[0] = Num(1);
    qpow[0] = Num(1);
    for (std::size_t i = 1; i <= n; ++i) {
        ppow[i] = ppow[i - 1] * p;
        qpow[i] = qpow[i - 1] * q;
    }
    BigInt coeff = 1;
    for (std::size_t i = 0; i <= n; ++i) {
        if (i > 0) {
            coeff = coeff * (n - i + 1) / i;
        }
        pmf[i] = Num(coeff) * ppow[i] * qpow[n - i];
    }
    return pmf;
}

}  // namespace

template <typename Num>
Num pr_liveness(std::size_t correct, const Num& p, std::size_t k) {
    if (k == 0) {
        return Num(1);
    }
    if (k > correct) {
        return Num(0);
    }
    const std::vector<Num> pmf = binomial_pmf(correct, p);
    Num sum = 0;
    for (std::size_t i = k; i <= correct; ++i) {
        sum += pmf[i];
    }
    return sum;
}

template <typename Num>
Num pr_safety(std::size_t faulty, const Num& p, std::size_t k) {
    if (k == 0) {
        return Num(0);
    }
    if (k > faulty) {
        return Num(1);
    }
    const std::vector<Num> pmf = binomial_pmf(faulty, p);
    Num sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sum += pmf[i];
    }
    return sum;
}

template Rational pr_liveness<Rational>(std::size_t, const Rational&, std::size_t);
template Rational pr_safety<Rational>(std::size_t, const Rational&, std::size_t);
template Real pr_liveness<Real>(std::size_t, const Real&, std::size_t);
template Real pr_safety<Real>(std::size_t, const Real&, std::size_t);

std::size_t SecurityQuery::resolved_f() const {
    if (f.has_value()) {
        return *f;
    }
    if (faulty_ratio.has_value()) {
        return static_cast<std::size_t>(*faulty_ratio * static_cast<double>(n));
    }
    return 0;
}

void SecurityQuery::validate() const {
    if (n == 0) {
        throw std::invalid_argument("security query: empty system");
    }
    if (resolved_f() > n) {
        throw std::invalid_argument("security query: more faulty processes than members");
    }
    if (!d.has_value() && !expected_w.has_value()) {
        throw std::invalid_argument("security query: need a radius or an expected witness size");
    }
}

EpsilonResult epsilon(const SecurityQuery& query) {
    query.validate();
    const std::size_t faulty = query.resolved_f();
    const std::size_t correct = query.n - faulty;
    auto table = shared_table(query.r, query.b);
    const std::vector<BigInt>& vols = *table;
    const std::uint64_t radius =
        query.d.has_value() ? *query.d
                            : calibrate_from(vols, query.r, query.b, query.n, *query.expected_w);
    if (radius >= vols.size()) {
        throw std::invalid_argument("epsilon: radius exceeds b*floor(r/2)");
    }
    if (query.mu > radius) {
        throw std::invalid_argument("epsilon: uncertainty radius exceeds selection radius");
    }
    const std::uint64_t d_hi = std::min<std::uint64_t>(radius + query.mu, vols.size() - 1);

    BigInt space = 1;
    for (std::uint32_t i = 0; i < query.b; ++i) {
        space *= query.r;
    }
    const Real denom(space);
    const Real p_live = Real(vols[radius - query.mu]) / denom;
    const Real p_safe = Real(vols[d_hi]) / denom;

    EpsilonResult out;
    out.d = radius;
    if (query.k.has_value()) {
        out.k = *query.k;
    } else {
        // balanced k: minimize |(1 - pr_live) - (1 - pr_safe)|, ties to smaller k
        const std::vector<Real> pmf_live = binomial_pmf(correct, p_live);
        const std::vector<Real> pmf_safe = binomial_pmf(faulty, p_safe);
        Real live_tail = 1;  // Pr(corr >= k), starting at k = 1
        Real safe_head = 0;  // Pr(faulty < k)
        Real best_gap = -1;
        std::size_t best_k = 1;
        for (std::size_t k = 1; k <= correct; ++k) {
            live_tail -= pmf_live[k - 1];
            if (k - 1 <= faulty) {
                safe_head += pmf_safe[k - 1];
            }
            const Real gap = boost::multiprecision::abs(safe_head - live_tail);
            if (best_gap < 0 || gap < best_gap) {
                best_gap = gap;
                best_k = k;
            }
        }
        out.k = best_k;
    }
    out.pr_live = pr_liveness(correct, p_live, out.k);
    out.pr_safe = pr_safety(faulty, p_safe, out.k);
    out.epsilon = Real(1) - out.pr_live * out.pr_safe;
    return out;
}

double GatheringQuery::q() const {
    return std::pow(c * std::log2(static_cast<double>(n)) / static_cast<double>(n),
                    1.0 / static_cast<double>(b));
}

std::size_t GatheringQuery::walkers() const {
    return static_cast<std::size_t>(t * static_cast<double>(n));
}

std::size_t GatheringQuery::threshold() const {
    return static_cast<std::size_t>(std::floor(s * c * std::log2(static_cast<double>(n))));
}

void GatheringQuery::validate() const {
    if (n < 2 || b < 1 || r < 2) {
        throw std::invalid_argument("gathering query: degenerate space");
    }
    if (t <= 0 || t >= 1.0 / 3.0) {
        throw std::invalid_argument("gathering query: compromised ratio must lie in (0, 1/3)");
    }
    if (s < t) {
        throw std::domain_error("gathering query: target ratio below population ratio");
    }
}

double gathering_bound(const GatheringQuery& query) {
    query.validate();
    if (query.s == query.t) {
        return 0.0;
    }
    const double rq_half = static_cast<double>(query.r) * query.q() / 2.0;
    const double dk = rq_half * (std::pow(query.s / query.t, 1.0 / query.b) - 1.0);
    return static_cast<double>(query.b) * dk * dk;
}

std::vector<GatheringSample> gathering_sim(const GatheringQuery& query, std::size_t runs,
                                           std::uint64_t seed, std::uint64_t step_cap) {
    query.validate();
    if (runs < 1) {
        throw std::invalid_argument("gathering_sim: need at least one run");
    }
    const std::size_t f = query.walkers();
    const std::size_t k = query.threshold();
    const std::uint64_t radius =
        static_cast<std::uint64_t>(static_cast<double>(query.r) * query.q() / 2.0);
    const std::uint64_t r = query.r;
    const std::uint32_t b = query.b;
    std::mt19937_64 rng(seed);
    auto draw = [&rng](std::uint64_t bound) { return rng() % bound; };

    std::vector<GatheringSample> samples;
    samples.reserve(runs);
    for (std::size_t run = 0; run < runs; ++run) {
        std::vector<std::uint64_t> pos(f * b);
        std::vector<std::uint32_t> dims_in(f, 0);  // per-walk count of in-range dims
        std::size_t inside = 0;
        for (std::size_t w = 0; w < f; ++w) {
            for (std::uint32_t j = 0; j < b; ++j) {
                const std::uint64_t x = draw(r);
                pos[w * b + j] = x;
                if (std::min(x, r - x) <= radius) {
                    ++dims_in[w];
                }
            }
            if (dims_in[w] == b) {
                ++inside;
            }
        }
        GatheringSample sample;
        if (inside >= k) {
            samples.push_back(sample);  // gathered before any step
            continue;
        }
        std::uint64_t step = 0;
        while (step < step_cap) {
            ++step;
            for (std::size_t w = 0; w < f; ++w) {
                const std::uint32_t j = static_cast<std::uint32_t>(draw(b));
                std::uint64_t& x = pos[w * b + j];
                const bool was_in = std::min(x, r - x) <= radius;
                x = (draw(2) == 0) ? (x + 1) % r : (x + r - 1) % r;
                const bool now_in = std::min(x, r - x) <= radius;
                if (was_in != now_in) {
                    const bool whole_was = dims_in[w] == b;
                    dims_in[w] += now_in ? 1u : -1u;
                    if (whole_was != (dims_in[w] == b)) {
                        inside += (dims_in[w] == b) ? 1 : -1;
                    }
                }
            }
            if (inside >= k) {
                break;
            }
        }
        sample.steps = step;
        sample.censored = inside < k;
        samples.push_back(sample);
    }
    return samples;
}

}  // namespace wbb::analysis
