#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "qpwm/errors.hpp"
#include "qpwm/pwm.hpp"
#include "qpwm/rng.hpp"

namespace qpwm {

/// Success probability of measuring the good state after j Grover iterations:
/// sin^2((2j+1) asin(sqrt(a))). Zero amplitude stays zero for every j.
inline double grover_success_prob(double a, std::uint64_t j) {
    a = std::clamp(a, 0.0, 1.0);
    const double theta = std::asin(std::sqrt(a));
    const double s = std::sin(static_cast<double>(2 * j + 1) * theta);
    return s * s;
}

struct QaaParams {
    double gamma = 0.0; // amplitude lower bound the schedule is sized for
    double delta = 0.0; // failure tolerance
};

struct QaaOutcome {
    bool success = false;
    std::optional<IndexPair> sampled; // good-subspace measurement, when success
    std::uint64_t queries_to_v = 0;
};

/// QSearch: exponentially growing random iteration counts, the whole schedule
/// repeated ceil(log2(1/delta)) + 1 times or until success, each schedule
/// capped at O(1/sqrt(gamma)) iterations.
///
/// Contract: a >= gamma succeeds with probability >= 1-delta in O(1/sqrt(a))
/// queries (median); a = 0 always fails after O(log(1/delta)/sqrt(gamma))
/// queries. Every V application is reported through on_v_queries.
inline QaaOutcome qsearch(const std::function<double()>& amplitude,
                          const std::function<IndexPair(Philox4x32&)>& good_sampler,
                          const QaaParams& params, Philox4x32& rng,
                          const std::function<void(std::uint64_t)>& on_v_queries = {}) {
    if (!(params.gamma > 0.0 && params.gamma < 1.0))
        throw PreconditionError("qsearch: gamma must lie in (0,1)");
    if (!(params.delta > 0.0 && params.delta < 1.0))
        throw PreconditionError("qsearch: delta must lie in (0,1)");

    const int schedules = static_cast<int>(std::ceil(std::log2(1.0 / params.delta))) + 1;
    const double cap = std::ceil(2.0 / std::sqrt(params.gamma));

    QaaOutcome out;
    for (int s = 0; s < schedules; ++s) {
        double stage = 1.0;
        for (;;) {
            const std::uint64_t j = rng.uniform_below(static_cast<std::uint64_t>(std::ceil(stage)));
            const std::uint64_t v = 1 + 2 * j; // state prep plus two V per Grover iteration
            out.queries_to_v += v;
            if (on_v_queries) on_v_queries(v);
            const double a = amplitude();
            if (rng.bernoulli(grover_success_prob(a, j))) {
                out.success = true;
                if (good_sampler) out.sampled = good_sampler(rng);
                return out;
            }
            if (stage >= cap) break;
            stage = std::min(stage * 1.2, cap);
        }
    }
    return out;
}

/// Estimate values with their probabilities; support is kept ascending.
struct OutcomeDistribution {
    std::vector<double> support;
    std::vector<double> mass;

    double total_mass() const {
        double t = 0.0;
        for (double p : mass) t += p;
        return t;
    }

    double mass_within(double center, double eps) const {
        double t = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i)
            if (std::abs(support[i] - center) <= eps) t += mass[i];
        return t;
    }

    /// P(estimate >= threshold), inclusive.
    double tail_at_least(double threshold) const {
        double t = 0.0;
        for (std::size_t i = support.size(); i-- > 0;) {
            if (support[i] < threshold) break;
            t += mass[i];
        }
        return t;
    }
};

/// Exact outcome law of canonical amplitude estimation with M Grover
/// applications: estimates sin^2(pi y / M), y in [M]_0, with the squared
/// Dirichlet-kernel weights of phase estimation on the two eigenphases.
inline OutcomeDistribution qae_distribution(double a, std::uint64_t m_applications) {
    if (m_applications < 2 || !std::has_single_bit(m_applications))
        throw PreconditionError("qae_distribution: M must be a power of two >= 2");
    const auto M = static_cast<double>(m_applications);

    a = std::clamp(a, 0.0, 1.0);
    if (a == 0.0) return OutcomeDistribution{{0.0}, {1.0}};
    if (a == 1.0) return OutcomeDistribution{{1.0}, {1.0}};

    const double omega = std::asin(std::sqrt(a)) / std::numbers::pi;
    const auto kernel = [&](double d) {
        d -= std::round(d);
        if (std::abs(d) < 1e-15) return 1.0;
        const double s = std::sin(std::numbers::pi * d);
        const double sM = std::sin(std::numbers::pi * M * d);
        return (sM * sM) / (M * M * s * s);
    };

    // y and M-y give the same estimate; fold them together.
    OutcomeDistribution out;
    const std::uint64_t half = m_applications / 2;
    for (std::uint64_t y = 0; y <= half; ++y) {
        const double yy = static_cast<double>(y);
        double p = 0.5 * (kernel(omega - yy / M) + kernel(omega + yy / M));
        if (y != 0 && y != half) {
            const double ym = static_cast<double>(m_applications - y);
            p += 0.5 * (kernel(omega - ym / M) + kernel(omega + ym / M));
        }
        const double est = std::sin(std::numbers::pi * yy / M);
        out.support.push_back(est * est);
        out.mass.push_back(p);
    }
    return out;
}

struct QaeParams {
    std::uint64_t t = 0; // target query count
    std::uint64_t M = 0; // Grover applications, power of two >= t
    double C = 0.0;      // universal constant in the per-run error bound
};

struct QmciParams {
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t J = 0; // repetition count, always odd
    QaeParams qae;

    std::uint64_t median_rank() const { return (J + 1) / 2; }
    /// Queries to the inner score oracle per full mean-oracle application:
    /// each of the J estimation runs costs one preparation plus two per
    /// Grover application.
    std::uint64_t queries_per_mean_oracle() const { return J * (2 * qae.M + 1); }
};

/// J = 12 ceil(log2(1/delta)) + 1 and t = ceil(2C/epsilon) with C = pi^2, so a
/// single run errs by at most epsilon with probability >= 8/pi^2 > 3/4.
inline QmciParams make_qmci_params(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0,1)");
    QmciParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.J = 12 * static_cast<std::uint64_t>(std::ceil(std::log2(1.0 / delta))) + 1;
    p.qae.C = std::numbers::pi * std::numbers::pi;
    p.qae.t = static_cast<std::uint64_t>(std::ceil(2.0 * p.qae.C / epsilon));
    p.qae.M = std::bit_ceil(std::max<std::uint64_t>(p.qae.t, 2));
    return p;
}

/// P(Bin(n,p) >= k), computed from the smaller tail for stability.
inline double binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    p = std::clamp(p, 0.0, 1.0);
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    const auto tail_sum = [&](std::uint64_t from) {
        // sum_{j=from..n} C(n,j) p^j (1-p)^(n-j), ascending j via term ratios
        double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                          std::lgamma(static_cast<double>(from) + 1.0) -
                          std::lgamma(static_cast<double>(n - from) + 1.0) +
                          static_cast<double>(from) * std::log(p) +
                          static_cast<double>(n - from) * std::log1p(-p);
        double term = std::exp(log_term);
        double total = term;
        for (std::uint64_t j = from; j < n; ++j) {
            term *= (static_cast<double>(n - j) / static_cast<double>(j + 1)) * (p / (1.0 - p));
            total += term;
            if (term < total * 1e-18) break;
        }
        return total;
    };

    const double mean = static_cast<double>(n) * p;
    if (static_cast<double>(k) >= mean) return std::min(1.0, tail_sum(k));
    // Lower tail is smaller: P(>=k) = 1 - P(Bin(n,1-p) >= n-k+1).
    p = 1.0 - p;
    return std::max(0.0, 1.0 - tail_sum(n - k + 1));
}

/// Law of the median of J independent estimation runs (order statistics of
/// the per-run outcome law).
inline OutcomeDistribution qmci_estimate_distribution(double mu, const QmciParams& params) {
    const OutcomeDistribution run = qae_distribution(mu, params.qae.M);
    const std::uint64_t h = params.median_rank();
    OutcomeDistribution out;
    out.support = run.support;
    out.mass.resize(run.support.size());
    double cdf = 0.0;
    double prev = 0.0; // P(median <= v_{g-1})
    for (std::size_t g = 0; g < run.support.size(); ++g) {
        cdf += run.mass[g];
        const double at_most =
            binomial_upper_tail(params.J, std::clamp(cdf, 0.0, 1.0), h);
        out.mass[g] = std::max(0.0, at_most - prev);
        prev = at_most;
    }
    return out;
}

/// P(median estimate >= threshold): binomial tail over the per-run tail.
inline double qmci_tail(double mu, double threshold, const QmciParams& params) {
    const OutcomeDistribution run = qae_distribution(mu, params.qae.M);
    const double q = run.tail_at_least(threshold);
    return binomial_upper_tail(params.J, q, params.median_rank());
}

} // namespace qpwm
