#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpwm/amplitude_engines.hpp"
#include "qpwm/errors.hpp"
#include "qpwm/pwm.hpp"
#include "qpwm/qram.hpp"
#include "qpwm/rng.hpp"
#include "qpwm/score_oracles.hpp"
#include "qpwm/thresholds.hpp"

namespace qpwm {

enum class Backend { analytic, sparse };

/// One PWM-matching problem plus the run knobs shared by both algorithms.
struct ProblemInstance {
    PwmSet pwms;
    Sequence seq;
    std::optional<FxValue> w_th;                    // iterative method
    std::optional<SoftHardThresholds> soft_hard;    // Monte-Carlo method
    std::size_t kappa = 4;
    double delta = 0.05;
    std::size_t sparse_cap = SparseState::default_cap;
};

struct RoundLog {
    double a_before = 0.0;
    bool success = false;
    std::uint64_t v_queries = 0;
    std::optional<IndexPair> measured;
    bool accepted = false; // false when the classical check stopped the loop
};

struct MatchReport {
    MatchSet found;
    bool matched = false;
    QueryLedger ledger;
    std::vector<RoundLog> rounds;
    // Both normalizations: the superposition covers n_sup = n-m+1 positions,
    // while the failure bounds use the literal K*n of the problem statement.
    std::uint64_t n_sup = 0;
    std::uint64_t kn = 0;
    double gamma = 0.0;
    double delta_round = 0.0;  // iterative method: per-QAA failure budget
    double delta_prime = 0.0;  // Monte-Carlo method: per-estimation failure
    double delta_dprime = 0.0; // Monte-Carlo method: per-QAA failure
    std::optional<QmciParams> qmci;
};

/// Algorithm 1: repeat QSearch over the flagged score state, excluding each
/// found pair, until a search fails. Never reports a pair below the
/// threshold; with probability >= 1-delta reports exactly the solution set.
inline MatchReport run_naive_iteration(const ProblemInstance& instance, Philox4x32& rng,
                                       Backend backend = Backend::analytic) {
    if (!instance.w_th) throw PreconditionError("iterative method needs a single threshold");
    const PwmSet& pwms = instance.pwms;
    const Sequence& seq = instance.seq;
    const FxValue w_th = *instance.w_th;
    const auto K = static_cast<std::int64_t>(pwms.size());
    const std::int64_t n = seq.size();
    const std::int64_t n_sup = position_count(pwms, seq);

    Qrams qrams = build_qrams(seq, pwms, instance.kappa);
    const std::int64_t m = pwms.length();

    MatchReport report;
    report.n_sup = static_cast<std::uint64_t>(n_sup);
    report.kn = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(n);
    report.gamma = 1.0 / (static_cast<double>(K) * static_cast<double>(n_sup));
    report.delta_round = instance.delta / static_cast<double>(report.kn);

    const QaaParams qaa{report.gamma, report.delta_round};
    const auto v_hook = [&](std::uint64_t v) {
        qrams.ledger.seq_queries += v * static_cast<std::uint64_t>(m);
        qrams.ledger.pwm_queries += v * static_cast<std::uint64_t>(m);
        qrams.ledger.p_queries += v;
    };

    MatchSet p_temp;
    for (;;) {
        GoodStateAmplitude good;
        if (backend == Backend::sparse) {
            const SparseState state = build_flagged_state_naive(pwms, seq, qrams.exclusion, w_th,
                                                                instance.sparse_cap, nullptr);
            good.a = state.mass_where(reg::f_flag, 1);
            for (const auto& [label, amp] : state.amplitudes())
                if (label[reg::f_flag] == 1) {
                    good.weights.emplace_back(IndexPair{label[reg::k], label[reg::i]}, 1.0);
                    ++good.n_remaining;
                }
        } else {
            good = good_amplitude_naive(pwms, seq, p_temp, w_th);
        }

        const auto amplitude = [&good] { return good.a; };
        const auto sampler = [&good](Philox4x32& r) {
            return good.weights[r.uniform_below(good.weights.size())].first;
        };
        const std::function<IndexPair(Philox4x32&)> maybe_sampler =
            good.weights.empty() ? std::function<IndexPair(Philox4x32&)>{} : sampler;
        const QaaOutcome outcome = qsearch(amplitude, maybe_sampler, qaa, rng, v_hook);

        RoundLog log{good.a, outcome.success, outcome.queries_to_v, outcome.sampled,
                     outcome.success};
        report.rounds.push_back(log);
        if (!outcome.success) break;

        const IndexPair pair = *outcome.sampled;
        p_temp.insert(pair);
        exclusion_update(qrams.exclusion, pair, qrams.ledger);
    }

    report.found = p_temp;
    report.matched = !p_temp.empty();
    report.ledger = qrams.ledger;
    return report;
}

/// Algorithm 2: QSearch over the Monte-Carlo score state with the two-level
/// thresholds; every measured pair is verified classically and the loop stops
/// at the first sub-soft verification or failed search.
inline MatchReport run_qmci_method(const ProblemInstance& instance, Philox4x32& rng) {
    if (!instance.soft_hard)
        throw PreconditionError("Monte-Carlo method needs soft/hard thresholds");
    const PwmSet& pwms = instance.pwms;
    const Sequence& seq = instance.seq;
    const SoftHardThresholds& th = *instance.soft_hard;
    const auto K = static_cast<std::int64_t>(pwms.size());
    const std::int64_t n = seq.size();
    const std::int64_t m = pwms.length();
    const std::int64_t n_sup = position_count(pwms, seq);
    const double md = static_cast<double>(m);
    if (!(0.0 < th.w_soft && th.w_soft < th.w_hard && th.w_hard < md))
        throw PreconditionError("need 0 < w_soft < w_hard < m");

    Qrams qrams = build_qrams(seq, pwms, instance.kappa);

    MatchReport report;
    report.n_sup = static_cast<std::uint64_t>(n_sup);
    report.kn = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(n);
    const double kn = static_cast<double>(report.kn);
    report.gamma = 1.0 / (2.0 * static_cast<double>(K) * static_cast<double>(n_sup));
    report.delta_prime = instance.delta / (4.0 * kn * kn);
    report.delta_dprime = instance.delta / (2.0 * kn);

    const double eps_prime = (th.w_hard - th.w_soft) / (2.0 * md);
    const QmciParams params = make_qmci_params(eps_prime, report.delta_prime);
    report.qmci = params;

    // One application of the mean-score oracle costs J(2M+1) queries to each
    // data oracle and one exclusion query.
    const std::uint64_t per_v = params.queries_per_mean_oracle();
    const auto v_hook = [&](std::uint64_t v) {
        qrams.ledger.seq_queries += v * per_v;
        qrams.ledger.pwm_queries += v * per_v;
        qrams.ledger.p_queries += v;
    };

    // The per-pair weights depend only on the scores, so compute them once.
    const double threshold = th.mid() / md;
    std::vector<IndexPair> pairs;
    std::vector<double> weights;
    pairs.reserve(static_cast<std::size_t>(K * n_sup));
    for (std::int64_t k = 0; k < K; ++k)
        for (std::int64_t i = 0; i < n_sup; ++i) {
            const FxValue w = score_segment(pwms[static_cast<std::size_t>(k)], seq, i);
            pairs.push_back({k, i});
            weights.push_back(
                qmci_tail(std::clamp(w.to_double() / md, 0.0, 1.0), threshold, params));
        }
    double weight_total = 0.0;
    for (double w : weights) weight_total += w;

    const FxValue w_soft_fx = FxValue::from_double(th.w_soft, pwms.format());
    const QaaParams qaa{report.gamma, report.delta_dprime};
    std::vector<std::size_t> remaining(pairs.size());
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) remaining[idx] = idx;

    MatchSet p_temp;
    for (;;) {
        const double a = std::max(0.0, weight_total) /
                         (static_cast<double>(K) * static_cast<double>(n_sup));
        const auto amplitude = [a] { return a; };
        const auto sampler = [&](Philox4x32& r) {
            std::vector<double> w;
            w.reserve(remaining.size());
            for (std::size_t idx : remaining) w.push_back(weights[idx]);
            return pairs[remaining[r.sample_discrete(w)]];
        };
        const std::function<IndexPair(Philox4x32&)> maybe_sampler =
            remaining.empty() ? std::function<IndexPair(Philox4x32&)>{} : sampler;
        const QaaOutcome outcome = qsearch(amplitude, maybe_sampler, qaa, rng, v_hook);

        RoundLog log{a, outcome.success, outcome.queries_to_v, outcome.sampled, false};
        if (!outcome.success) {
            report.rounds.push_back(log);
            break;
        }

        const IndexPair pair = *outcome.sampled;
        // Classical verification of the measured pair (m table lookups,
        // tracked apart from the oracle queries).
        const FxValue w_cl =
            score_segment(pwms[static_cast<std::size_t>(pair.k)], seq, pair.i);
        qrams.ledger.classical_lookups += static_cast<std::uint64_t>(m);
        if (fx_compare(w_cl, w_soft_fx) != 1) {
            report.rounds.push_back(log);
            break;
        }

        log.accepted = true;
        report.rounds.push_back(log);
        p_temp.insert(pair);
        exclusion_update(qrams.exclusion, pair, qrams.ledger);
        for (std::size_t r = 0; r < remaining.size(); ++r)
            if (pairs[remaining[r]] == pair) {
                weight_total -= weights[remaining[r]];
                remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(r));
                break;
            }
    }

    report.found = p_temp;
    report.matched = !p_temp.empty();
    report.ledger = qrams.ledger;
    return report;
}

/// Log-log regression of median query counts against one varied parameter,
/// with a bootstrap confidence interval on the slope.
struct ScalingSummary {
    std::string axis;
    std::vector<double> sizes;
    std::vector<double> medians;
    double slope = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

namespace detail {
inline double median_of(std::vector<std::uint64_t> v) {
    if (v.empty()) throw PreconditionError("median of empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    if (v.size() % 2 == 1) return static_cast<double>(v[h]);
    return 0.5 * (static_cast<double>(v[h - 1]) + static_cast<double>(v[h]));
}

inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(xs[i]) - mx;
        num += dx * (std::log(ys[i]) - my);
        den += dx * dx;
    }
    return num / den;
}
} // namespace detail

inline ScalingSummary complexity_report(const std::string& axis, const std::vector<double>& sizes,
                                        const std::vector<std::vector<std::uint64_t>>& counts,
                                        Philox4x32& rng, std::size_t bootstrap_rounds = 200) {
    if (sizes.size() < 3) throw PreconditionError("scaling fit needs at least 3 sizes");
    if (counts.size() != sizes.size())
        throw PreconditionError("scaling fit: one sample vector per size required");

    ScalingSummary s;
    s.axis = axis;
    s.sizes = sizes;
    for (const auto& c : counts) s.medians.push_back(detail::median_of(c));
    s.slope = detail::loglog_slope(sizes, s.medians);

    std::vector<double> boot;
    boot.reserve(bootstrap_rounds);
    for (std::size_t b = 0; b < bootstrap_rounds; ++b) {
        std::vector<double> meds;
        meds.reserve(sizes.size());
        for (const auto& sample : counts) {
            std::vector<std::uint64_t> re(sample.size());
            for (auto& x : re) x = sample[rng.uniform_below(sample.size())];
            meds.push_back(detail::median_of(re));
        }
        boot.push_back(detail::loglog_slope(sizes, meds));
    }
    std::sort(boot.begin(), boot.end());
    const auto lo = static_cast<std::size_t>(0.025 * static_cast<double>(boot.size()));
    const auto hi = static_cast<std::size_t>(0.975 * static_cast<double>(boot.size() - 1));
    s.ci_lo = boot[lo];
    s.ci_hi = boot[hi];
    return s;
}

} // namespace qpwm
