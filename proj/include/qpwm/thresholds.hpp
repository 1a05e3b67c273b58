#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "qpwm/errors.hpp"
#include "qpwm/fixed_point.hpp"
#include "qpwm/pwm.hpp"

namespace qpwm {

/// I.i.d. background model: one probability per alphabet symbol.
struct BackgroundModel {
    std::vector<double> probs;

    explicit BackgroundModel(std::vector<double> p) : probs(std::move(p)) {
        double total = 0.0;
        for (double q : probs) {
            if (!(q > 0.0 && q < 1.0))
                throw DegenerateInputError("background probability outside (0,1)");
            total += q;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw DegenerateInputError("background probabilities do not sum to 1");
    }

    static BackgroundModel uniform(std::size_t alphabet_size) {
        return BackgroundModel(
            std::vector<double>(alphabet_size, 1.0 / static_cast<double>(alphabet_size)));
    }
};

/// Exact probability mass of the segment score W under the background model.
struct ScoreDistribution {
    FixedPointFormat format;
    std::vector<std::int64_t> support_raw; // strictly ascending
    std::vector<double> mass;

    /// P(W >= w) summed over exact support atoms.
    double tail_at_least_raw(std::int64_t w_raw) const {
        double t = 0.0;
        for (std::size_t i = support_raw.size(); i-- > 0;) {
            if (support_raw[i] < w_raw) break;
            t += mass[i];
        }
        return t;
    }

    double tail_at_least(double w) const {
        double t = 0.0;
        for (std::size_t i = support_raw.size(); i-- > 0;) {
            if (std::ldexp(static_cast<double>(support_raw[i]), -format.frac_bits) < w) break;
            t += mass[i];
        }
        return t;
    }
};

/// Per-position score moments and their totals under the background model.
struct MomentSummary {
    std::vector<double> mu;
    std::vector<double> var;
    double mu_tilde = 0.0;
    double s2 = 0.0;

    double s() const { return std::sqrt(s2); }
    std::int64_t length() const { return static_cast<std::int64_t>(mu.size()); }
};

inline MomentSummary compute_moments(const Pwm& pwm, const BackgroundModel& bg) {
    if (bg.probs.size() != pwm.alphabet().size())
        throw DegenerateInputError("background model size does not match alphabet");
    MomentSummary summary;
    for (std::int64_t pos = 0; pos < pwm.length(); ++pos) {
        double mu = 0.0;
        for (std::size_t a = 0; a < bg.probs.size(); ++a)
            mu += bg.probs[a] * pwm.entry(pos, a).to_double();
        double var = 0.0;
        for (std::size_t a = 0; a < bg.probs.size(); ++a) {
            const double d = pwm.entry(pos, a).to_double() - mu;
            var += bg.probs[a] * d * d;
        }
        summary.mu.push_back(mu);
        summary.var.push_back(var);
        summary.mu_tilde += mu;
        summary.s2 += var;
    }
    return summary;
}

/// Position-wise convolution over exact fixed-point score values. No binning:
/// the support is exactly the set of attainable segment scores.
inline ScoreDistribution exact_score_distribution(const Pwm& pwm, const BackgroundModel& bg,
                                                  std::size_t support_cap = std::size_t{1} << 20) {
    if (bg.probs.size() != pwm.alphabet().size())
        throw DegenerateInputError("background model size does not match alphabet");
    std::map<std::int64_t, double> dist;
    dist[0] = 1.0;
    for (std::int64_t pos = 0; pos < pwm.length(); ++pos) {
        std::map<std::int64_t, double> next;
        for (const auto& [w, p] : dist)
            for (std::size_t a = 0; a < bg.probs.size(); ++a) {
                const FxValue e = pwm.entry(pos, a);
                const FxValue acc = fx_add(FxValue::from_raw(w, pwm.format()), e);
                next[acc.raw()] += p * bg.probs[a];
            }
        if (next.size() > support_cap)
            throw ResourceError("score distribution support exceeds configured cap");
        dist = std::move(next);
    }
    ScoreDistribution out;
    out.format = pwm.format();
    out.support_raw.reserve(dist.size());
    out.mass.reserve(dist.size());
    for (const auto& [w, p] : dist) {
        out.support_raw.push_back(w);
        out.mass.push_back(p);
    }
    return out;
}

/// Largest attainable score whose inclusive upper tail still reaches p.
inline FxValue pvalue_threshold(const ScoreDistribution& dist, double p) {
    if (!(p > 0.0 && p < 1.0)) throw PreconditionError("p-value must lie in (0,1)");
    if (dist.support_raw.empty()) throw DegenerateInputError("empty score distribution");
    double tail = 0.0;
    for (std::size_t i = dist.support_raw.size(); i-- > 0;) {
        tail += dist.mass[i];
        if (tail >= p) return FxValue::from_raw(dist.support_raw[i], dist.format);
    }
    // Total mass is 1 > p, so the loop always returns; keep the bottom atom as
    // a numerical fallback.
    return FxValue::from_raw(dist.support_raw.front(), dist.format);
}

/// Standard normal upper tail via erfc (absolute error well under 1e-12).
inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline double normal_approx_tail(const MomentSummary& summary, double w) {
    if (!(summary.s2 > 0.0)) throw DegenerateInputError("degenerate score distribution: s2 == 0");
    return normal_upper_tail((w - summary.mu_tilde) / summary.s());
}

/// Two-level thresholds mu + x*s for the Monte-Carlo matcher.
struct SoftHardThresholds {
    double w_soft = 0.0;
    double w_hard = 0.0;
    double x_soft = 0.0;
    double x_hard = 0.0;

    double mid() const { return 0.5 * (w_soft + w_hard); }
    double width() const { return w_hard - w_soft; }
};

inline SoftHardThresholds soft_hard_thresholds(const MomentSummary& summary, double x_soft,
                                               double x_hard) {
    if (!(x_soft > 0.0 && x_soft < x_hard))
        throw PreconditionError("need 0 < x_soft < x_hard");
    if (!(summary.s2 > 0.0)) throw DegenerateInputError("degenerate score distribution: s2 == 0");
    SoftHardThresholds t;
    t.x_soft = x_soft;
    t.x_hard = x_hard;
    t.w_soft = summary.mu_tilde + x_soft * summary.s();
    t.w_hard = summary.mu_tilde + x_hard * summary.s();
    const double m = static_cast<double>(summary.length());
    if (!(t.w_soft > 0.0 && t.w_hard < m))
        throw PreconditionError("thresholds must satisfy 0 < w_soft < w_hard < m");
    return t;
}

/// Lyapunov-condition diagnostic for the normal limit of the score.
struct CltReport {
    std::size_t positions_with_floor = 0; // count of i with var_i >= sigma_min2
    std::size_t required = 0;             // ceil(r*m)
    bool holds = false;
    double bound = 0.0; // m / ((r m)^{1+delta/2} * sigma_min^{2+delta})
    double r = 0.0;
    double sigma_min2 = 0.0;
    double delta = 0.0;
};

inline CltReport clt_condition_report(const Pwm& pwm, const BackgroundModel& bg, double r,
                                      double sigma_min2, double delta = 1.0) {
    if (!(r > 0.0 && r <= 1.0)) throw PreconditionError("r must lie in (0,1]");
    if (!(sigma_min2 > 0.0)) throw PreconditionError("sigma_min2 must be positive");
    const MomentSummary summary = compute_moments(pwm, bg);
    CltReport rep;
    rep.r = r;
    rep.sigma_min2 = sigma_min2;
    rep.delta = delta;
    const double m = static_cast<double>(pwm.length());
    rep.required = static_cast<std::size_t>(std::ceil(r * m));
    for (double v : summary.var)
        if (v >= sigma_min2) ++rep.positions_with_floor;
    rep.holds = rep.positions_with_floor >= rep.required;
    rep.bound = m / (std::pow(r * m, 1.0 + delta / 2.0) *
                     std::pow(std::sqrt(sigma_min2), 2.0 + delta));
    return rep;
}

} // namespace qpwm
