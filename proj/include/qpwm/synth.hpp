#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpwm/errors.hpp"
#include "qpwm/pwm.hpp"
#include "qpwm/rng.hpp"
#include "qpwm/thresholds.hpp"

namespace qpwm {

/// Shape of a synthetic matching instance. Planted segments make the number
/// of solutions controllable, so trials can be checked without relying on
/// background luck.
struct SynthSpec {
    enum class Mode { single_threshold, soft_hard };

    std::int64_t n = 256;
    std::int64_t m = 8;
    std::size_t K = 1;
    std::size_t alphabet_size = 4;
    Mode mode = Mode::single_threshold;
    std::size_t planted = 1;      // single-threshold mode: exact solution count
    std::size_t planted_hard = 1; // soft-hard mode
    std::size_t planted_soft = 0; // soft-hard mode: extra pairs inside the band
    std::size_t max_soft = 6;     // soft-hard mode: cap on |P_soft|, retry above
    double x_soft = 3.0;
    double x_hard = 4.0;
    FixedPointFormat format{};
    std::size_t max_attempts = 64;
};

struct SynthInstance {
    Sequence seq;
    PwmSet pwms;
    BackgroundModel bg;
    MatchSet planted;
    FxValue w_th;                               // single-threshold mode
    std::optional<SoftHardThresholds> soft_hard; // soft-hard mode
    MatchSet p_sol;                              // ground truth at w_th
    MatchSet p_hard;
    MatchSet p_soft;
};

namespace detail {

inline std::string synth_alphabet_symbols(std::size_t size) {
    static const std::string pool = "ACGTBDEFHIJKLMNPQRSUVWXYZ";
    if (size < 2 || size > pool.size())
        throw DegenerateInputError("synthetic alphabet size out of range");
    return pool.substr(0, size);
}

/// Peaked motif matrix: one preferred symbol per position scores near 1, the
/// rest stay low, so the argmax string clears sigma-level thresholds even for
/// small m.
inline Pwm random_unit_pwm(const Alphabet& alphabet, std::int64_t m,
                           const FixedPointFormat& fmt, Philox4x32& rng) {
    std::vector<std::vector<FxValue>> rows;
    rows.reserve(static_cast<std::size_t>(m));
    for (std::int64_t pos = 0; pos < m; ++pos) {
        const std::size_t preferred = rng.uniform_below(alphabet.size());
        std::vector<FxValue> row;
        row.reserve(alphabet.size());
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            const double value = a == preferred ? 0.85 + 0.15 * rng.next_double()
                                                : 0.4 * rng.next_double();
            row.push_back(FxValue::from_double(value, fmt));
        }
        rows.push_back(std::move(row));
    }
    Pwm p(alphabet, std::move(rows));
    p.mark_rescaled(FxValue::zero(fmt), FxValue::one(fmt));
    return p;
}

inline std::vector<std::uint8_t> random_sequence_labels(std::int64_t n, std::size_t alphabet_size,
                                                        Philox4x32& rng) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng.uniform_below(alphabet_size));
    return labels;
}

/// Distinct plant positions spaced at least m apart, so planted windows never
/// overlap each other.
inline std::vector<std::int64_t> plant_positions(std::int64_t n_sup, std::int64_t m,
                                                 std::size_t count, Philox4x32& rng) {
    std::vector<std::int64_t> chosen;
    std::size_t guard = 0;
    while (chosen.size() < count) {
        if (++guard > 1000)
            throw ResourceError("could not place planted segments without overlap");
        const auto i = static_cast<std::int64_t>(rng.uniform_below(
            static_cast<std::uint64_t>(n_sup)));
        const bool clash = std::any_of(chosen.begin(), chosen.end(), [&](std::int64_t c) {
            return std::abs(c - i) < m;
        });
        if (!clash) chosen.push_back(i);
    }
    return chosen;
}

inline std::uint8_t argmax_symbol(const Pwm& pwm, std::int64_t pos) {
    std::uint8_t best = 0;
    for (std::size_t a = 1; a < pwm.alphabet().size(); ++a)
        if (pwm.entry(pos, a).raw() > pwm.entry(pos, best).raw())
            best = static_cast<std::uint8_t>(a);
    return best;
}

} // namespace detail

/// Background-random sequence with planted high-score segments.
///
/// Single-threshold mode pins w_th strictly between the planted scores and
/// the best background score, so |P_sol| equals the planted count exactly.
/// Soft-hard mode derives (w_soft, w_hard) from the score moments, writes
/// argmax segments above w_hard and demoted segments inside the band.
inline SynthInstance generate_synthetic(const SynthSpec& spec, Philox4x32& rng) {
    const Alphabet alphabet(detail::synth_alphabet_symbols(spec.alphabet_size));
    const BackgroundModel bg = BackgroundModel::uniform(spec.alphabet_size);
    const std::int64_t n_sup = spec.n - spec.m + 1;
    if (n_sup < 2) throw DegenerateInputError("synthetic instance: n must exceed m");
    const std::size_t plant_count = spec.mode == SynthSpec::Mode::single_threshold
                                        ? spec.planted
                                        : spec.planted_hard + spec.planted_soft;
    if (static_cast<std::int64_t>(plant_count) * 2 * spec.m > spec.n)
        throw DegenerateInputError("synthetic instance: too many planted segments for n");

    for (std::size_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
        std::vector<Pwm> pwms;
        pwms.reserve(spec.K);
        for (std::size_t k = 0; k < spec.K; ++k)
            pwms.push_back(detail::random_unit_pwm(alphabet, spec.m, spec.format, rng));
        PwmSet set(std::move(pwms));

        std::vector<std::uint8_t> labels =
            detail::random_sequence_labels(spec.n, spec.alphabet_size, rng);

        if (spec.mode == SynthSpec::Mode::single_threshold) {
            MatchSet planted;
            for (std::int64_t i :
                 detail::plant_positions(n_sup, spec.m, spec.planted, rng)) {
                const auto k = static_cast<std::int64_t>(rng.uniform_below(spec.K));
                for (std::int64_t j = 0; j < spec.m; ++j)
                    labels[static_cast<std::size_t>(i + j)] =
                        detail::argmax_symbol(set[static_cast<std::size_t>(k)], j);
                planted.insert({k, i});
            }
            Sequence seq(alphabet, labels);

            // Sort all scores; the threshold goes in the gap above rank planted+1.
            std::vector<std::int64_t> raws;
            raws.reserve(spec.K * static_cast<std::size_t>(n_sup));
            for (std::size_t k = 0; k < spec.K; ++k)
                for (std::int64_t i = 0; i < n_sup; ++i)
                    raws.push_back(score_segment(set[k], seq, i).raw());
            std::sort(raws.begin(), raws.end(), std::greater<>());

            std::int64_t w_raw;
            if (spec.planted == 0) {
                w_raw = raws.front() + 1;
            } else if (spec.planted >= raws.size()) {
                w_raw = raws.back();
            } else {
                const std::int64_t qth = raws[spec.planted - 1];
                const std::int64_t next = raws[spec.planted];
                if (qth == next) continue; // tie at the cut, try again
                w_raw = next + (qth - next + 1) / 2;
            }
            const FxValue w_th = FxValue::from_raw(w_raw, spec.format);
            const MatchSet p_sol = classical_match(set, seq, w_th);
            if (p_sol.size() != spec.planted) continue;
            if (!planted.subset_of(p_sol)) continue;

            return SynthInstance{std::move(seq), std::move(set),    bg,  planted,
                                 w_th,           std::nullopt,      p_sol, MatchSet{},
                                 MatchSet{}};
        }

        // Soft-hard mode: thresholds from the most permissive PWM's moments.
        double w_soft_best = 0.0, w_hard_best = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < spec.K; ++k) {
            const MomentSummary moments = compute_moments(set[k], bg);
            if (!(moments.s2 > 0.0)) {
                ok = false;
                break;
            }
            const double ws = moments.mu_tilde + spec.x_soft * moments.s();
            if (ws > w_soft_best) {
                w_soft_best = ws;
                w_hard_best = moments.mu_tilde + spec.x_hard * moments.s();
            }
        }
        if (!ok) continue;
        SoftHardThresholds th;
        th.x_soft = spec.x_soft;
        th.x_hard = spec.x_hard;
        th.w_soft = w_soft_best;
        th.w_hard = w_hard_best;
        const double md = static_cast<double>(spec.m);
        if (!(th.w_soft > 0.0 && th.w_soft < th.w_hard && th.w_hard < md)) continue;

        // PWMs whose best attainable score clears w_hard with margin can host
        // planted segments.
        std::vector<std::int64_t> eligible;
        for (std::size_t k = 0; k < spec.K; ++k) {
            double best = 0.0;
            for (std::int64_t j = 0; j < spec.m; ++j)
                best += set[k].entry(j, detail::argmax_symbol(set[k], j)).to_double();
            if (best >= th.w_hard + 0.6 * th.width())
                eligible.push_back(static_cast<std::int64_t>(k));
        }
        if (eligible.empty()) continue;

        const auto positions =
            detail::plant_positions(n_sup, spec.m, plant_count, rng);
        MatchSet planted;
        std::size_t slot = 0;
        bool planted_ok = true;
        for (; slot < spec.planted_hard && planted_ok; ++slot) {
            const std::int64_t i = positions[slot];
            const std::int64_t k = eligible[rng.uniform_below(eligible.size())];
            const Pwm& pwm = set[static_cast<std::size_t>(k)];
            double score = 0.0;
            for (std::int64_t j = 0; j < spec.m; ++j) {
                const std::uint8_t a = detail::argmax_symbol(pwm, j);
                labels[static_cast<std::size_t>(i + j)] = a;
                score += pwm.entry(j, a).to_double();
            }
            if (score < th.w_hard + 0.1 * th.width()) planted_ok = false;
            planted.insert({k, i});
        }
        for (; slot < plant_count && planted_ok; ++slot) {
            const std::int64_t i = positions[slot];
            const std::int64_t k = eligible[rng.uniform_below(eligible.size())];
            const Pwm& pwm = set[static_cast<std::size_t>(k)];
            // Start from the argmax string and demote positions greedily until
            // the score drops inside the band.
            std::vector<std::uint8_t> window(static_cast<std::size_t>(spec.m));
            double score = 0.0;
            for (std::int64_t j = 0; j < spec.m; ++j) {
                window[static_cast<std::size_t>(j)] = detail::argmax_symbol(pwm, j);
                score += pwm.entry(j, window[static_cast<std::size_t>(j)]).to_double();
            }
            const double lo = th.w_soft + 0.15 * th.width();
            const double hi = th.w_soft + 0.45 * th.width();
            for (std::int64_t j = 0; j < spec.m && score > hi; ++j) {
                const std::uint8_t cur = window[static_cast<std::size_t>(j)];
                std::uint8_t pick = cur;
                double pick_score = score;
                for (std::size_t a = 0; a < alphabet.size(); ++a) {
                    const double cand = score - pwm.entry(j, cur).to_double() +
                                        pwm.entry(j, a).to_double();
                    if (cand >= lo && cand < pick_score) {
                        pick = static_cast<std::uint8_t>(a);
                        pick_score = cand;
                    }
                }
                window[static_cast<std::size_t>(j)] = pick;
                score = pick_score;
            }
            if (!(score >= lo && score <= hi)) {
                planted_ok = false;
                break;
            }
            for (std::int64_t j = 0; j < spec.m; ++j)
                labels[static_cast<std::size_t>(i + j)] = window[static_cast<std::size_t>(j)];
            planted.insert({k, i});
        }
        if (!planted_ok) continue;

        Sequence seq(alphabet, labels);
        const FxValue w_hard_fx = FxValue::from_double(th.w_hard, spec.format);
        const FxValue w_soft_fx = FxValue::from_double(th.w_soft, spec.format);
        const MatchSet p_hard = classical_match(set, seq, w_hard_fx);
        const MatchSet p_soft = classical_match(set, seq, w_soft_fx);
        if (p_hard.size() != spec.planted_hard) continue;
        if (p_soft.size() > spec.max_soft) continue;
        if (p_soft.size() < spec.planted_hard + spec.planted_soft) continue;

        return SynthInstance{std::move(seq), std::move(set), bg,     planted, w_hard_fx,
                             th,             p_hard,         p_hard, p_soft};
    }
    throw ResourceError("synthetic instance generation exhausted its attempts");
}

} // namespace qpwm
