#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qpwm/amplitude_engines.hpp"
#include "qpwm/errors.hpp"
#include "qpwm/pwm.hpp"
#include "qpwm/qram.hpp"
#include "qpwm/sparse_state.hpp"
#include "qpwm/thresholds.hpp"

namespace qpwm {

// Register layout of the iterative score circuit (seven registers):
// 0:k  1:i  2:loop counter  3:absolute position  4:symbol  5:entry  6:score.
namespace reg {
inline constexpr std::size_t k = 0;
inline constexpr std::size_t i = 1;
inline constexpr std::size_t loop = 2;
inline constexpr std::size_t pos = 3;
inline constexpr std::size_t symbol = 4;
inline constexpr std::size_t entry = 5;
inline constexpr std::size_t score = 6;

// Flagged seven-register state: score and threshold values, then the
// comparator bit, the exclusion bit and the AND flag.
inline constexpr std::size_t f_score = 2;
inline constexpr std::size_t f_thresh = 3;
inline constexpr std::size_t f_cmp = 4;
inline constexpr std::size_t f_p = 5;
inline constexpr std::size_t f_flag = 6;
} // namespace reg

inline SparseState naive_score_initial_state(std::int64_t k, std::int64_t i,
                                             std::size_t cap = SparseState::default_cap) {
    SparseState state(7, cap);
    state.add_amplitude({k, i, 0, i, 0, 0, 0}, 1.0);
    return state;
}

/// Iterative score circuit: maps each basis label (k, i, 0, i, 0, 0, w0) to
/// (k, i, m-1, i+m-1, s_{i+m-1}, M_k(m-1, s_{i+m-1}), w0 + w_{k,i}).
/// The scratch registers stay uncomputed on the final iteration. One
/// application costs m queries each to the sequence and PWM oracles, however
/// large the superposition.
inline SparseState apply_naive_score_circuit(const SparseState& in, const QramSeq& qseq,
                                             const QramPwm& qpwm, QueryLedger* ledger) {
    const std::int64_t m = qpwm.pwms().length();
    const std::int64_t n = qseq.sequence().size();
    const FixedPointFormat fmt = qpwm.pwms().format();
    SparseState out(7, in.cap());
    for (const auto& [label, amp] : in.amplitudes()) {
        const std::int64_t k = label[reg::k];
        const std::int64_t i = label[reg::i];
        if (i < 0 || i > n - m) throw RangeError("score circuit: position out of range");
        if (label[reg::loop] != 0 || label[reg::pos] != i || label[reg::symbol] != 0 ||
            label[reg::entry] != 0)
            throw PreconditionError("score circuit: scratch registers not initialized");
        FxValue acc = FxValue::from_raw(label[reg::score], fmt);
        std::uint8_t sym = 0;
        FxValue entry = FxValue::zero(fmt);
        for (std::int64_t j = 0; j < m; ++j) {
            sym = qseq.lookup(i + j);
            entry = qpwm.lookup(k, j, sym);
            acc = fx_add(acc, entry);
        }
        out.add_amplitude({k, i, m - 1, i + m - 1, sym, entry.raw(), acc.raw()}, amp);
    }
    if (ledger) {
        ledger->seq_queries += static_cast<std::uint64_t>(m);
        ledger->pwm_queries += static_cast<std::uint64_t>(m);
    }
    return out;
}

/// Inverse of the score circuit (uncompute): restores the initial labels.
inline SparseState apply_naive_score_circuit_inverse(const SparseState& in, const QramSeq& qseq,
                                                     const QramPwm& qpwm, QueryLedger* ledger) {
    const std::int64_t m = qpwm.pwms().length();
    const FixedPointFormat fmt = qpwm.pwms().format();
    SparseState out(7, in.cap());
    for (const auto& [label, amp] : in.amplitudes()) {
        const std::int64_t k = label[reg::k];
        const std::int64_t i = label[reg::i];
        FxValue w = FxValue::zero(fmt);
        std::uint8_t sym = 0;
        FxValue entry = FxValue::zero(fmt);
        for (std::int64_t j = 0; j < m; ++j) {
            sym = qseq.lookup(i + j);
            entry = qpwm.lookup(k, j, sym);
            w = fx_add(w, entry);
        }
        if (label[reg::loop] != m - 1 || label[reg::pos] != i + m - 1 ||
            label[reg::symbol] != sym || label[reg::entry] != entry.raw())
            throw PreconditionError("inverse score circuit: label not in the circuit image");
        const FxValue acc = fx_sub(FxValue::from_raw(label[reg::score], fmt), w);
        out.add_amplitude({k, i, 0, i, 0, 0, acc.raw()}, amp);
    }
    if (ledger) {
        ledger->seq_queries += static_cast<std::uint64_t>(m);
        ledger->pwm_queries += static_cast<std::uint64_t>(m);
    }
    return out;
}

/// Convenience single-pair run of the score circuit.
inline SparseState run_naive_score_circuit(const QramSeq& qseq, const QramPwm& qpwm,
                                           std::int64_t k, std::int64_t i,
                                           QueryLedger* ledger = nullptr) {
    return apply_naive_score_circuit(naive_score_initial_state(k, i), qseq, qpwm, ledger);
}

inline FxValue score_register_value(const SparseState& state, const FixedPointFormat& fmt) {
    if (state.size() != 1) throw PreconditionError("expected a single basis state");
    const auto& [label, amp] = *state.amplitudes().begin();
    return FxValue::from_raw(label[reg::score], fmt);
}

/// One-position score oracle: returns M_k(j, s_{i+j}) at the cost of a single
/// query each to the sequence and PWM oracles.
inline FxValue sc_one(const QramSeq& qseq, const QramPwm& qpwm, std::int64_t k, std::int64_t i,
                      std::int64_t j, QueryLedger& ledger) {
    if (i < 0 || j < 0 || i + j >= qseq.sequence().size())
        throw RangeError("sc_one: position out of range");
    const std::uint8_t sym = o_seq_query(qseq, i + j, ledger);
    return o_pwm_query(qpwm, k, j, sym, ledger);
}

/// The full flagged superposition: equiprobable (k,i), score, threshold,
/// comparator bit, exclusion bit and AND flag. The flagged mass equals
/// |P_sol intersect not-P| / (K * N_sup).
///
/// The superposition ranges over the N_sup = n-m+1 positions where the score
/// is defined, so one application costs m sequence queries, m PWM queries and
/// one exclusion query.
inline SparseState build_flagged_state_naive(const PwmSet& pwms, const Sequence& seq,
                                             const ExclusionTable& excluded, const FxValue& w_th,
                                             std::size_t cap = SparseState::default_cap,
                                             QueryLedger* ledger = nullptr) {
    const std::int64_t n_sup = position_count(pwms, seq);
    const std::int64_t total = static_cast<std::int64_t>(pwms.size()) * n_sup;
    if (static_cast<std::size_t>(total) > cap)
        throw ResourceError("flagged state would exceed the sparse-state cap");

    const QramSeq qseq(seq);
    const QramPwm qpwm(pwms);
    const double amp = 1.0 / std::sqrt(static_cast<double>(total));

    SparseState prepared(7, cap);
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pwms.size()); ++k)
        for (std::int64_t i = 0; i < n_sup; ++i)
            prepared.add_amplitude({k, i, 0, i, 0, 0, 0}, amp);
    const SparseState scored = apply_naive_score_circuit(prepared, qseq, qpwm, ledger);

    SparseState out(7, cap);
    for (const auto& [label, a] : scored.amplitudes()) {
        const std::int64_t k = label[reg::k];
        const std::int64_t i = label[reg::i];
        const FxValue w = FxValue::from_raw(label[reg::score], pwms.format());
        const std::int64_t cmp = fx_compare(w, w_th);
        const std::int64_t pbit = excluded.contains(k, i) ? 0 : 1;
        out.add_amplitude({k, i, w.raw(), w_th.raw(), cmp, pbit, cmp & pbit}, a);
    }
    if (ledger) ledger->p_queries += 1;
    return out;
}

inline SparseState build_flagged_state_naive(const PwmSet& pwms, const Sequence& seq,
                                             const MatchSet& p_temp, const FxValue& w_th,
                                             std::size_t cap = SparseState::default_cap,
                                             QueryLedger* ledger = nullptr) {
    ExclusionTable table(seq.size(), std::max<std::size_t>(1, pwms.size()));
    QueryLedger scratch;
    for (const auto& pair : p_temp) exclusion_update(table, pair, scratch);
    return build_flagged_state_naive(pwms, seq, table, w_th, cap, ledger);
}

/// Amplitude of the flagged subspace plus the sampling weights over it.
struct GoodStateAmplitude {
    double a = 0.0;
    std::uint64_t n_remaining = 0; // |P_sol intersect complement(P_temp)|
    std::vector<std::pair<IndexPair, double>> weights;
};

/// Analytic counterpart of build_flagged_state_naive: counts solutions still
/// outside P_temp. The good subspace is uniform over them.
inline GoodStateAmplitude good_amplitude_naive(const PwmSet& pwms, const Sequence& seq,
                                               const MatchSet& p_temp, const FxValue& w_th) {
    const std::int64_t n_sup = position_count(pwms, seq);
    const MatchSet p_sol = classical_match(pwms, seq, w_th);
    GoodStateAmplitude g;
    for (const auto& pair : p_sol) {
        if (p_temp.contains(pair)) continue;
        g.weights.emplace_back(pair, 1.0);
        ++g.n_remaining;
    }
    g.a = static_cast<double>(g.n_remaining) /
          (static_cast<double>(pwms.size()) * static_cast<double>(n_sup));
    return g;
}

/// Per-pair squared amplitude of the flagged subspace in the Monte-Carlo
/// score state: the probability that the median of J estimation runs of
/// w_{k,i}/m lands at or above w_mid/m.
inline double qmci_pair_weight(double mu, const SoftHardThresholds& thresholds, std::int64_t m,
                               const QmciParams& params) {
    const double threshold = thresholds.mid() / static_cast<double>(m);
    return qmci_tail(std::clamp(mu, 0.0, 1.0), threshold, params);
}

/// Flagged amplitude of the Monte-Carlo method: (1/(K N_sup)) * sum of the
/// per-pair weights over pairs outside P_temp. n_remaining counts the
/// still-unfound pairs at or above w_hard.
inline GoodStateAmplitude qmci_good_amplitude(const PwmSet& pwms, const Sequence& seq,
                                              const MatchSet& p_temp,
                                              const SoftHardThresholds& thresholds,
                                              const QmciParams& params) {
    const std::int64_t n_sup = position_count(pwms, seq);
    const std::int64_t m = pwms.length();
    const double md = static_cast<double>(m);
    const FxValue w_hard_fx = FxValue::from_double(thresholds.w_hard, pwms.format());
    GoodStateAmplitude g;
    double total = 0.0;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pwms.size()); ++k)
        for (std::int64_t i = 0; i < n_sup; ++i) {
            if (p_temp.contains({k, i})) continue;
            const FxValue w = score_segment(pwms[static_cast<std::size_t>(k)], seq, i);
            const double weight = qmci_pair_weight(w.to_double() / md, thresholds, m, params);
            g.weights.emplace_back(IndexPair{k, i}, weight);
            total += weight;
            if (fx_compare(w, w_hard_fx) == 1) ++g.n_remaining;
        }
    g.a = total / (static_cast<double>(pwms.size()) * static_cast<double>(n_sup));
    return g;
}

} // namespace qpwm
