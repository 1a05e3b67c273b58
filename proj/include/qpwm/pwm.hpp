#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpwm/errors.hpp"
#include "qpwm/fixed_point.hpp"

namespace qpwm {

/// Ordered set of distinct symbols; a symbol's position is its integer label.
class Alphabet {
public:
    explicit Alphabet(std::string_view symbols) {
        if (symbols.empty()) throw DegenerateInputError("alphabet must be nonempty");
        index_.fill(-1);
        for (char c : symbols) {
            const auto u = static_cast<unsigned char>(c);
            if (index_[u] >= 0) throw DegenerateInputError("alphabet has duplicate symbol");
            index_[u] = static_cast<int>(symbols_.size());
            symbols_.push_back(c);
        }
    }

    static Alphabet dna() { return Alphabet("ACGT"); }

    std::size_t size() const { return symbols_.size(); }
    char symbol(std::size_t label) const {
        if (label >= symbols_.size()) throw RangeError("alphabet label out of range");
        return symbols_[label];
    }
    bool has(char c) const { return index_[static_cast<unsigned char>(c)] >= 0; }
    int label(char c) const {
        const int l = index_[static_cast<unsigned char>(c)];
        if (l < 0) throw ParseError(std::string("symbol not in alphabet: ") + c);
        return l;
    }
    const std::string& symbols() const { return symbols_; }

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::string symbols_;
    std::array<int, 256> index_{};
};

/// Alphabet-encoded string s_0..s_{n-1}.
class Sequence {
public:
    Sequence(Alphabet alphabet, std::vector<std::uint8_t> labels)
        : alphabet_(std::move(alphabet)), labels_(std::move(labels)) {
        if (labels_.size() < 2) throw DegenerateInputError("sequence needs length >= 2");
        for (auto l : labels_)
            if (l >= alphabet_.size()) throw RangeError("sequence label outside alphabet");
    }

    static Sequence from_string(const Alphabet& alphabet, std::string_view text) {
        std::vector<std::uint8_t> labels;
        labels.reserve(text.size());
        for (char c : text) labels.push_back(static_cast<std::uint8_t>(alphabet.label(c)));
        return Sequence(alphabet, std::move(labels));
    }

    std::int64_t size() const { return static_cast<std::int64_t>(labels_.size()); }
    std::uint8_t label(std::int64_t i) const {
        if (i < 0 || i >= size()) throw RangeError("sequence position out of range");
        return labels_[static_cast<std::size_t>(i)];
    }
    const Alphabet& alphabet() const { return alphabet_; }
    std::string to_string() const {
        std::string s;
        s.reserve(labels_.size());
        for (auto l : labels_) s.push_back(alphabet_.symbol(l));
        return s;
    }

private:
    Alphabet alphabet_;
    std::vector<std::uint8_t> labels_;
};

/// One position weight matrix: m x |A| fixed-point scores, row per position.
class Pwm {
public:
    Pwm(Alphabet alphabet, std::vector<std::vector<FxValue>> rows)
        : alphabet_(std::move(alphabet)), rows_(std::move(rows)) {
        if (rows_.size() < 2) throw DegenerateInputError("PWM needs length m >= 2");
        for (const auto& row : rows_) {
            if (row.size() != alphabet_.size())
                throw DegenerateInputError("PWM row width does not match alphabet");
            for (const auto& e : row)
                if (!(e.format() == format())) throw FormatError("PWM entries mix formats");
        }
    }

    std::int64_t length() const { return static_cast<std::int64_t>(rows_.size()); }
    const Alphabet& alphabet() const { return alphabet_; }
    const FixedPointFormat& format() const { return rows_[0][0].format(); }

    const FxValue& entry(std::int64_t pos, std::size_t label) const {
        if (pos < 0 || pos >= length()) throw RangeError("PWM position out of range");
        if (label >= alphabet_.size()) throw RangeError("PWM symbol label out of range");
        return rows_[static_cast<std::size_t>(pos)][label];
    }

    bool rescaled() const { return bounds_.has_value(); }
    /// (M_min, M_max) of the original set; present iff this PWM came out of rescale().
    const std::pair<FxValue, FxValue>& rescale_bounds() const {
        if (!bounds_) throw PreconditionError("PWM is not rescaled");
        return *bounds_;
    }
    void mark_rescaled(FxValue m_min, FxValue m_max) {
        const FxValue lo = FxValue::zero(format());
        const FxValue hi = FxValue::one(format());
        for (const auto& row : rows_)
            for (const auto& e : row)
                if (e.raw() < lo.raw() || e.raw() > hi.raw())
                    throw PreconditionError("rescaled PWM entry outside [0,1]");
        bounds_ = {m_min, m_max};
    }

private:
    Alphabet alphabet_;
    std::vector<std::vector<FxValue>> rows_;
    std::optional<std::pair<FxValue, FxValue>> bounds_;
};

/// K PWMs sharing one alphabet, one length and one fixed-point format.
class PwmSet {
public:
    explicit PwmSet(std::vector<Pwm> pwms) : pwms_(std::move(pwms)) {
        if (pwms_.empty()) throw DegenerateInputError("PWM set needs K >= 1");
        for (const auto& p : pwms_) {
            if (!(p.alphabet() == alphabet())) throw DegenerateInputError("PWM set mixes alphabets");
            if (p.length() != length()) throw DegenerateInputError("PWM set mixes lengths (pad first)");
            if (!(p.format() == format())) throw FormatError("PWM set mixes fixed-point formats");
        }
    }

    std::size_t size() const { return pwms_.size(); }
    std::int64_t length() const { return pwms_[0].length(); }
    const Alphabet& alphabet() const { return pwms_[0].alphabet(); }
    const FixedPointFormat& format() const { return pwms_[0].format(); }
    const Pwm& operator[](std::size_t k) const { return pwms_[k]; }
    const std::vector<Pwm>& pwms() const { return pwms_; }
    bool rescaled() const {
        return std::all_of(pwms_.begin(), pwms_.end(), [](const Pwm& p) { return p.rescaled(); });
    }

private:
    std::vector<Pwm> pwms_;
};

/// A (PWM index, sequence position) pair.
struct IndexPair {
    std::int64_t k = 0;
    std::int64_t i = 0;
    auto operator<=>(const IndexPair&) const = default;
};

/// Ordered, duplicate-free set of index pairs.
class MatchSet {
public:
    MatchSet() = default;

    bool insert(const IndexPair& p) {
        const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), p);
        if (it != pairs_.end() && *it == p) return false;
        pairs_.insert(it, p);
        return true;
    }
    bool contains(const IndexPair& p) const {
        return std::binary_search(pairs_.begin(), pairs_.end(), p);
    }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    auto begin() const { return pairs_.begin(); }
    auto end() const { return pairs_.end(); }
    const std::vector<IndexPair>& pairs() const { return pairs_; }

    bool operator==(const MatchSet&) const = default;

    /// True when every element of this set is also in other.
    bool subset_of(const MatchSet& other) const {
        return std::all_of(pairs_.begin(), pairs_.end(),
                           [&](const IndexPair& p) { return other.contains(p); });
    }

private:
    std::vector<IndexPair> pairs_;
};

/// Number of scored positions: i ranges over [n-m+1]_0.
inline std::int64_t position_count(const PwmSet& pwms, const Sequence& seq) {
    const std::int64_t n = seq.size();
    const std::int64_t m = pwms.length();
    if (n <= m) throw DegenerateInputError("sequence must be longer than the PWM");
    return n - m + 1;
}

/// Segment score: sum of the per-position entries for s_i..s_{i+m-1}.
inline FxValue score_segment(const Pwm& pwm, const Sequence& seq, std::int64_t i) {
    const std::int64_t m = pwm.length();
    if (i < 0 || i > seq.size() - m) throw RangeError("segment position out of range");
    FxValue acc = FxValue::zero(pwm.format());
    for (std::int64_t j = 0; j < m; ++j) acc = fx_add(acc, pwm.entry(j, seq.label(i + j)));
    return acc;
}

struct RescaleResult {
    PwmSet pwms;
    FxValue w_th;
    FxValue m_min;
    FxValue m_max;
};

/// Affine rescale of the whole set into [0,1], with the matching threshold
/// shift w_th' = (w_th - m*M_min)/(M_max - M_min). The match set is invariant.
inline RescaleResult rescale(const PwmSet& set, const FxValue& w_th) {
    const FixedPointFormat fmt = set.format();
    std::int64_t lo = set[0].entry(0, 0).raw();
    std::int64_t hi = lo;
    for (std::size_t k = 0; k < set.size(); ++k)
        for (std::int64_t pos = 0; pos < set.length(); ++pos)
            for (std::size_t a = 0; a < set.alphabet().size(); ++a) {
                const std::int64_t r = set[k].entry(pos, a).raw();
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
    if (lo == hi) throw DegenerateInputError("rescale: constant PWM set, M_max == M_min");

    const FxValue m_min = FxValue::from_raw(lo, fmt);
    const FxValue m_max = FxValue::from_raw(hi, fmt);
    const int128 delta = int128(hi) - int128(lo);

    std::vector<Pwm> out;
    out.reserve(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
        std::vector<std::vector<FxValue>> rows;
        rows.reserve(static_cast<std::size_t>(set.length()));
        for (std::int64_t pos = 0; pos < set.length(); ++pos) {
            std::vector<FxValue> row;
            row.reserve(set.alphabet().size());
            for (std::size_t a = 0; a < set.alphabet().size(); ++a)
                row.push_back(FxValue::from_rational(
                    int128(set[k].entry(pos, a).raw()) - int128(lo), delta, fmt));
            rows.push_back(std::move(row));
        }
        Pwm p(set.alphabet(), std::move(rows));
        p.mark_rescaled(m_min, m_max);
        out.push_back(std::move(p));
    }
    const FxValue w_out = FxValue::from_rational(
        int128(w_th.raw()) - int128(set.length()) * int128(lo), delta, fmt);
    return RescaleResult{PwmSet(std::move(out)), w_out, m_min, m_max};
}

/// Pad shorter PWMs with all-zero rows up to the longest length.
inline PwmSet pad_to_uniform_length(const std::vector<Pwm>& pwms) {
    if (pwms.empty()) throw DegenerateInputError("pad_to_uniform_length: empty list");
    std::int64_t m = 0;
    for (const auto& p : pwms) m = std::max(m, p.length());
    std::vector<Pwm> out;
    out.reserve(pwms.size());
    for (const auto& p : pwms) {
        std::vector<std::vector<FxValue>> rows;
        rows.reserve(static_cast<std::size_t>(m));
        for (std::int64_t pos = 0; pos < p.length(); ++pos) {
            std::vector<FxValue> row;
            for (std::size_t a = 0; a < p.alphabet().size(); ++a) row.push_back(p.entry(pos, a));
            rows.push_back(std::move(row));
        }
        const std::vector<FxValue> zero_row(p.alphabet().size(), FxValue::zero(p.format()));
        for (std::int64_t pos = p.length(); pos < m; ++pos) rows.push_back(zero_row);
        out.emplace_back(p.alphabet(), std::move(rows));
    }
    return PwmSet(std::move(out));
}

/// Exhaustive ground-truth matcher: all (k,i) with w_{k,i} >= w_th.
inline MatchSet classical_match(const PwmSet& pwms, const Sequence& seq, const FxValue& w_th) {
    MatchSet found;
    const std::int64_t positions = position_count(pwms, seq);
    for (std::size_t k = 0; k < pwms.size(); ++k)
        for (std::int64_t i = 0; i < positions; ++i)
            if (fx_compare(score_segment(pwms[k], seq, i), w_th) == 1)
                found.insert({static_cast<std::int64_t>(k), i});
    return found;
}

} // namespace qpwm
