#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qpwm/errors.hpp"
#include "qpwm/pwm.hpp"

namespace qpwm {

/// Query counters for the three data oracles plus QRAM preparation costs.
/// One oracle application over a superposition counts as one query.
struct QueryLedger {
    std::uint64_t seq_queries = 0;
    std::uint64_t pwm_queries = 0;
    std::uint64_t p_queries = 0;
    std::uint64_t init_units = 0;
    std::uint64_t update_units = 0;
    std::uint64_t classical_lookups = 0; // classical verification work, kept apart

    void reset() { *this = QueryLedger{}; }
};

/// QRAM registering the sequence; loading n symbols costs n units.
class QramSeq {
public:
    explicit QramSeq(Sequence seq) : seq_(std::move(seq)) {}

    std::uint64_t init_cost() const { return static_cast<std::uint64_t>(seq_.size()); }
    const Sequence& sequence() const { return seq_; }

    std::uint8_t lookup(std::int64_t i) const { return seq_.label(i); }

private:
    Sequence seq_;
};

/// QRAM registering the PWM set; loading m*|A|*K entries costs that many units.
class QramPwm {
public:
    explicit QramPwm(PwmSet pwms) : pwms_(std::move(pwms)) {}

    std::uint64_t init_cost() const {
        return static_cast<std::uint64_t>(pwms_.length()) * pwms_.alphabet().size() *
               pwms_.size();
    }
    const PwmSet& pwms() const { return pwms_; }

    FxValue lookup(std::int64_t k, std::int64_t pos, std::size_t label) const {
        if (k < 0 || static_cast<std::size_t>(k) >= pwms_.size())
            throw RangeError("PWM index out of range");
        return pwms_[static_cast<std::size_t>(k)].entry(pos, label);
    }

private:
    PwmSet pwms_;
};

/// kappa-slot table behind O_P: for each position, the PWM indices already
/// found there, dummy slots holding -1. Insertion is O(1); membership is a
/// scan of kappa slots.
class ExclusionTable {
public:
    ExclusionTable(std::int64_t n, std::size_t kappa) : n_(n), kappa_(kappa) {
        if (kappa == 0) throw PreconditionError("exclusion table needs kappa >= 1");
        slots_.assign(static_cast<std::size_t>(n) * kappa, kDummy);
    }

    std::size_t kappa() const { return kappa_; }
    std::int64_t positions() const { return n_; }
    std::uint64_t init_cost() const { return kappa_ * static_cast<std::uint64_t>(n_); }

    bool contains(std::int64_t k, std::int64_t i) const {
        check_position(i);
        const std::size_t base = static_cast<std::size_t>(i) * kappa_;
        for (std::size_t s = 0; s < kappa_; ++s)
            if (slots_[base + s] == k) return true;
        return false;
    }

    void insert(const IndexPair& pair) {
        check_position(pair.i);
        const std::size_t base = static_cast<std::size_t>(pair.i) * kappa_;
        for (std::size_t s = 0; s < kappa_; ++s)
            if (slots_[base + s] == pair.k)
                throw PreconditionError("pair already present in exclusion table");
        for (std::size_t s = 0; s < kappa_; ++s) {
            if (slots_[base + s] == kDummy) {
                slots_[base + s] = pair.k;
                touched_.push_back(base + s);
                return;
            }
        }
        throw CapacityError("exclusion table overflow: more than kappa PWMs at one position");
    }

    /// Reset by clearing only the cells updated since construction.
    void reset_touched(QueryLedger& ledger) {
        for (std::size_t cell : touched_) {
            slots_[cell] = kDummy;
            ledger.update_units += 1;
        }
        touched_.clear();
    }

    std::size_t touched_cells() const { return touched_.size(); }

private:
    static constexpr std::int64_t kDummy = -1;

    void check_position(std::int64_t i) const {
        if (i < 0 || i >= n_) throw RangeError("exclusion table position out of range");
    }

    std::int64_t n_;
    std::size_t kappa_;
    std::vector<std::int64_t> slots_;
    std::vector<std::size_t> touched_;
};

/// The three emulated QRAMs plus the ledger for one algorithm run.
struct Qrams {
    QramSeq seq;
    QramPwm pwm;
    ExclusionTable exclusion;
    QueryLedger ledger;
};

inline Qrams build_qrams(const Sequence& seq, const PwmSet& pwms, std::size_t kappa) {
    Qrams q{QramSeq(seq), QramPwm(pwms), ExclusionTable(seq.size(), kappa), QueryLedger{}};
    q.ledger.init_units = q.seq.init_cost() + q.pwm.init_cost() + q.exclusion.init_cost();
    return q;
}

inline std::uint8_t o_seq_query(const QramSeq& qram, std::int64_t i, QueryLedger& ledger) {
    ledger.seq_queries += 1;
    return qram.lookup(i);
}

inline FxValue o_pwm_query(const QramPwm& qram, std::int64_t k, std::int64_t pos,
                           std::size_t label, QueryLedger& ledger) {
    ledger.pwm_queries += 1;
    return qram.lookup(k, pos, label);
}

/// O_P bit convention: 1 means (k,i) is NOT in the excluded set.
inline int o_p_query(const ExclusionTable& table, std::int64_t k, std::int64_t i,
                     QueryLedger& ledger) {
    ledger.p_queries += 1;
    return table.contains(k, i) ? 0 : 1;
}

inline void exclusion_update(ExclusionTable& table, const IndexPair& pair, QueryLedger& ledger) {
    table.insert(pair);
    ledger.update_units += 1;
}

} // namespace qpwm
