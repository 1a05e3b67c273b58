#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qpwm/errors.hpp"

namespace qpwm {

/// Sparse multi-register state: a map from composite basis labels (one integer
/// per register) to complex amplitudes. Deterministic iteration order.
class SparseState {
public:
    using Label = std::vector<std::int64_t>;
    using Amplitudes = std::map<Label, std::complex<double>>;

    static constexpr std::size_t default_cap = std::size_t{1} << 22;

    explicit SparseState(std::size_t num_registers, std::size_t cap = default_cap)
        : num_registers_(num_registers), cap_(cap) {}

    std::size_t num_registers() const { return num_registers_; }
    std::size_t size() const { return amps_.size(); }
    std::size_t cap() const { return cap_; }
    const Amplitudes& amplitudes() const { return amps_; }

    void add_amplitude(Label label, std::complex<double> amp) {
        if (label.size() != num_registers_)
            throw FormatError("basis label register count mismatch");
        auto [it, inserted] = amps_.try_emplace(std::move(label), amp);
        if (!inserted) it->second += amp;
        if (amps_.size() > cap_)
            throw ResourceError("sparse state exceeds configured basis-state cap");
    }

    double norm() const {
        double total = 0.0;
        for (const auto& [label, amp] : amps_) total += std::norm(amp);
        return total;
    }

    void check_normalized(double tol = 1e-9) const {
        if (std::abs(norm() - 1.0) > tol)
            throw PreconditionError("sparse state is not normalized");
    }

    /// Squared-amplitude mass of basis states whose register reg holds value.
    double mass_where(std::size_t reg, std::int64_t value) const {
        if (reg >= num_registers_) throw RangeError("register index out of range");
        double total = 0.0;
        for (const auto& [label, amp] : amps_)
            if (label[reg] == value) total += std::norm(amp);
        return total;
    }

    /// Count of basis states whose register reg holds value.
    std::uint64_t count_where(std::size_t reg, std::int64_t value) const {
        if (reg >= num_registers_) throw RangeError("register index out of range");
        std::uint64_t c = 0;
        for (const auto& [label, amp] : amps_)
            if (label[reg] == value) ++c;
        return c;
    }

private:
    std::size_t num_registers_;
    std::size_t cap_;
    Amplitudes amps_;
};

} // namespace qpwm
