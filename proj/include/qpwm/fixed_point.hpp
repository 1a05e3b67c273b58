#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qpwm/errors.hpp"

namespace qpwm {

using int128 = __int128;

/// Two's-complement fixed-point layout. int_bits includes the sign bit when
/// signed; total width is capped at 63 so raw values fit an int64.
struct FixedPointFormat {
    int int_bits = 16;
    int frac_bits = 32;
    bool is_signed = true;

    int total_bits() const { return int_bits + frac_bits; }

    void validate() const {
        if (frac_bits < 1) throw FormatError("fixed-point format needs frac_bits >= 1");
        if (int_bits < 0) throw FormatError("fixed-point format needs int_bits >= 0");
        if (total_bits() > 63) throw FormatError("fixed-point format wider than 63 bits");
        if (is_signed && int_bits < 1) throw FormatError("signed format needs a sign bit");
    }

    bool operator==(const FixedPointFormat&) const = default;
};

/// A fixed-point number: raw integer scaled by 2^-frac_bits.
///
/// Construction rounds half-to-even; arithmetic wraps modulo 2^total_bits
/// like the reversible register oracles it stands in for, with a sticky
/// overflow flag.
class FxValue {
public:
    FxValue() = default;

    static FxValue from_raw(std::int64_t raw, const FixedPointFormat& fmt) {
        fmt.validate();
        FxValue v;
        v.fmt_ = fmt;
        v.raw_ = wrap(raw, fmt, v.overflow_);
        return v;
    }

    /// Exact rational num/den rounded half-to-even into the format. The
    /// quotient bits are pulled out by long division, so den may be as large
    /// as 10^36 without overflowing the 128-bit intermediates.
    static FxValue from_rational(int128 num, int128 den, const FixedPointFormat& fmt) {
        fmt.validate();
        if (den == 0) throw DegenerateInputError("from_rational: zero denominator");
        const bool negative = (num < 0) != (den < 0);
        const int128 q = divide_round_half_even(magnitude(num), magnitude(den), fmt.frac_bits);
        FxValue v;
        v.fmt_ = fmt;
        v.raw_ = wrap(negative ? -q : q, fmt, v.overflow_);
        return v;
    }

    /// Decimal literal such as "-1.31", parsed exactly. Up to 36 fractional
    /// digits, which covers the renderings of every format up to 36
    /// fractional bits.
    static FxValue from_decimal(std::string_view text, const FixedPointFormat& fmt) {
        std::size_t pos = 0;
        bool negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            negative = text[pos] == '-';
            ++pos;
        }
        int128 ipart = 0;
        int128 fpart = 0;
        int128 den = 1;
        bool any_digit = false;
        bool in_fraction = false;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c == '.') {
                if (in_fraction) throw ParseError("bad decimal literal: " + std::string(text));
                in_fraction = true;
                continue;
            }
            if (c < '0' || c > '9') throw ParseError("bad decimal literal: " + std::string(text));
            if (in_fraction) {
                if (den > kMaxDen / 10)
                    throw ParseError("too many fractional digits: " + std::string(text));
                fpart = fpart * 10 + (c - '0');
                den *= 10;
            } else {
                if (ipart > (int128(1) << 70))
                    throw ParseError("decimal literal out of range: " + std::string(text));
                ipart = ipart * 10 + (c - '0');
            }
            any_digit = true;
        }
        if (!any_digit) throw ParseError("empty decimal literal");
        if (ipart > (int128(1) << (120 - fmt.frac_bits)))
            throw ParseError("decimal literal out of range: " + std::string(text));
        // The integer part scales exactly; half-even rounding of the
        // fractional digits alone decides the same way because the integer
        // contribution to the quotient is even (frac_bits >= 1).
        const int128 total = (ipart << fmt.frac_bits) +
                             divide_round_half_even(static_cast<unsigned __int128>(fpart),
                                                    static_cast<unsigned __int128>(den),
                                                    fmt.frac_bits);
        FxValue v;
        v.fmt_ = fmt;
        v.raw_ = wrap(negative ? -total : total, fmt, v.overflow_);
        return v;
    }

    static FxValue from_double(double x, const FixedPointFormat& fmt) {
        if (!std::isfinite(x)) throw RangeError("from_double: non-finite value");
        int exp = 0;
        const double frac = std::frexp(x, &exp);
        const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
        const int shift = exp - 53;
        if (shift >= 0) return from_rational(int128(mant) << shift, 1, fmt);
        return from_rational(mant, int128(1) << (-shift), fmt);
    }

    static FxValue zero(const FixedPointFormat& fmt) { return from_raw(0, fmt); }
    static FxValue one(const FixedPointFormat& fmt) {
        return from_raw(std::int64_t(1) << fmt.frac_bits, fmt);
    }

    std::int64_t raw() const { return raw_; }
    const FixedPointFormat& format() const { return fmt_; }
    bool overflowed() const { return overflow_; }

    double to_double() const { return std::ldexp(static_cast<double>(raw_), -fmt_.frac_bits); }

    bool is_negative() const { return raw_ < 0; }

    /// Exact decimal rendering of raw * 2^-frac_bits, trailing zeros trimmed.
    std::string to_decimal_string() const {
        std::uint64_t mag;
        std::string out;
        if (raw_ < 0) {
            out.push_back('-');
            mag = static_cast<std::uint64_t>(-(raw_ + 1)) + 1;
        } else {
            mag = static_cast<std::uint64_t>(raw_);
        }
        const int f = fmt_.frac_bits;
        const std::uint64_t ipart = mag >> f;
        std::uint64_t fpart = mag - (ipart << f);
        out += std::to_string(ipart);
        if (fpart != 0) {
            out.push_back('.');
            std::string digits;
            while (fpart != 0) {
                const unsigned __int128 prod = static_cast<unsigned __int128>(fpart) * 10u;
                digits.push_back(static_cast<char>('0' + static_cast<int>(prod >> f)));
                fpart = static_cast<std::uint64_t>(prod & ((std::uint64_t(1) << f) - 1));
            }
            out += digits;
        }
        return out;
    }

    friend bool operator==(const FxValue& a, const FxValue& b) {
        return a.raw_ == b.raw_ && a.fmt_ == b.fmt_;
    }

private:
    static constexpr int128 kMaxDen = []() {
        int128 d = 1;
        for (int i = 0; i < 36; ++i) d *= 10;
        return d;
    }();

    static unsigned __int128 magnitude(int128 v) {
        return v < 0 ? static_cast<unsigned __int128>(-(v + 1)) + 1
                     : static_cast<unsigned __int128>(v);
    }

    /// floor(n/d * 2^frac_bits) with the lost remainder rounded half-to-even.
    static int128 divide_round_half_even(unsigned __int128 n, unsigned __int128 d,
                                         int frac_bits) {
        if (d > (~static_cast<unsigned __int128>(0)) / 4)
            throw RangeError("denominator too large for exact division");
        unsigned __int128 q = n / d;
        unsigned __int128 r = n % d;
        if (q > (~static_cast<unsigned __int128>(0)) >> (frac_bits + 2))
            throw RangeError("quotient out of range for exact division");
        for (int bit = 0; bit < frac_bits; ++bit) {
            q <<= 1;
            r <<= 1;
            if (r >= d) {
                q += 1;
                r -= d;
            }
        }
        r <<= 1;
        if (r > d || (r == d && (q & 1) != 0)) q += 1;
        return static_cast<int128>(q);
    }

    static std::int64_t wrap(int128 value, const FixedPointFormat& fmt, bool& overflow) {
        const int total = fmt.total_bits();
        const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << total) - 1;
        unsigned __int128 bits = static_cast<unsigned __int128>(value) & mask;
        int128 wrapped;
        if (fmt.is_signed && (bits >> (total - 1)) != 0) {
            wrapped = static_cast<int128>(bits) - (int128(1) << total);
        } else {
            wrapped = static_cast<int128>(bits);
        }
        if (wrapped != value) overflow = true;
        return static_cast<std::int64_t>(wrapped);
    }

    friend FxValue fx_add(const FxValue&, const FxValue&);
    friend FxValue fx_sub(const FxValue&, const FxValue&);
    friend FxValue fx_mul(const FxValue&, const FxValue&);

    std::int64_t raw_ = 0;
    FixedPointFormat fmt_{};
    bool overflow_ = false;
};

namespace detail {
inline void require_same_format(const FxValue& a, const FxValue& b) {
    if (!(a.format() == b.format()))
        throw FormatError("fixed-point operands have different formats");
}
} // namespace detail

/// O_add semantics: exact sum, wrapped two's complement, overflow flagged.
inline FxValue fx_add(const FxValue& a, const FxValue& b) {
    detail::require_same_format(a, b);
    FxValue v;
    v.fmt_ = a.fmt_;
    v.overflow_ = a.overflow_ || b.overflow_;
    v.raw_ = FxValue::wrap(int128(a.raw_) + int128(b.raw_), v.fmt_, v.overflow_);
    return v;
}

inline FxValue fx_sub(const FxValue& a, const FxValue& b) {
    detail::require_same_format(a, b);
    FxValue v;
    v.fmt_ = a.fmt_;
    v.overflow_ = a.overflow_ || b.overflow_;
    v.raw_ = FxValue::wrap(int128(a.raw_) - int128(b.raw_), v.fmt_, v.overflow_);
    return v;
}

inline FxValue fx_mul(const FxValue& a, const FxValue& b) {
    detail::require_same_format(a, b);
    const int f = a.format().frac_bits;
    int128 prod = int128(a.raw_) * int128(b.raw_);
    // Reduce 2^-2f to 2^-f, half-to-even.
    const int128 den = int128(1) << f;
    int128 q = prod >> f;
    int128 r = prod - (q << f);
    if (2 * r > den || (2 * r == den && (q & 1) != 0)) q += 1;
    FxValue v;
    v.fmt_ = a.fmt_;
    v.overflow_ = a.overflow_ || b.overflow_;
    v.raw_ = FxValue::wrap(q, v.fmt_, v.overflow_);
    return v;
}

/// O_comp semantics: 1 iff x >= y, read off the sign bit of x - y.
inline int fx_compare(const FxValue& x, const FxValue& y) {
    const FxValue d = fx_sub(x, y);
    return d.raw() >= 0 ? 1 : 0;
}

/// O_= semantics: 1 iff the two values are bit-identical.
inline int fx_equal(const FxValue& x, const FxValue& y) {
    detail::require_same_format(x, y);
    return x.raw() == y.raw() ? 1 : 0;
}

/// O_EqPr: N equal amplitudes 1/sqrt(N) over basis states 0..N-1.
inline std::vector<double> equiprob_weights(std::uint64_t n) {
    if (n == 0) throw RangeError("equiprob_weights: N must be positive");
    return std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

/// O_med: exact middle order statistic of an odd-length list.
inline FxValue fx_median(std::vector<FxValue> values) {
    if (values.empty() || values.size() % 2 == 0)
        throw PreconditionError("fx_median: list length must be odd");
    for (std::size_t i = 1; i < values.size(); ++i)
        detail::require_same_format(values[0], values[i]);
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end(),
                     [](const FxValue& a, const FxValue& b) { return a.raw() < b.raw(); });
    return *mid;
}

} // namespace qpwm
