#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qpwm/io.hpp"
#include "qpwm/pwm.hpp"
#include "qpwm/rng.hpp"

using namespace qpwm;

namespace {

Pwm demo_pwm() { return parse_pwm_file(QPWM_DATA_DIR "/demo_dna_m8.pwm"); }

Sequence demo_seq() { return Sequence::from_string(Alphabet::dna(), "TACATGCA"); }

// Two-column {A,C} toy: position 0 scores A, position 1 scores C.
Pwm toy_ac_pwm(const FixedPointFormat& fmt = FixedPointFormat{}) {
    const Alphabet ab("AC");
    const FxValue zero = FxValue::zero(fmt);
    const FxValue one = FxValue::one(fmt);
    return Pwm(ab, {{one, zero}, {zero, one}});
}

Pwm random_pwm(const Alphabet& ab, std::int64_t m, Philox4x32& rng,
               const FixedPointFormat& fmt = FixedPointFormat{}) {
    std::vector<std::vector<FxValue>> rows;
    for (std::int64_t pos = 0; pos < m; ++pos) {
        std::vector<FxValue> row;
        for (std::size_t a = 0; a < ab.size(); ++a)
            row.push_back(FxValue::from_double(4.0 * rng.next_double() - 2.0, fmt));
        rows.push_back(std::move(row));
    }
    return Pwm(ab, std::move(rows));
}

Sequence random_seq(const Alphabet& ab, std::int64_t n, Philox4x32& rng) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng.uniform_below(ab.size()));
    return Sequence(ab, std::move(labels));
}

} // namespace

TEST_CASE("alphabet labels round-trip") {
    const Alphabet ab = Alphabet::dna();
    REQUIRE(ab.size() == 4);
    for (std::size_t l = 0; l < ab.size(); ++l)
        REQUIRE(ab.label(ab.symbol(l)) == static_cast<int>(l));
    REQUIRE_THROWS_AS(Alphabet(""), DegenerateInputError);
    REQUIRE_THROWS_AS(Alphabet("AGGA"), DegenerateInputError);
    REQUIRE_THROWS_AS(ab.label('X'), ParseError);
}

TEST_CASE("sequence invariants") {
    REQUIRE_THROWS_AS(Sequence::from_string(Alphabet::dna(), "A"), DegenerateInputError);
    REQUIRE_THROWS_AS(Sequence(Alphabet("AC"), {0, 2}), RangeError);
    const Sequence s = demo_seq();
    REQUIRE(s.size() == 8);
    REQUIRE(s.to_string() == "TACATGCA");
}

TEST_CASE("demo matrix scores the demo segment to 3.93 exactly") {
    const Pwm pwm = demo_pwm();
    const Sequence seq = demo_seq();
    const FxValue score = score_segment(pwm, seq, 0);
    REQUIRE(score == FxValue::from_decimal("3.93", pwm.format()));
    REQUIRE(std::abs(score.to_double() - 3.93) < 8.0 * std::ldexp(1.0, -32));
    REQUIRE_THROWS_AS(score_segment(pwm, seq, 1), RangeError);
    REQUIRE_THROWS_AS(score_segment(pwm, seq, -1), RangeError);
}

TEST_CASE("all-zero PWM scores zero") {
    const FixedPointFormat fmt{};
    const Alphabet ab = Alphabet::dna();
    const std::vector<FxValue> zero_row(4, FxValue::zero(fmt));
    const Pwm pwm(ab, std::vector<std::vector<FxValue>>(8, zero_row));
    REQUIRE(score_segment(pwm, demo_seq(), 0).raw() == 0);
}

TEST_CASE("toy AC instance scores by hand enumeration") {
    const Pwm pwm = toy_ac_pwm();
    const Sequence seq = Sequence::from_string(Alphabet("AC"), "ACAC");
    const FxValue two = fx_add(FxValue::one(pwm.format()), FxValue::one(pwm.format()));
    REQUIRE(score_segment(pwm, seq, 0) == two);
    REQUIRE(score_segment(pwm, seq, 1).raw() == 0);
    REQUIRE(score_segment(pwm, seq, 2) == two);
}

TEST_CASE("score equals an independent per-position accumulation") {
    Philox4x32 rng(2024);
    const Alphabet ab = Alphabet::dna();
    for (int t = 0; t < 20; ++t) {
        const std::int64_t m = 2 + static_cast<std::int64_t>(rng.uniform_below(10));
        const Pwm pwm = random_pwm(ab, m, rng);
        const Sequence seq = random_seq(ab, m + 6, rng);
        for (std::int64_t i = 0; i + m <= seq.size(); ++i) {
            std::int64_t raw = 0; // raw-integer accumulation, exact
            for (std::int64_t j = 0; j < m; ++j) raw += pwm.entry(j, seq.label(i + j)).raw();
            REQUIRE(score_segment(pwm, seq, i).raw() == raw);
        }
    }
}

TEST_CASE("rescale maps the demo score into [0,1] coordinates") {
    const Pwm pwm = demo_pwm();
    const PwmSet set({pwm});
    const FxValue w_th = FxValue::from_decimal("3.93", pwm.format());
    const RescaleResult r = rescale(set, w_th);

    REQUIRE(r.m_min == FxValue::from_decimal("-1.31", pwm.format()));
    REQUIRE(r.m_max == FxValue::from_decimal("1.37", pwm.format()));
    const FxValue zero = FxValue::zero(pwm.format());
    const FxValue one = FxValue::one(pwm.format());
    for (std::int64_t pos = 0; pos < r.pwms.length(); ++pos)
        for (std::size_t a = 0; a < 4; ++a) {
            const std::int64_t raw = r.pwms[0].entry(pos, a).raw();
            REQUIRE(raw >= zero.raw());
            REQUIRE(raw <= one.raw());
        }

    const FxValue rescaled = score_segment(r.pwms[0], demo_seq(), 0);
    const double expected = (3.93 + 8.0 * 1.31) / 2.68;
    REQUIRE(std::abs(rescaled.to_double() - expected) < 1e-6);
    REQUIRE(std::abs(r.w_th.to_double() - expected) < 1e-6);
    // The demo segment is the boundary match and survives the rescale.
    REQUIRE(fx_compare(rescaled, r.w_th) == 1);
}

TEST_CASE("identity rescale leaves a [0,1] matrix untouched") {
    const Pwm pwm = toy_ac_pwm();
    const FxValue w_th = FxValue::from_double(2.0, pwm.format());
    const RescaleResult r = rescale(PwmSet({pwm}), w_th);
    for (std::int64_t pos = 0; pos < 2; ++pos)
        for (std::size_t a = 0; a < 2; ++a)
            REQUIRE(r.pwms[0].entry(pos, a).raw() == pwm.entry(pos, a).raw());
    REQUIRE(r.w_th.raw() == w_th.raw());
}

TEST_CASE("constant matrix set cannot be rescaled") {
    const FixedPointFormat fmt{};
    const std::vector<FxValue> row(2, FxValue::one(fmt));
    const Pwm constant(Alphabet("AC"), {row, row});
    REQUIRE_THROWS_AS(rescale(PwmSet({constant}), FxValue::zero(fmt)), DegenerateInputError);
}

TEST_CASE("rescaling keeps the match set, toy instance included") {
    const Pwm pwm = toy_ac_pwm();
    const Sequence seq = Sequence::from_string(Alphabet("AC"), "ACAC");
    const FxValue w_th = FxValue::from_double(2.0, pwm.format());
    const MatchSet before = classical_match(PwmSet({pwm}), seq, w_th);
    REQUIRE(before.size() == 2);
    REQUIRE(before.contains({0, 0}));
    REQUIRE(before.contains({0, 2}));
    const RescaleResult r = rescale(PwmSet({pwm}), w_th);
    REQUIRE(classical_match(r.pwms, seq, r.w_th) == before);
}

TEST_CASE("rescaling match invariance on random instances") {
    Philox4x32 rng(88);
    const Alphabet ab = Alphabet::dna();
    for (int t = 0; t < 40; ++t) {
        const std::int64_t m = 2 + static_cast<std::int64_t>(rng.uniform_below(8));
        const std::size_t K = 1 + rng.uniform_below(3);
        std::vector<Pwm> pwms;
        for (std::size_t k = 0; k < K; ++k) pwms.push_back(random_pwm(ab, m, rng));
        const PwmSet set(std::move(pwms));
        const Sequence seq = random_seq(ab, m + 20, rng);
        const double lo = -2.0 * static_cast<double>(m);
        const double w = lo + 4.0 * static_cast<double>(m) * rng.next_double();
        const FxValue w_th = FxValue::from_double(w, set.format());
        const RescaleResult r = rescale(set, w_th);
        REQUIRE(classical_match(r.pwms, seq, r.w_th) == classical_match(set, seq, w_th));
    }
}

TEST_CASE("padding appends zero rows and preserves window scores") {
    const FixedPointFormat fmt{};
    const Alphabet ab("AC");
    Philox4x32 rng(555);
    const Pwm short_pwm = random_pwm(ab, 2, rng, fmt);
    const Pwm long_pwm = random_pwm(ab, 3, rng, fmt);
    const PwmSet padded = pad_to_uniform_length({short_pwm, long_pwm});
    REQUIRE(padded.length() == 3);
    for (std::size_t a = 0; a < 2; ++a) {
        REQUIRE(padded[0].entry(2, a).raw() == 0);
        REQUIRE(padded[1].entry(2, a).raw() == long_pwm.entry(2, a).raw());
    }

    const Sequence seq = random_seq(ab, 10, rng);
    for (std::int64_t i = 0; i + 3 <= seq.size(); ++i)
        REQUIRE(score_segment(padded[0], seq, i).raw() == score_segment(short_pwm, seq, i).raw());

    const PwmSet same = pad_to_uniform_length({long_pwm, long_pwm});
    REQUIRE(same.length() == 3);
    REQUIRE_THROWS_AS(pad_to_uniform_length({}), DegenerateInputError);
}

TEST_CASE("classical match on the demo instance includes the boundary") {
    const Pwm pwm = demo_pwm();
    const PwmSet set({pwm});
    const Sequence seq = demo_seq();
    REQUIRE_THROWS_AS(position_count(set, seq), DegenerateInputError);

    // n must exceed m, so extend the demo sequence by one symbol.
    const Sequence longer = Sequence::from_string(Alphabet::dna(), "TACATGCAA");
    const FxValue w_th = FxValue::from_decimal("3.93", pwm.format());
    const MatchSet found = classical_match(set, longer, w_th);
    REQUIRE(found.contains({0, 0}));
    REQUIRE(found.size() == 1);

    // Unattainable threshold: above m * max entry.
    const FxValue unattainable = FxValue::from_double(8.0 * 1.37 + 1.0, pwm.format());
    REQUIRE(classical_match(set, longer, unattainable).empty());
}

TEST_CASE("raising the threshold never adds matches") {
    Philox4x32 rng(31);
    const Alphabet ab = Alphabet::dna();
    const Pwm pwm = random_pwm(ab, 4, rng);
    const PwmSet set({pwm});
    const Sequence seq = random_seq(ab, 40, rng);
    FxValue lower = FxValue::from_double(-6.0, pwm.format());
    for (int step = 0; step < 12; ++step) {
        const FxValue higher = fx_add(lower, FxValue::from_double(1.0, pwm.format()));
        const MatchSet low_set = classical_match(set, seq, lower);
        const MatchSet high_set = classical_match(set, seq, higher);
        REQUIRE(high_set.subset_of(low_set));
        lower = higher;
    }
}

TEST_CASE("duplicate PWMs are allowed and matched under distinct indices") {
    const Pwm pwm = toy_ac_pwm();
    const PwmSet set({pwm, pwm});
    const Sequence seq = Sequence::from_string(Alphabet("AC"), "ACAC");
    const MatchSet found = classical_match(set, seq, FxValue::from_double(2.0, pwm.format()));
    REQUIRE(found.size() == 4);
    REQUIRE(found.contains({1, 0}));
    REQUIRE(found.contains({1, 2}));
}
