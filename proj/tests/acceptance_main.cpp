// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qpwm/io.hpp"
#include "qpwm/matchers.hpp"
#include "qpwm/score_oracles.hpp"
#include "qpwm/synth.hpp"

using namespace qpwm;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("[%s] criterion %2d (%7.2fs): %s%s%s\n", ok ? "PASS" : "FAIL", number, elapsed,
                name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
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

Pwm binary_pwm(std::int64_t m, const FixedPointFormat& fmt = FixedPointFormat{}) {
    const std::vector<FxValue> row{FxValue::zero(fmt), FxValue::one(fmt)};
    Pwm p(Alphabet("AB"), std::vector<std::vector<FxValue>>(static_cast<std::size_t>(m), row));
    p.mark_rescaled(FxValue::zero(fmt), FxValue::one(fmt));
    return p;
}

bool criterion_1(std::string& detail) {
    const Pwm pwm = parse_pwm_file(QPWM_DATA_DIR "/demo_dna_m8.pwm");
    const Sequence seq = Sequence::from_string(Alphabet::dna(), "TACATGCA");
    if (pwm.format().frac_bits < 7) {
        detail = "format has fewer than 7 fractional bits";
        return false;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const FxValue score = score_segment(pwm, seq, 0);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const FxValue expected = FxValue::from_decimal("3.93", pwm.format());
    if (!(score == expected)) {
        detail = "score raw " + std::to_string(score.raw()) + " != " +
                 std::to_string(expected.raw());
        return false;
    }
    if (ms >= 1.0) {
        detail = "scoring took " + std::to_string(ms) + " ms";
        return false;
    }
    detail = "score " + score.to_decimal_string().substr(0, 12) + "... == fx(3.93), " +
             std::to_string(ms) + " ms";
    return true;
}

bool criterion_2(std::string& detail) {
    Philox4x32 rng(20240202);
    const Alphabet ab = Alphabet::dna();
    for (int t = 0; t < 100; ++t) {
        const std::int64_t m = 2 + static_cast<std::int64_t>(rng.uniform_below(15));
        const std::size_t K = 1 + rng.uniform_below(4);
        const std::int64_t n = m + 1 + static_cast<std::int64_t>(
                                            rng.uniform_below(static_cast<std::uint64_t>(512 - m)));
        std::vector<Pwm> pwms;
        for (std::size_t k = 0; k < K; ++k) pwms.push_back(random_pwm(ab, m, rng));
        const PwmSet set(std::move(pwms));
        const Sequence seq = random_seq(ab, n, rng);
        const double lo = -2.0 * static_cast<double>(m);
        const double w = lo + 4.0 * static_cast<double>(m) * rng.next_double();
        const FxValue w_th = FxValue::from_double(w, set.format());
        const RescaleResult r = rescale(set, w_th);
        if (!(classical_match(r.pwms, seq, r.w_th) == classical_match(set, seq, w_th))) {
            detail = "mismatch at instance " + std::to_string(t);
            return false;
        }
    }
    detail = "100 instances invariant";
    return true;
}

bool criterion_3(std::string& detail) {
    Philox4x32 rng(333);
    std::uint64_t pairs_checked = 0;
    for (int t = 0; t < 10; ++t) {
        SynthSpec spec;
        spec.n = 64 + static_cast<std::int64_t>(rng.uniform_below(192));
        spec.m = 4 + static_cast<std::int64_t>(rng.uniform_below(8));
        spec.K = 1 + rng.uniform_below(3);
        spec.planted = rng.uniform_below(4);
        const SynthInstance inst = generate_synthetic(spec, rng);
        const std::int64_t n_sup = position_count(inst.pwms, inst.seq);
        if (static_cast<std::size_t>(n_sup) * inst.pwms.size() > (std::size_t{1} << 20)) continue;

        const Qrams qrams = build_qrams(inst.seq, inst.pwms, 4);
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(inst.pwms.size()); ++k)
            for (std::int64_t i = 0; i < n_sup; ++i) {
                const SparseState out =
                    run_naive_score_circuit(qrams.seq, qrams.pwm, k, i, nullptr);
                if (score_register_value(out, inst.pwms.format()).raw() !=
                    score_segment(inst.pwms[static_cast<std::size_t>(k)], inst.seq, i).raw()) {
                    detail = "register-seven mismatch";
                    return false;
                }
                ++pairs_checked;
            }

        MatchSet p_temp;
        for (int round = 0; round < 4; ++round) {
            const GoodStateAmplitude g =
                good_amplitude_naive(inst.pwms, inst.seq, p_temp, inst.w_th);
            const SparseState state =
                build_flagged_state_naive(inst.pwms, inst.seq, p_temp, inst.w_th);
            if (state.count_where(reg::f_flag, 1) != g.n_remaining) {
                detail = "flagged count mismatch";
                return false;
            }
            if (std::abs(state.mass_where(reg::f_flag, 1) - g.a) > 1e-12) {
                detail = "flagged mass mismatch";
                return false;
            }
            if (g.weights.empty()) break;
            p_temp.insert(g.weights.front().first);
        }
    }
    detail = std::to_string(pairs_checked) + " (k,i) pairs bit-exact, flagged masses equal";
    return true;
}

bool criterion_4(std::string& detail) {
    const double gamma = 0.01;
    const int trials = 1000;
    Philox4x32 rng(444);
    const auto amplitude = [](double a) { return [a] { return a; }; };
    const auto sampler = [](Philox4x32&) { return IndexPair{0, 0}; };

    for (const double delta : {0.2, 0.05}) {
        for (const double a : {gamma, 2 * gamma, 4 * gamma, 0.5, 1.0}) {
            int succ = 0;
            for (int t = 0; t < trials; ++t)
                succ += qsearch(amplitude(a), sampler, QaaParams{gamma, delta}, rng).success;
            const double sigma = std::sqrt(delta * (1 - delta) / trials);
            const double rate = static_cast<double>(succ) / trials;
            if (rate < 1.0 - delta - 3.0 * sigma) {
                detail = "success rate " + std::to_string(rate) + " at a=" + std::to_string(a) +
                         " delta=" + std::to_string(delta);
                return false;
            }
        }
    }
    for (int t = 0; t < trials; ++t)
        if (qsearch(amplitude(0.0), sampler, QaaParams{gamma, 0.05}, rng).success) {
            detail = "zero amplitude produced a success";
            return false;
        }
    detail = "grid rates within 3-sigma of 1-delta; a=0 failed 1000/1000";
    return true;
}

bool criterion_5(std::string& detail) {
    for (const double eps : {0.05, 0.1}) {
        for (const double delta : {0.2, 0.05, 0.01}) {
            const QmciParams params = make_qmci_params(eps, delta);
            for (int g = 0; g <= 10; ++g) {
                const double mu = static_cast<double>(g) / 10.0;
                const OutcomeDistribution d = qmci_estimate_distribution(mu, params);
                if (d.mass_within(mu, eps) < 1.0 - delta) {
                    detail = "median mass below 1-delta at mu=" + std::to_string(mu);
                    return false;
                }
            }
        }
    }
    const double floor = 8.0 / (std::numbers::pi * std::numbers::pi);
    for (std::uint64_t M = 8; M <= 1024; M *= 2) {
        for (int g = 0; g <= 20; ++g) {
            const double a = static_cast<double>(g) / 20.0;
            const OutcomeDistribution d = qae_distribution(a, M);
            const double Md = static_cast<double>(M);
            const double bound = 2.0 * std::numbers::pi * std::sqrt(a * (1 - a)) / Md +
                                 std::numbers::pi * std::numbers::pi / (Md * Md);
            if (d.mass_within(a, bound) < floor - 1e-9) {
                detail = "per-run bound mass below 8/pi^2 at a=" + std::to_string(a) +
                         " M=" + std::to_string(M);
                return false;
            }
            if (std::abs(d.total_mass() - 1.0) > 1e-9) {
                detail = "outcome law not normalized";
                return false;
            }
        }
    }
    detail = "median law >= 1-delta on the grid; per-run bound mass >= 8/pi^2";
    return true;
}

bool criterion_6(std::string& detail) {
    Philox4x32 gen_rng(666);
    int trials_total = 0;
    int exact = 0;
    for (int inst_idx = 0; inst_idx < 20; ++inst_idx) {
        SynthSpec spec;
        spec.n = 256 << gen_rng.uniform_below(5); // 256 .. 4096
        spec.m = 8 + static_cast<std::int64_t>(gen_rng.uniform_below(9));
        spec.K = 1 + gen_rng.uniform_below(4);
        spec.planted = 1 + gen_rng.uniform_below(8);
        const SynthInstance inst = generate_synthetic(spec, gen_rng);
        const ProblemInstance prob{inst.pwms, inst.seq, inst.w_th, std::nullopt, 8, 0.05};
        for (int trial = 0; trial < 12; ++trial) {
            Philox4x32 rng(9000 + inst_idx, static_cast<std::uint64_t>(trial));
            const MatchReport report = run_naive_iteration(prob, rng);
            if (!report.found.subset_of(inst.p_sol)) {
                detail = "found a pair outside the solution set";
                return false;
            }
            exact += report.found == inst.p_sol;
            ++trials_total;
        }
    }
    const double rate = static_cast<double>(exact) / trials_total;
    detail = std::to_string(exact) + "/" + std::to_string(trials_total) + " exact";
    if (trials_total < 200) {
        detail += " (too few trials)";
        return false;
    }
    return rate >= 0.95;
}

bool criterion_7(std::string& detail) {
    const double delta = 0.002;
    const auto run_median_queries = [&](std::int64_t n, std::int64_t m, std::uint64_t seed_base) {
        Philox4x32 gen_rng(seed_base);
        SynthSpec spec;
        spec.n = n;
        spec.m = m;
        spec.K = 4;
        spec.planted = 4;
        const SynthInstance inst = generate_synthetic(spec, gen_rng);
        const ProblemInstance prob{inst.pwms, inst.seq, inst.w_th, std::nullopt, 8, delta};
        std::vector<std::uint64_t> qs;
        for (int trial = 0; trial < 50; ++trial) {
            Philox4x32 rng(seed_base, static_cast<std::uint64_t>(trial));
            qs.push_back(run_naive_iteration(prob, rng).ledger.seq_queries);
        }
        std::sort(qs.begin(), qs.end());
        return qs[qs.size() / 2];
    };

    std::vector<double> n_sizes{1024.0, 4096.0, 16384.0};
    std::vector<std::vector<std::uint64_t>> n_counts;
    for (double n : n_sizes)
        n_counts.push_back({run_median_queries(static_cast<std::int64_t>(n), 8,
                                               70000 + static_cast<std::uint64_t>(n))});
    Philox4x32 boot(7177);
    double n_slope = 0.0;
    {
        std::vector<double> meds;
        for (const auto& c : n_counts) meds.push_back(static_cast<double>(c[0]));
        n_slope = qpwm::detail::loglog_slope(n_sizes, meds);
    }

    std::vector<double> m_sizes{8.0, 16.0, 32.0};
    std::vector<double> m_medians;
    for (double m : m_sizes)
        m_medians.push_back(static_cast<double>(run_median_queries(
            4096, static_cast<std::int64_t>(m), 80000 + static_cast<std::uint64_t>(m))));
    const double m_slope = qpwm::detail::loglog_slope(m_sizes, m_medians);

    detail = "slope vs n = " + std::to_string(n_slope) + ", vs m = " + std::to_string(m_slope);
    return n_slope >= 0.4 && n_slope <= 0.6 && m_slope >= 0.85 && m_slope <= 1.15;
}

bool criterion_8(std::string& detail) {
    Philox4x32 gen_rng(888);
    int trials_total = 0;
    int sandwich_ok = 0;
    for (int inst_idx = 0; inst_idx < 20; ++inst_idx) {
        SynthSpec spec;
        spec.mode = SynthSpec::Mode::soft_hard;
        spec.n = 128 + static_cast<std::int64_t>(gen_rng.uniform_below(128));
        spec.m = 8 + static_cast<std::int64_t>(gen_rng.uniform_below(5));
        spec.K = 1 + gen_rng.uniform_below(2);
        spec.planted_hard = 1 + gen_rng.uniform_below(2);
        spec.planted_soft = gen_rng.uniform_below(2);
        const SynthInstance inst = generate_synthetic(spec, gen_rng);
        const ProblemInstance prob{inst.pwms, inst.seq, std::nullopt, inst.soft_hard, 8, 0.1};
        for (int trial = 0; trial < 11; ++trial) {
            Philox4x32 rng(11000 + inst_idx, static_cast<std::uint64_t>(trial));
            const MatchReport report = run_qmci_method(prob, rng);
            if (!report.found.subset_of(inst.p_soft)) {
                detail = "a pair below w_soft was reported";
                return false;
            }
            sandwich_ok += inst.p_hard.subset_of(report.found);
            ++trials_total;
        }
    }
    const double rate = static_cast<double>(sandwich_ok) / trials_total;
    detail = std::to_string(sandwich_ok) + "/" + std::to_string(trials_total) +
             " contained P_hard; none left P_soft";
    if (trials_total < 200) {
        detail += " (too few trials)";
        return false;
    }
    return rate >= 0.90;
}

bool criterion_9(std::string& detail) {
    Philox4x32 gen_rng(999);
    SynthSpec spec;
    spec.mode = SynthSpec::Mode::soft_hard;
    spec.n = 256;
    spec.m = 12;
    spec.K = 1;
    spec.planted_hard = 1;
    spec.planted_soft = 0;
    const SynthInstance inst = generate_synthetic(spec, gen_rng);

    const auto median_for_width = [&](double scale, std::uint64_t seed) {
        SoftHardThresholds th = *inst.soft_hard;
        const double mid = th.mid();
        const double width = th.width();
        th.w_soft = mid - scale * width / 2.0;
        th.w_hard = mid + scale * width / 2.0;
        const ProblemInstance prob{inst.pwms, inst.seq, std::nullopt, th, 8, 0.1};
        std::vector<std::uint64_t> qs;
        for (int trial = 0; trial < 31; ++trial) {
            Philox4x32 rng(seed, static_cast<std::uint64_t>(trial));
            qs.push_back(run_qmci_method(prob, rng).ledger.seq_queries);
        }
        std::sort(qs.begin(), qs.end());
        return static_cast<double>(qs[qs.size() / 2]);
    };

    const double narrow = median_for_width(0.5, 31001);
    const double wide = median_for_width(1.0, 31002);
    const double ratio = wide / narrow;
    detail = "doubling the gap changed median queries by x" + std::to_string(ratio);
    return ratio >= 0.375 && ratio <= 0.625;
}

bool criterion_10(std::string& detail) {
    MomentSummary probe;
    probe.mu = {0.0};
    probe.var = {1.0};
    probe.mu_tilde = 0.0;
    probe.s2 = 1.0;
    const double p3 = normal_approx_tail(probe, 3.0);
    const double p4 = normal_approx_tail(probe, 4.0);
    // 3 significant figures
    if (std::abs(p3 - 1.35e-3) > 0.005e-3) {
        detail = "tail at 3 sigma = " + std::to_string(p3);
        return false;
    }
    if (std::abs(p4 - 3.17e-5) > 0.005e-5) {
        detail = "tail at 4 sigma = " + std::to_string(p4);
        return false;
    }

    const BackgroundModel bg({0.47, 0.53});
    for (const double x : {2.0, 3.0}) {
        double prev = 1.0;
        for (const std::int64_t m : {8, 16, 32}) {
            const Pwm pwm = binary_pwm(m);
            const ScoreDistribution dist = exact_score_distribution(pwm, bg);
            const MomentSummary summary = compute_moments(pwm, bg);
            const double w = summary.mu_tilde + x * summary.s();
            const double gap = std::abs(dist.tail_at_least(w) - normal_approx_tail(summary, w));
            if (gap >= prev) {
                detail = "discrepancy not shrinking at x=" + std::to_string(x) +
                         " m=" + std::to_string(m);
                return false;
            }
            prev = gap;
        }
    }
    detail = "tails 1.35e-3 / 3.17e-5; binary-column discrepancy shrinks over m";
    return true;
}

bool criterion_11(std::string& detail) {
    Philox4x32 rng(1111);
    for (int t = 0; t < 10; ++t) {
        const std::int64_t n = 16 + static_cast<std::int64_t>(rng.uniform_below(500));
        const std::int64_t m = 2 + static_cast<std::int64_t>(rng.uniform_below(12));
        const std::size_t K = 1 + rng.uniform_below(5);
        const std::size_t A = 2 + rng.uniform_below(6);
        const std::size_t kappa = 1 + rng.uniform_below(6);
        const Alphabet ab(qpwm::detail::synth_alphabet_symbols(A));
        std::vector<Pwm> pwms;
        for (std::size_t k = 0; k < K; ++k) pwms.push_back(random_pwm(ab, m, rng));
        const PwmSet set(std::move(pwms));
        const Sequence seq = random_seq(ab, n, rng);
        const Qrams q = build_qrams(seq, set, kappa);
        const std::uint64_t expected = static_cast<std::uint64_t>(n) +
                                       static_cast<std::uint64_t>(m) * A * K +
                                       kappa * static_cast<std::uint64_t>(n);
        if (q.ledger.init_units != expected) {
            detail = "init cost mismatch";
            return false;
        }
    }

    QueryLedger ledger;
    ExclusionTable table(16, 3);
    exclusion_update(table, {0, 7}, ledger);
    exclusion_update(table, {1, 7}, ledger);
    exclusion_update(table, {2, 7}, ledger);
    try {
        exclusion_update(table, {3, 7}, ledger);
        detail = "kappa+1 insert did not raise";
        return false;
    } catch (const CapacityError&) {
    }
    detail = "init cost exact on 10 shapes; capacity error at kappa+1";
    return true;
}

} // namespace

int main() {
    std::printf("acceptance suite: PWM-matching simulator\n");
    criterion(1, "demo-matrix segment scores 3.93 exactly", 5.0, criterion_1);
    criterion(2, "rescaling keeps the match set on 100 random instances", 5.0, criterion_2);
    criterion(3, "sparse circuit equals the analytic oracle backend", 30.0, criterion_3);
    criterion(4, "amplitude-amplification success contract", 60.0, criterion_4);
    criterion(5, "mean-estimation outcome laws concentrate as specified", 60.0, criterion_5);
    criterion(6, "iterative matcher recovers the exact solution set", 600.0, criterion_6);
    criterion(7, "iterative matcher query scaling in n and m", 900.0, criterion_7);
    criterion(8, "Monte-Carlo matcher respects the hard/soft sandwich", 900.0, criterion_8);
    criterion(9, "doubling the threshold gap halves the query count", 600.0, criterion_9);
    criterion(10, "background-model tail numerics and normal convergence", 60.0, criterion_10);
    criterion(11, "QRAM cost model and exclusion capacity", 1.0, criterion_11);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
