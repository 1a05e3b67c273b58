// Command-line harness: data ingestion, experiment orchestration and JSON/CSV
// result emission for the PWM-matching simulator.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qpwm/io.hpp"
#include "qpwm/matchers.hpp"
#include "qpwm/score_oracles.hpp"
#include "qpwm/synth.hpp"
#include "qpwm/thresholds.hpp"

namespace {

using namespace qpwm;

struct CommonOpts {
    std::vector<std::string> pwm_paths;
    std::string fasta_path;
    std::string config_path;
    std::string output_path;
    std::string alphabet = "ACGT";
};

Config load_config(const CommonOpts& opts) {
    if (!opts.config_path.empty()) return Config::from_file(opts.config_path);
    return Config{};
}

Sequence load_fasta(const CommonOpts& opts, const Config& cfg, const Alphabet& alphabet) {
    if (opts.fasta_path.empty()) throw ParseError("--fasta is required");
    return parse_fasta(opts.fasta_path, alphabet, cfg.get_int("fasta.fold_case", 1) != 0);
}

PwmSet load_pwms(const CommonOpts& opts, const FixedPointFormat& fmt) {
    if (opts.pwm_paths.empty()) throw ParseError("at least one --pwm file is required");
    std::vector<Pwm> pwms;
    pwms.reserve(opts.pwm_paths.size());
    for (const auto& p : opts.pwm_paths) pwms.push_back(parse_pwm_file(p, fmt));
    return pad_to_uniform_length(pwms);
}

std::vector<double> parse_probs(const std::string& csv) {
    std::vector<double> probs;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) probs.push_back(std::stod(tok));
    return probs;
}

void emit(const json& payload, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << payload.dump(2) << "\n";
    } else {
        std::ofstream out(output_path);
        if (!out) throw ParseError("cannot open output file: " + output_path);
        out << payload.dump(2) << "\n";
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open CSV file: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

// Rescale into [0,1] when any entry falls outside; thresholds move with it.
struct PreparedProblem {
    PwmSet pwms;
    FxValue w_th;
    bool rescaled = false;
};

PreparedProblem prepare(PwmSet set, FxValue w_th) {
    const FxValue zero = FxValue::zero(set.format());
    const FxValue one = FxValue::one(set.format());
    bool inside = true;
    for (std::size_t k = 0; k < set.size() && inside; ++k)
        for (std::int64_t pos = 0; pos < set.length() && inside; ++pos)
            for (std::size_t a = 0; a < set.alphabet().size(); ++a) {
                const auto raw = set[k].entry(pos, a).raw();
                if (raw < zero.raw() || raw > one.raw()) {
                    inside = false;
                    break;
                }
            }
    if (inside) return PreparedProblem{std::move(set), w_th, false};
    RescaleResult r = rescale(set, w_th);
    return PreparedProblem{std::move(r.pwms), r.w_th, true};
}

json ledger_stats(const std::vector<MatchReport>& reports) {
    std::vector<std::uint64_t> seq;
    seq.reserve(reports.size());
    for (const auto& r : reports) seq.push_back(r.ledger.seq_queries);
    std::sort(seq.begin(), seq.end());
    const auto quantile = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(seq.size() - 1));
        return seq[idx];
    };
    return json{{"median_seq_queries", quantile(0.5)},
                {"iqr_seq_queries", json::array({quantile(0.25), quantile(0.75)})}};
}

int cmd_score(const CommonOpts& opts, std::int64_t position, bool all_positions) {
    const Config cfg = load_config(opts);
    const FixedPointFormat fmt = cfg.fixed_point_format();
    const PwmSet set = load_pwms(opts, fmt);
    const Sequence seq = load_fasta(opts, cfg, set.alphabet());

    json out = json::array();
    const std::int64_t n_sup = seq.size() - set.length() + 1;
    if (n_sup < 1) throw RangeError("sequence shorter than the PWM");
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (all_positions) {
            for (std::int64_t i = 0; i < n_sup; ++i)
                out.push_back(json{{"k", k},
                                   {"i", i},
                                   {"score", score_segment(set[k], seq, i).to_decimal_string()}});
        } else {
            out.push_back(json{{"k", k},
                               {"i", position},
                               {"score", score_segment(set[k], seq, position).to_decimal_string()}});
        }
    }
    emit(json{{"config_digest", cfg.digest()}, {"scores", out}}, opts.output_path);
    return 0;
}

int cmd_thresholds(const CommonOpts& opts, const std::string& bg_csv, double x_soft,
                   double x_hard, bool exact, std::optional<double> pvalue) {
    const Config cfg = load_config(opts);
    const FixedPointFormat fmt = cfg.fixed_point_format();
    if (opts.pwm_paths.size() != 1)
        throw ParseError("thresholds expects exactly one --pwm file");
    Pwm pwm = parse_pwm_file(opts.pwm_paths[0], fmt);

    // Sigma-level thresholds are defined for rescaled matrices.
    const FxValue zero = FxValue::zero(fmt);
    const FxValue one = FxValue::one(fmt);
    bool inside = true;
    for (std::int64_t pos = 0; pos < pwm.length() && inside; ++pos)
        for (std::size_t a = 0; a < pwm.alphabet().size(); ++a)
            if (pwm.entry(pos, a).raw() < zero.raw() || pwm.entry(pos, a).raw() > one.raw()) {
                inside = false;
                break;
            }
    bool was_rescaled = false;
    if (!inside) {
        RescaleResult r = rescale(PwmSet({pwm}), zero);
        pwm = r.pwms[0];
        was_rescaled = true;
    }

    const BackgroundModel bg = bg_csv.empty()
                                   ? BackgroundModel::uniform(pwm.alphabet().size())
                                   : BackgroundModel(parse_probs(bg_csv));
    const MomentSummary summary = compute_moments(pwm, bg);
    const SoftHardThresholds th = soft_hard_thresholds(summary, x_soft, x_hard);

    json out{{"config_digest", cfg.digest()},
             {"rescaled", was_rescaled},
             {"mu_tilde", summary.mu_tilde},
             {"s_m", summary.s()},
             {"w_soft", th.w_soft},
             {"w_hard", th.w_hard},
             {"pvalue_soft", normal_approx_tail(summary, th.w_soft)},
             {"pvalue_hard", normal_approx_tail(summary, th.w_hard)}};
    if (exact || pvalue) {
        const ScoreDistribution dist = exact_score_distribution(pwm, bg);
        if (exact)
            out["exact_pvalues"] = json{{"soft", dist.tail_at_least(th.w_soft)},
                                        {"hard", dist.tail_at_least(th.w_hard)}};
        if (pvalue)
            out["w_pvalue"] = pvalue_threshold(dist, *pvalue).to_decimal_string();
    }
    emit(out, opts.output_path);
    return 0;
}

int cmd_match_classical(const CommonOpts& opts, const std::string& w_th_text, bool rescale_flag) {
    const Config cfg = load_config(opts);
    const FixedPointFormat fmt = cfg.fixed_point_format();
    PwmSet set = load_pwms(opts, fmt);
    const Sequence seq = load_fasta(opts, cfg, set.alphabet());
    FxValue w_th = FxValue::from_decimal(w_th_text, fmt);
    bool rescaled = false;
    if (rescale_flag) {
        PreparedProblem prep = prepare(std::move(set), w_th);
        set = std::move(prep.pwms);
        w_th = prep.w_th;
        rescaled = prep.rescaled;
    }
    const MatchSet found = classical_match(set, seq, w_th);
    emit(json{{"config_digest", cfg.digest()},
              {"rescaled", rescaled},
              {"w_th", w_th.to_decimal_string()},
              {"matches", to_json(found)}},
         opts.output_path);
    return 0;
}

struct MatchOpts {
    double delta = 0.05;
    bool delta_given = false;
    std::string w_th_text;
    double pvalue = -1.0;
    double x_soft = 0.0;
    double x_hard = 0.0;
    double w_soft = 0.0;
    double w_hard = 0.0;
    std::string bg_csv;
    std::size_t kappa = 4;
    bool kappa_given = false;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1;
    std::string backend = "analytic";
    std::string csv_path;
    double min_success_rate = -1.0; // gate disabled unless set
};

int cmd_match_quantum(const CommonOpts& opts, const MatchOpts& mo, bool qmci) {
    Config cfg = load_config(opts);
    if (mo.trials < 1) throw ParseError("--trials must be at least 1");
    const FixedPointFormat fmt = cfg.fixed_point_format();
    // Config supplies defaults; explicit flags win.
    const std::size_t kappa =
        mo.kappa_given ? mo.kappa : static_cast<std::size_t>(cfg.get_int("kappa", 4));
    const double delta = mo.delta_given ? mo.delta : cfg.get_double("delta", 0.05);

    PwmSet raw_set = load_pwms(opts, fmt);
    const Sequence seq = load_fasta(opts, cfg, raw_set.alphabet());

    ProblemInstance inst{std::move(raw_set), seq, std::nullopt, std::nullopt, kappa, delta};
    bool rescaled = false;
    if (!qmci) {
        const bool explicit_mode = !mo.w_th_text.empty();
        const bool pvalue_mode = mo.pvalue > 0.0;
        if (explicit_mode == pvalue_mode)
            throw ParseError("match-naive needs exactly one of --w-th or --pvalue");
        if (explicit_mode) {
            PreparedProblem prep =
                prepare(std::move(inst.pwms), FxValue::from_decimal(mo.w_th_text, fmt));
            inst.pwms = std::move(prep.pwms);
            inst.w_th = prep.w_th;
            rescaled = prep.rescaled;
        } else {
            if (inst.pwms.size() != 1)
                throw ParseError("--pvalue thresholds support a single PWM");
            PreparedProblem prep = prepare(std::move(inst.pwms), FxValue::zero(fmt));
            inst.pwms = std::move(prep.pwms);
            rescaled = prep.rescaled;
            const BackgroundModel bg =
                mo.bg_csv.empty() ? BackgroundModel::uniform(inst.pwms.alphabet().size())
                                  : BackgroundModel(parse_probs(mo.bg_csv));
            inst.w_th =
                pvalue_threshold(exact_score_distribution(inst.pwms[0], bg), mo.pvalue);
        }
    } else {
        PreparedProblem prep = prepare(std::move(inst.pwms), FxValue::zero(fmt));
        inst.pwms = std::move(prep.pwms);
        rescaled = prep.rescaled;
        SoftHardThresholds th;
        if (mo.w_soft > 0.0 || mo.w_hard > 0.0) {
            if (rescaled)
                throw ParseError("explicit --w-soft/--w-hard need matrices already in [0,1]");
            th.w_soft = mo.w_soft;
            th.w_hard = mo.w_hard;
        } else {
            if (!(mo.x_soft > 0.0 && mo.x_hard > mo.x_soft))
                throw ParseError("match-qmci needs --x-soft/--x-hard or --w-soft/--w-hard");
            if (inst.pwms.size() != 1)
                throw ParseError("sigma-level thresholds support a single PWM; pass explicit "
                                 "--w-soft/--w-hard for K > 1");
            const BackgroundModel bg =
                mo.bg_csv.empty() ? BackgroundModel::uniform(inst.pwms.alphabet().size())
                                  : BackgroundModel(parse_probs(mo.bg_csv));
            th = soft_hard_thresholds(compute_moments(inst.pwms[0], bg), mo.x_soft, mo.x_hard);
        }
        inst.soft_hard = th;
    }

    const Backend backend = mo.backend == "sparse" ? Backend::sparse : Backend::analytic;
    if (qmci && backend == Backend::sparse)
        throw ParseError("the sparse backend applies to match-naive only; the Monte-Carlo "
                         "amplitudes are computed analytically");

    // Ground truth from the exhaustive matcher: exact recovery for the
    // iterative method, the hard/soft sandwich for the Monte-Carlo one.
    MatchSet p_sol, p_hard, p_soft;
    if (qmci) {
        p_hard = classical_match(inst.pwms, inst.seq,
                                 FxValue::from_double(inst.soft_hard->w_hard, fmt));
        p_soft = classical_match(inst.pwms, inst.seq,
                                 FxValue::from_double(inst.soft_hard->w_soft, fmt));
    } else {
        p_sol = classical_match(inst.pwms, inst.seq, *inst.w_th);
    }

    json reports = json::array();
    std::vector<MatchReport> all;
    std::vector<std::vector<std::string>> csv_rows;
    all.reserve(mo.trials);
    std::uint64_t successes = 0;
    std::string trial_error;
    for (std::uint64_t t = 0; t < mo.trials; ++t) {
        Philox4x32 rng(mo.seed, t);
        MatchReport report;
        try {
            report = qmci ? run_qmci_method(inst, rng) : run_naive_iteration(inst, rng, backend);
        } catch (const Error& e) {
            // Flush what completed before surfacing the failure.
            trial_error = "trial " + std::to_string(t) + ": " + e.what();
            break;
        }
        const bool ok = qmci ? (p_hard.subset_of(report.found) && report.found.subset_of(p_soft))
                             : report.found == p_sol;
        successes += ok;
        json jr = to_json(report);
        jr["trial"] = t;
        jr["agrees_with_oracle"] = ok;
        reports.push_back(std::move(jr));
        csv_rows.push_back({std::to_string(t), ok ? "1" : "0",
                            std::to_string(report.ledger.seq_queries),
                            std::to_string(report.ledger.pwm_queries),
                            std::to_string(report.ledger.p_queries),
                            std::to_string(report.ledger.init_units),
                            std::to_string(report.ledger.update_units)});
        all.push_back(std::move(report));
    }
    const double success_rate =
        all.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(all.size());

    if (!mo.csv_path.empty())
        write_csv(mo.csv_path,
                  {"trial", "agrees_with_oracle", "seq_queries", "pwm_queries", "p_queries",
                   "init_units", "update_units"},
                  csv_rows);

    json out{{"config_digest", cfg.digest()},
             {"algorithm", qmci ? "qmci" : "naive"},
             {"rescaled", rescaled},
             {"delta", delta},
             {"kappa", kappa},
             {"seed", mo.seed},
             {"trials", mo.trials},
             {"completed_trials", all.size()},
             {"success_rate", success_rate},
             {"oracle", qmci ? json{{"p_hard", to_json(p_hard)}, {"p_soft", to_json(p_soft)}}
                             : json{{"p_sol", to_json(p_sol)}}},
             {"ledger_stats", all.empty() ? json(nullptr) : ledger_stats(all)},
             {"reports", reports}};
    if (!trial_error.empty()) out["error"] = trial_error;
    emit(out, opts.output_path);
    if (!trial_error.empty()) return 2;

    const double gate = mo.min_success_rate >= 0.0
                            ? mo.min_success_rate
                            : cfg.get_double("gate.min_success_rate", -1.0);
    if (gate >= 0.0 && success_rate < gate) return 1;
    return 0;
}

struct ScalingOpts {
    std::string axis = "n";
    std::string grid = "1024,4096,16384";
    std::string algorithm = "naive";
    std::uint64_t trials = 30;
    std::uint64_t seed = 1;
    double delta = 0.002;
    std::int64_t base_n = 1024;
    std::int64_t base_m = 8;
    std::size_t base_k = 4;
    std::size_t base_nsol = 4;
    std::string csv_path;
};

int cmd_scaling(const CommonOpts& opts, const ScalingOpts& so) {
    const Config cfg = load_config(opts);
    std::vector<double> sizes;
    for (double v : parse_probs(so.grid)) sizes.push_back(v);
    if (sizes.size() < 3) throw ParseError("scaling needs a grid of at least 3 sizes");

    std::vector<std::vector<std::uint64_t>> counts;
    std::vector<std::vector<std::string>> csv_rows;
    Philox4x32 gen_rng(so.seed, 0xFFFF);
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        SynthSpec spec;
        spec.n = so.base_n;
        spec.m = so.base_m;
        spec.K = so.base_k;
        spec.planted = so.base_nsol;
        double dw_scale = 1.0;
        if (so.axis == "n") spec.n = static_cast<std::int64_t>(sizes[si]);
        else if (so.axis == "m") spec.m = static_cast<std::int64_t>(sizes[si]);
        else if (so.axis == "K") spec.K = static_cast<std::size_t>(sizes[si]);
        else if (so.axis == "nsol") spec.planted = static_cast<std::size_t>(sizes[si]);
        else if (so.axis == "dw") dw_scale = sizes[si];
        else throw ParseError("unknown scaling axis: " + so.axis);

        const bool qmci = so.algorithm == "qmci";
        if (qmci) {
            spec.mode = SynthSpec::Mode::soft_hard;
            spec.planted_hard = 1;
            spec.planted_soft = 0;
        }
        const SynthInstance inst = generate_synthetic(spec, gen_rng);
        ProblemInstance prob{inst.pwms, inst.seq, inst.w_th, inst.soft_hard,
                             static_cast<std::size_t>(cfg.get_int("kappa", 4)), so.delta};
        if (qmci && dw_scale != 1.0) {
            SoftHardThresholds th = *prob.soft_hard;
            const double mid = th.mid();
            const double width = th.width();
            th.w_soft = mid - dw_scale * width / 2.0;
            th.w_hard = mid + dw_scale * width / 2.0;
            prob.soft_hard = th;
        }

        std::vector<std::uint64_t> sample;
        sample.reserve(so.trials);
        for (std::uint64_t t = 0; t < so.trials; ++t) {
            Philox4x32 rng(so.seed, (si << 32) | t);
            const MatchReport report =
                qmci ? run_qmci_method(prob, rng) : run_naive_iteration(prob, rng);
            sample.push_back(report.ledger.seq_queries);
            char size_buf[32];
            std::snprintf(size_buf, sizeof size_buf, "%g", sizes[si]);
            csv_rows.push_back({size_buf, std::to_string(t),
                                std::to_string(report.ledger.seq_queries),
                                std::to_string(report.ledger.pwm_queries),
                                std::to_string(report.ledger.p_queries)});
        }
        counts.push_back(std::move(sample));
    }

    Philox4x32 boot_rng(so.seed, 0xB007);
    const ScalingSummary fit = complexity_report(so.axis, sizes, counts, boot_rng);
    if (!so.csv_path.empty())
        write_csv(so.csv_path, {"size", "trial", "seq_queries", "pwm_queries", "p_queries"},
                  csv_rows);
    emit(json{{"config_digest", cfg.digest()},
              {"algorithm", so.algorithm},
              {"trials", so.trials},
              {"fit", to_json(fit)}},
         opts.output_path);
    return 0;
}

int cmd_validate_oracles(const CommonOpts& opts, std::uint64_t seed, std::uint64_t instances) {
    const Config cfg = load_config(opts);
    Philox4x32 rng(seed);
    json checks = json::array();
    bool all_ok = true;
    for (std::uint64_t t = 0; t < instances; ++t) {
        SynthSpec spec;
        spec.n = 32 + static_cast<std::int64_t>(rng.uniform_below(64));
        spec.m = 4 + static_cast<std::int64_t>(rng.uniform_below(5));
        spec.K = 1 + rng.uniform_below(3);
        spec.planted = rng.uniform_below(3);
        const SynthInstance inst = generate_synthetic(spec, rng);
        const Qrams qrams = build_qrams(inst.seq, inst.pwms, 4);

        bool scores_ok = true;
        bool reversible_ok = true;
        const std::int64_t n_sup = position_count(inst.pwms, inst.seq);
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(inst.pwms.size()); ++k)
            for (std::int64_t i = 0; i < n_sup; ++i) {
                const SparseState out = run_naive_score_circuit(qrams.seq, qrams.pwm, k, i, nullptr);
                if (score_register_value(out, inst.pwms.format()).raw() !=
                    score_segment(inst.pwms[static_cast<std::size_t>(k)], inst.seq, i).raw()) {
                    scores_ok = false;
                }
                const SparseState back =
                    apply_naive_score_circuit_inverse(out, qrams.seq, qrams.pwm, nullptr);
                if (!(back.amplitudes() == naive_score_initial_state(k, i).amplitudes()))
                    reversible_ok = false;
            }

        MatchSet p_temp;
        bool mass_ok = true;
        for (int round = 0; round < 3; ++round) {
            const GoodStateAmplitude g =
                good_amplitude_naive(inst.pwms, inst.seq, p_temp, inst.w_th);
            const SparseState state =
                build_flagged_state_naive(inst.pwms, inst.seq, p_temp, inst.w_th);
            if (state.count_where(reg::f_flag, 1) != g.n_remaining) mass_ok = false;
            if (std::abs(state.mass_where(reg::f_flag, 1) - g.a) > 1e-12) mass_ok = false;
            if (g.weights.empty()) break;
            p_temp.insert(g.weights.front().first);
        }

        all_ok = all_ok && scores_ok && reversible_ok && mass_ok;
        checks.push_back(json{{"instance", t},
                              {"n", spec.n},
                              {"m", spec.m},
                              {"K", spec.K},
                              {"scores_bit_exact", scores_ok},
                              {"circuit_reversible", reversible_ok},
                              {"flagged_mass_matches", mass_ok}});
    }
    emit(json{{"config_digest", cfg.digest()}, {"pass", all_ok}, {"checks", checks}},
         opts.output_path);
    return all_ok ? 0 : 1;
}

int cmd_synth(const CommonOpts& opts, const SynthSpec& spec, std::uint64_t seed,
              const std::string& prefix) {
    const Config cfg = load_config(opts);
    Philox4x32 rng(seed);
    const SynthInstance inst = generate_synthetic(spec, rng);

    std::ofstream fasta(prefix + ".fasta");
    if (!fasta) throw ParseError("cannot write " + prefix + ".fasta");
    fasta << ">synthetic n=" << spec.n << " m=" << spec.m << " K=" << spec.K << "\n";
    const std::string text = inst.seq.to_string();
    for (std::size_t ofs = 0; ofs < text.size(); ofs += 70)
        fasta << text.substr(ofs, 70) << "\n";

    for (std::size_t k = 0; k < inst.pwms.size(); ++k)
        write_pwm_file(prefix + "_" + std::to_string(k) + ".pwm", inst.pwms[k]);

    json truth{{"config_digest", cfg.digest()},
               {"seed", seed},
               {"w_th", inst.w_th.to_decimal_string()},
               {"planted", to_json(inst.planted)},
               {"p_sol", to_json(inst.p_sol)}};
    if (inst.soft_hard) {
        truth["w_soft"] = inst.soft_hard->w_soft;
        truth["w_hard"] = inst.soft_hard->w_hard;
        truth["p_hard"] = to_json(inst.p_hard);
        truth["p_soft"] = to_json(inst.p_soft);
    }
    std::ofstream tj(prefix + "_truth.json");
    tj << truth.dump(2) << "\n";
    std::cout << "wrote " << prefix << ".fasta, " << inst.pwms.size() << " PWM file(s), "
              << prefix << "_truth.json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oracle-level simulator and experiment harness for PWM matching"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    app.add_option("--config", common.config_path, "flat key=value config file");
    app.add_option("--out", common.output_path, "write JSON here instead of stdout");

    auto add_inputs = [&](CLI::App* sub, bool need_fasta = true) {
        sub->add_option("--pwm", common.pwm_paths, "PWM file (repeatable)");
        if (need_fasta) sub->add_option("--fasta", common.fasta_path, "FASTA sequence file");
    };

    // score
    auto* score = app.add_subcommand("score", "score segments against the PWMs");
    add_inputs(score);
    std::int64_t position = 0;
    bool all_positions = false;
    score->add_option("--pos", position, "segment position (default 0)");
    score->add_flag("--all", all_positions, "score every position");

    // thresholds
    auto* thresholds = app.add_subcommand("thresholds", "background statistics and levels");
    add_inputs(thresholds, false);
    std::string bg_csv;
    double x_soft = 3.0, x_hard = 4.0;
    bool exact = false;
    std::optional<double> pvalue;
    double pvalue_in = -1.0;
    thresholds->add_option("--bg", bg_csv, "comma-separated background probabilities");
    thresholds->add_option("--x-soft", x_soft, "soft sigma multiplier");
    thresholds->add_option("--x-hard", x_hard, "hard sigma multiplier");
    thresholds->add_flag("--exact", exact, "add exact DP tail probabilities");
    thresholds->add_option("--pvalue", pvalue_in, "also report the exact p-value threshold");

    // match-classical
    auto* classical = app.add_subcommand("match-classical", "exhaustive ground-truth matcher");
    add_inputs(classical);
    std::string w_th_text = "0";
    bool rescale_flag = false;
    classical->add_option("--w-th", w_th_text, "threshold (decimal)")->required();
    classical->add_flag("--rescale", rescale_flag, "rescale matrices into [0,1] first");

    // match-naive / match-qmci
    MatchOpts mo;
    auto* naive = app.add_subcommand("match-naive", "iterative quantum matcher");
    add_inputs(naive);
    naive->add_option("--w-th", mo.w_th_text, "threshold (decimal)");
    naive->add_option("--pvalue", mo.pvalue, "derive the threshold from this exact p-value");
    naive->add_option("--bg", mo.bg_csv, "background probabilities for --pvalue");
    auto* qmci = app.add_subcommand("match-qmci", "Monte-Carlo quantum matcher");
    add_inputs(qmci);
    qmci->add_option("--x-soft", mo.x_soft, "soft sigma multiplier");
    qmci->add_option("--x-hard", mo.x_hard, "hard sigma multiplier");
    qmci->add_option("--w-soft", mo.w_soft, "explicit soft threshold");
    qmci->add_option("--w-hard", mo.w_hard, "explicit hard threshold");
    qmci->add_option("--bg", mo.bg_csv, "background probabilities for sigma levels");
    for (auto* sub : {naive, qmci}) {
        sub->add_option("--delta", mo.delta, "overall failure tolerance");
        sub->add_option("--kappa", mo.kappa, "exclusion-table slots per position");
        sub->add_option("--seed", mo.seed, "master seed");
        sub->add_option("--trials", mo.trials, "independent trials");
        sub->add_option("--backend", mo.backend, "analytic | sparse");
        sub->add_option("--csv", mo.csv_path, "write per-trial ledger rows as CSV");
        sub->add_option("--min-success-rate", mo.min_success_rate,
                        "exit nonzero when the oracle-agreement rate falls below this");
    }

    // scaling
    ScalingOpts so;
    auto* scaling = app.add_subcommand("scaling", "query-count scaling sweep");
    scaling->add_option("--axis", so.axis, "n | m | K | nsol | dw");
    scaling->add_option("--grid", so.grid, "comma-separated sizes");
    scaling->add_option("--algorithm", so.algorithm, "naive | qmci");
    scaling->add_option("--trials", so.trials, "trials per size");
    scaling->add_option("--seed", so.seed, "master seed");
    scaling->add_option("--delta", so.delta, "per-run failure tolerance");
    scaling->add_option("--base-n", so.base_n, "fixed n when not swept");
    scaling->add_option("--base-m", so.base_m, "fixed m when not swept");
    scaling->add_option("--base-k", so.base_k, "fixed K when not swept");
    scaling->add_option("--base-nsol", so.base_nsol, "fixed planted count when not swept");
    scaling->add_option("--csv", so.csv_path, "write per-trial ledger rows as CSV");

    // validate-oracles
    auto* validate = app.add_subcommand("validate-oracles",
                                        "sparse-vs-analytic equivalence suite");
    std::uint64_t v_seed = 1, v_instances = 10;
    validate->add_option("--seed", v_seed, "master seed");
    validate->add_option("--instances", v_instances, "instances to check");

    // synth
    SynthSpec synth_spec;
    std::uint64_t s_seed = 1;
    std::string s_prefix = "synthetic";
    std::string s_mode = "naive";
    auto* synth = app.add_subcommand("synth", "generate a synthetic instance");
    synth->add_option("--n", synth_spec.n, "sequence length");
    synth->add_option("--m", synth_spec.m, "PWM length");
    synth->add_option("--K", synth_spec.K, "number of PWMs");
    synth->add_option("--alphabet-size", synth_spec.alphabet_size, "alphabet size");
    synth->add_option("--planted", synth_spec.planted, "planted matches");
    synth->add_option("--planted-hard", synth_spec.planted_hard, "planted hard matches");
    synth->add_option("--planted-soft", synth_spec.planted_soft, "planted in-band matches");
    synth->add_option("--mode", s_mode, "naive | qmci");
    synth->add_option("--seed", s_seed, "master seed");
    synth->add_option("--out-prefix", s_prefix, "output file prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) return cmd_score(common, position, all_positions);
        if (thresholds->parsed()) {
            if (pvalue_in > 0.0) pvalue = pvalue_in;
            return cmd_thresholds(common, bg_csv, x_soft, x_hard, exact, pvalue);
        }
        if (classical->parsed()) return cmd_match_classical(common, w_th_text, rescale_flag);
        if (naive->parsed() || qmci->parsed()) {
            CLI::App* sub = naive->parsed() ? naive : qmci;
            mo.delta_given = sub->count("--delta") > 0;
            mo.kappa_given = sub->count("--kappa") > 0;
            return cmd_match_quantum(common, mo, qmci->parsed());
        }
        if (scaling->parsed()) return cmd_scaling(common, so);
        if (validate->parsed()) return cmd_validate_oracles(common, v_seed, v_instances);
        if (synth->parsed()) {
            if (s_mode == "qmci") synth_spec.mode = SynthSpec::Mode::soft_hard;
            return cmd_synth(common, synth_spec, s_seed, s_prefix);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
