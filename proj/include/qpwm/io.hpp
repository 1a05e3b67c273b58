#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qpwm/errors.hpp"
#include "qpwm/matchers.hpp"
#include "qpwm/pwm.hpp"
#include "qpwm/qram.hpp"
#include "qpwm/thresholds.hpp"

namespace qpwm {

using json = nlohmann::ordered_json;

/// FASTA reader: header lines are skipped, record bodies are concatenated.
/// Unknown symbols report the offending line and column.
inline Sequence parse_fasta(const std::filesystem::path& path, const Alphabet& alphabet,
                            bool fold_case = true) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open FASTA file: " + path.string());
    std::vector<std::uint8_t> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '>') continue;
        for (std::size_t col = 0; col < line.size(); ++col) {
            char c = line[col];
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            if (fold_case) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (!alphabet.has(c))
                throw ParseError("unknown symbol '" + std::string(1, c) + "' at " +
                                 path.filename().string() + ":" + std::to_string(line_no) + ":" +
                                 std::to_string(col + 1));
            labels.push_back(static_cast<std::uint8_t>(alphabet.label(c)));
        }
    }
    if (labels.empty()) throw ParseError("FASTA file has an empty body: " + path.string());
    return Sequence(alphabet, std::move(labels));
}

/// PWM text format: `#alphabet <symbols>`, then one `<symbol> <v_1> ... <v_m>`
/// line per symbol, values in column order.
inline Pwm parse_pwm_file(const std::filesystem::path& path,
                          const FixedPointFormat& fmt = FixedPointFormat{}) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open PWM file: " + path.string());
    std::string line;
    std::size_t line_no = 0;

    std::string symbols;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag != "#alphabet")
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected '#alphabet <symbols>' first");
        ls >> symbols;
        if (symbols.empty())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty alphabet");
        break;
    }
    if (symbols.empty()) throw ParseError("PWM file has no alphabet line: " + path.string());
    const Alphabet alphabet(symbols);

    std::map<int, std::vector<FxValue>> columns_by_symbol;
    std::size_t m = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string sym;
        ls >> sym;
        if (sym.size() != 1 || !alphabet.has(sym[0]))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": row symbol not in alphabet: " + sym);
        const int label = alphabet.label(sym[0]);
        if (columns_by_symbol.count(label))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": duplicate row for symbol " + sym);
        std::vector<FxValue> values;
        std::string tok;
        while (ls >> tok) values.push_back(FxValue::from_decimal(tok, fmt));
        if (values.empty())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty row");
        if (m == 0)
            m = values.size();
        else if (values.size() != m)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": ragged row, expected " + std::to_string(m) + " values");
        columns_by_symbol[label] = std::move(values);
    }
    if (columns_by_symbol.size() != alphabet.size())
        throw ParseError(path.string() + ": missing row for some alphabet symbol");
    if (m < 2) throw ParseError(path.string() + ": PWM needs length m >= 2");

    std::vector<std::vector<FxValue>> rows(m);
    for (std::size_t pos = 0; pos < m; ++pos) {
        rows[pos].reserve(alphabet.size());
        for (std::size_t a = 0; a < alphabet.size(); ++a)
            rows[pos].push_back(columns_by_symbol.at(static_cast<int>(a))[pos]);
    }
    return Pwm(alphabet, std::move(rows));
}

inline void write_pwm_file(const std::filesystem::path& path, const Pwm& pwm) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open PWM file for writing: " + path.string());
    out << "#alphabet " << pwm.alphabet().symbols() << "\n";
    for (std::size_t a = 0; a < pwm.alphabet().size(); ++a) {
        out << pwm.alphabet().symbol(a);
        for (std::int64_t pos = 0; pos < pwm.length(); ++pos)
            out << ' ' << pwm.entry(pos, a).to_decimal_string();
        out << "\n";
    }
}

/// Flat key-value configuration: `key = value` lines, '#' comments. CLI flags
/// override file values through set().
class Config {
public:
    Config() = default;

    static Config from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config file: " + path.string());
        Config cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
                continue;
            }
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stoll(it->second);
        } catch (const std::exception&) {
            throw ParseError("config key '" + key + "' is not an integer: " + it->second);
        }
    }
    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ParseError("config key '" + key + "' is not a number: " + it->second);
        }
    }

    FixedPointFormat fixed_point_format() const {
        FixedPointFormat fmt;
        fmt.int_bits = static_cast<int>(get_int("fixed_point.int_bits", fmt.int_bits));
        fmt.frac_bits = static_cast<int>(get_int("fixed_point.frac_bits", fmt.frac_bits));
        fmt.validate();
        return fmt;
    }

    /// FNV-1a digest of the canonical key=value serialization.
    std::string digest() const {
        std::uint64_t h = 1469598103934665603ull;
        const auto mix = [&h](std::string_view s) {
            for (char c : s) {
                h ^= static_cast<std::uint8_t>(c);
                h *= 1099511628211ull;
            }
        };
        for (const auto& [k, v] : values_) {
            mix(k);
            mix("=");
            mix(v);
            mix("\n");
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return std::string(buf);
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r");
        if (first == std::string::npos) return "";
        return s.substr(first, last - first + 1);
    }

    std::map<std::string, std::string> values_;
};

// --- JSON emission -------------------------------------------------------

inline json to_json(const QueryLedger& ledger) {
    return json{{"queries_seq", ledger.seq_queries},
                {"queries_pwm", ledger.pwm_queries},
                {"queries_p", ledger.p_queries},
                {"init_units", ledger.init_units},
                {"update_units", ledger.update_units}};
}

inline json to_json(const MatchSet& set) {
    json arr = json::array();
    for (const auto& p : set) arr.push_back(json::array({p.k, p.i}));
    return arr;
}

inline json to_json(const MatchReport& report) {
    json rounds = json::array();
    for (const auto& r : report.rounds) {
        json jr{{"a_before", r.a_before},
                {"success", r.success},
                {"v_queries", r.v_queries},
                {"accepted", r.accepted}};
        if (r.measured) jr["measured"] = json::array({r.measured->k, r.measured->i});
        rounds.push_back(jr);
    }
    json out{{"status", report.matched ? "matches" : "no-match"},
             {"found", to_json(report.found)},
             {"ledger", to_json(report.ledger)},
             {"classical_lookups", report.ledger.classical_lookups},
             {"rounds", rounds},
             {"n_sup", report.n_sup},
             {"kn", report.kn},
             {"gamma", report.gamma}};
    if (report.qmci) {
        out["delta_prime"] = report.delta_prime;
        out["delta_dprime"] = report.delta_dprime;
        out["qmci_params"] = json{{"epsilon", report.qmci->epsilon},
                                  {"delta", report.qmci->delta},
                                  {"J", report.qmci->J},
                                  {"t", report.qmci->qae.t},
                                  {"M", report.qmci->qae.M}};
    } else {
        out["delta_round"] = report.delta_round;
    }
    return out;
}

inline json to_json(const ScalingSummary& s) {
    return json{{"axis", s.axis},       {"sizes", s.sizes},   {"medians", s.medians},
                {"slope", s.slope},     {"ci_lo", s.ci_lo},   {"ci_hi", s.ci_hi}};
}

} // namespace qpwm
