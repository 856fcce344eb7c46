#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ginprod/ginprod.hpp"

namespace ginprod::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Shortest decimal form that reads back to the same double.
inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct GridSpec {
    double min = 0.5;
    double max = 5.0;
    int count = 4;
    std::string scale = "lin";

    std::string str() const {
        return num(min) + "," + num(max) + "," + std::to_string(count) + "," + scale;
    }

    std::vector<double> points() const {
        std::vector<double> out;
        if (count == 1) return {min};
        for (int i = 0; i < count; ++i) {
            const double t = static_cast<double>(i) / (count - 1);
            out.push_back(scale == "log" ? min * std::pow(max / min, t) : min + t * (max - min));
        }
        out.back() = max;
        return out;
    }
};

struct JobConfig {
    std::string command;
    int M = 1;
    std::vector<double> nu{0.0};
    int n = 1;
    GridSpec grid;
    double tol = 1e-12;
    std::uint64_t seed = 1;
    std::optional<int> trials;
    std::string out;
    std::string format;  // empty: command default
    std::vector<int> dims;
    bool diagonal = false;
    std::string repr;
    bool cauchy_check = false;
    bool quick = false;
    int bins = 0;
    double cutoff = 4.0;
    double perturb_a0 = 0.0;

    ParamSet params() const { return ParamSet(M, nu); }

    std::string effective_format() const {
        if (!format.empty()) return format;
        return (command == "kernel" || command == "hard-edge") ? "csv" : "json";
    }
};

inline const std::set<std::string>& commands() {
    static const std::set<std::string> c{"poly", "recurrence", "kernel", "hard-edge", "sample",
                                         "verify"};
    return c;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

inline double parse_double(const std::string& s, const std::string& code) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParameterError(code, "not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ParameterError(code, "not a number: '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s, const std::string& code) {
    const double v = parse_double(s, code);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParameterError(code, "not an integer: '" + s + "'");
    return static_cast<int>(v);
}

inline std::vector<double> parse_nu(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part, "config.nu"));
    return out;
}

inline std::vector<int> parse_dims(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_int(part, "config.dims"));
    return out;
}

inline GridSpec parse_grid(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 4)
        throw ParameterError("config.grid", "grid must be min,max,count,lin|log");
    GridSpec g;
    g.min = parse_double(parts[0], "config.grid");
    g.max = parse_double(parts[1], "config.grid");
    g.count = parse_int(parts[2], "config.grid");
    g.scale = parts[3];
    return g;
}

inline json to_json(const JobConfig& c) {
    json j;
    j["schema"] = 1;
    j["command"] = c.command;
    j["M"] = c.M;
    j["nu"] = c.nu;
    j["n"] = c.n;
    j["grid"] = c.grid.str();
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    if (c.trials) j["trials"] = *c.trials;
    if (!c.out.empty()) j["out"] = c.out;
    if (!c.format.empty()) j["format"] = c.format;
    if (!c.dims.empty()) j["dims"] = c.dims;
    j["diagonal"] = c.diagonal;
    if (!c.repr.empty()) j["repr"] = c.repr;
    j["cauchy_check"] = c.cauchy_check;
    j["quick"] = c.quick;
    j["bins"] = c.bins;
    j["cutoff"] = c.cutoff;
    if (c.perturb_a0 != 0.0) j["test_perturb_a0"] = c.perturb_a0;
    return j;
}

inline JobConfig from_json(const json& j) {
    static const std::set<std::string> known{
        "schema", "command", "M", "nu", "n", "grid", "tol", "seed", "trials", "out", "format",
        "dims", "diagonal", "repr", "cauchy_check", "quick", "bins", "cutoff", "test_perturb_a0"};
    if (!j.is_object()) throw ParameterError("config.json", "config file must hold a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ParameterError("config.json", "unknown config key '" + key + "'");
    if (j.contains("schema") && j["schema"] != 1)
        throw ParameterError("config.schema", "unsupported config schema");
    JobConfig c;
    try {
        if (j.contains("command")) c.command = j["command"].get<std::string>();
        if (j.contains("M")) c.M = j["M"].get<int>();
        if (j.contains("nu")) c.nu = j["nu"].get<std::vector<double>>();
        if (j.contains("n")) c.n = j["n"].get<int>();
        if (j.contains("grid")) c.grid = parse_grid(j["grid"].get<std::string>());
        if (j.contains("tol")) c.tol = j["tol"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("trials")) c.trials = j["trials"].get<int>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("format")) c.format = j["format"].get<std::string>();
        if (j.contains("dims")) c.dims = j["dims"].get<std::vector<int>>();
        if (j.contains("diagonal")) c.diagonal = j["diagonal"].get<bool>();
        if (j.contains("repr")) c.repr = j["repr"].get<std::string>();
        if (j.contains("cauchy_check")) c.cauchy_check = j["cauchy_check"].get<bool>();
        if (j.contains("quick")) c.quick = j["quick"].get<bool>();
        if (j.contains("bins")) c.bins = j["bins"].get<int>();
        if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<double>();
        if (j.contains("test_perturb_a0")) c.perturb_a0 = j["test_perturb_a0"].get<double>();
    } catch (const json::exception& e) {
        throw ParameterError("config.json", std::string("bad config value: ") + e.what());
    }
    return c;
}

inline void validate(const JobConfig& c) {
    if (c.command.empty()) throw ParameterError("config.command", "no command given");
    if (!commands().count(c.command))
        throw ParameterError("config.command", "unknown command '" + c.command + "'");
    const ParamSet params = c.params();  // param.* codes
    const std::string fmt = c.effective_format();
    if (fmt != "csv" && fmt != "json") throw ParameterError("config.format", "format must be csv or json");
    if ((c.command == "sample" || c.command == "verify") && fmt != "json")
        throw ParameterError("config.format", c.command + " writes JSON only");
    if (c.grid.count < 1) throw ParameterError("config.grid", "grid count must be at least 1");
    if (c.grid.scale != "lin" && c.grid.scale != "log")
        throw ParameterError("config.grid", "grid scale must be lin or log");
    if (!(c.grid.min > 0.0) || !(c.grid.max >= c.grid.min) || !std::isfinite(c.grid.max))
        throw ParameterError("config.grid", "grid needs 0 < min <= max");
    if (!(c.tol > 0.0)) throw ParameterError("config.tol", "tol must be positive");
    if (c.trials && c.command != "sample")
        throw ParameterError("config.trials", "trials only applies to sample");
    if (!c.dims.empty() && c.command != "sample")
        throw ParameterError("config.dims", "dims only applies to sample");
    if (c.cauchy_check && c.command != "hard-edge")
        throw ParameterError("config.cauchy-check", "cauchy-check only applies to hard-edge");
    if (c.cauchy_check && c.M != 2)
        throw ParameterError("config.cauchy-check", "cauchy-check needs M = 2");
    if (c.n < 0) throw ParameterError("config.n", "n must be nonnegative");
    if ((c.command == "kernel" || c.command == "recurrence") && c.n < 1)
        throw ParameterError("config.n", c.command + " needs n >= 1");
    static const std::map<std::string, std::set<std::string>> reprs{
        {"kernel", {"sum", "u-integral", "contour", "all"}},
        {"hard-edge", {"u-integral", "contour", "integrable", "all"}}};
    if (!c.repr.empty()) {
        const auto it = reprs.find(c.command);
        if (it == reprs.end() || !it->second.count(c.repr))
            throw ParameterError("config.repr", "unsupported repr '" + c.repr + "' for " + c.command);
    }
    if (c.command == "sample") {
        if (c.trials && *c.trials < 1) throw ParameterError("sampler.trials", "trials must be at least 1");
        if (c.dims.empty()) {
            if (!params.all_integer())
                throw ParameterError("sampler.integer-nu", "the sampler needs integer nu");
            if (c.n < 1) throw ParameterError("config.n", "sample needs n >= 1");
        } else {
            MatrixChainSpec{c.dims}.validate();
        }
        if (c.bins < 0) throw ParameterError("sampler.bins", "bins must be nonnegative");
        if (c.bins > 0 && !(c.cutoff > 0.0))
            throw ParameterError("sampler.cutoff", "cutoff must be positive");
    }
    if (c.perturb_a0 != 0.0 && c.command != "verify")
        throw ParameterError("config.test-perturb-a0", "the perturbation hook only applies to verify");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline json params_json(const ParamSet& p) { return json{{"M", p.M}, {"nu", p.nu}}; }

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // pre-formatted cells
    std::vector<json> json_rows;

    void add(std::vector<std::string> cells, json row) {
        rows.push_back(std::move(cells));
        json_rows.push_back(std::move(row));
    }

    std::string csv() const {
        std::string s;
        for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
        s += "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
            s += "\n";
        }
        return s;
    }
};

inline json eval_json(double x, double y, const EvalResult<double>& r, const std::string& repr) {
    return json{{"x", x}, {"y", y}, {"value", r.value}, {"err", r.err_estimate}, {"repr", repr}};
}

inline std::vector<std::pair<double, double>> grid_pairs(const JobConfig& c) {
    const auto pts = c.grid.points();
    std::vector<std::pair<double, double>> out;
    for (double x : pts) {
        if (c.diagonal) {
            out.emplace_back(x, x);
            continue;
        }
        for (double y : pts) out.emplace_back(x, y);
    }
    return out;
}

inline std::string emit(const JobConfig& c, const json& header, const Table& t) {
    if (c.effective_format() == "csv") return t.csv();
    json j = header;
    j["rows"] = t.json_rows;
    return j.dump(2) + "\n";
}

inline std::string cmd_poly(const JobConfig& c) {
    const ParamSet p = c.params();
    const MonicPoly P = p_coeffs(p, c.n);
    const auto coeffs = P.coeff_strings();
    if (c.effective_format() == "csv") {
        std::string s = "index,coefficient\n";
        for (std::size_t l = 0; l < coeffs.size(); ++l) s += std::to_string(l) + "," + coeffs[l] + "\n";
        return s;
    }
    json j{{"schema", 1}, {"command", "poly"}, {"params", params_json(p)}, {"n", c.n},
           {"exact", P.exact}, {"coefficients", coeffs}};
    json q = json::array();
    for (double y : c.grid.points()) {
        const auto r = q_eval(p, c.n, y, c.tol);
        q.push_back({{"y", y}, {"value", r.value}, {"err", r.err_estimate}});
    }
    j["q_values"] = q;
    return j.dump(2) + "\n";
}

inline std::string cmd_recurrence(const JobConfig& c) {
    const ParamSet p = c.params();
    const int n = c.n;
    const auto residual = recurrence_residual(p, n);
    Table t;
    t.columns = {"k", "n", "a", "b"};
    for (int k = 0; k <= p.M; ++k) {
        const std::string a = (k <= n) ? a_coeff(p, k, n).str() : "";
        const std::string b = b_coeff(p, k, n).str();
        t.add({std::to_string(k), std::to_string(n), a, b},
              json{{"k", k}, {"n", n}, {"a", k <= n ? json(a) : json(nullptr)}, {"b", b}});
    }
    if (c.effective_format() == "csv") return t.csv();
    json j{{"schema", 1},
           {"command", "recurrence"},
           {"params", params_json(p)},
           {"n", n},
           {"coefficients", t.json_rows},
           {"residual_zero", residual.is_zero(1e-30 * (1.0 + residual.max_abs_coeff()))},
           {"residual_max", residual.max_abs_coeff()}};
    return j.dump(2) + "\n";
}

inline std::string cmd_kernel(const JobConfig& c) {
    const ParamSet p = c.params();
    const std::string repr = c.repr.empty() ? "sum" : c.repr;
    KernelConfig kc;
    kc.params = p;
    kc.n = c.n;
    kc.tol = c.tol;
    std::optional<KnSum> sum;
    if (repr == "sum" || repr == "all") sum.emplace(p, c.n);
    Table t;
    t.columns = {"x", "y", "value", "err", "repr"};
    auto add = [&](double x, double y, const EvalResult<double>& r, const std::string& name) {
        t.add({num(x), num(y), num(r.value), num(r.err_estimate), name}, eval_json(x, y, r, name));
    };
    for (const auto& [x, y] : grid_pairs(c)) {
        if (sum) add(x, y, (*sum)(x, y), "sum");
        if (repr == "u-integral" || repr == "all") add(x, y, kn_u_integral(kc, x, y), "u-integral");
        if (repr == "contour" || repr == "all") add(x, y, kn_contour(kc, x, y), "contour");
    }
    return emit(c, json{{"schema", 1}, {"command", "kernel"}, {"params", params_json(p)}, {"n", c.n}},
                t);
}

inline std::string cmd_hard_edge(const JobConfig& c) {
    const ParamSet p = c.params();
    const std::string repr = c.repr.empty() ? "u-integral" : c.repr;
    HardEdgeConfig hc;
    hc.params = p;
    hc.tol = c.tol;
    const HardEdgeU u(hc, std::max(10.0, 2.0 * c.grid.max));
    const bool bessel = (p.M == 1);
    Table t;
    t.columns = {"x", "y", "value", "err", "repr"};
    if (bessel) t.columns.push_back("bessel");
    if (c.cauchy_check) t.columns.push_back("cauchy_rel_dev");
    for (const auto& [x, y] : grid_pairs(c)) {
        std::vector<std::pair<std::string, EvalResult<double>>> results;
        const bool off_diagonal = std::abs(x - y) >= hc.diagonal_guard;
        if (repr == "u-integral" || repr == "all" || (repr == "integrable" && !off_diagonal))
            results.emplace_back("u-integral", u(x, y));
        if (repr == "contour" || repr == "all") results.emplace_back("contour", hard_edge_contour(hc, x, y));
        if ((repr == "integrable" || repr == "all") && off_diagonal)
            results.emplace_back("integrable", hard_edge_integrable(hc, x, y));
        std::optional<double> bes, cauchy;
        if (bessel) bes = hard_edge_bessel(p.nu[0], x, y);
        if (c.cauchy_check) cauchy = cauchy_identity_check(p.nu[1], p.nu[0] - p.nu[1], x, y).rel_dev;
        for (const auto& [name, r] : results) {
            std::vector<std::string> cells{num(x), num(y), num(r.value), num(r.err_estimate), name};
            json row = eval_json(x, y, r, name);
            if (bes) {
                cells.push_back(num(*bes));
                row["bessel"] = *bes;
            }
            if (cauchy) {
                cells.push_back(num(*cauchy));
                row["cauchy_rel_dev"] = *cauchy;
            }
            t.add(std::move(cells), std::move(row));
        }
    }
    return emit(c, json{{"schema", 1}, {"command", "hard-edge"}, {"params", params_json(p)}}, t);
}

inline MatrixChainSpec sample_spec(const JobConfig& c) {
    if (!c.dims.empty()) return MatrixChainSpec{c.dims};
    std::vector<int> dims{c.n};
    for (double v : c.nu) dims.push_back(c.n + static_cast<int>(v));
    return MatrixChainSpec{dims};
}

inline std::string cmd_sample(const JobConfig& c) {
    const MatrixChainSpec spec = sample_spec(c);
    const int trials = c.trials.value_or(10000);
    const auto batch = run_batch(spec, c.seed, trials);
    json moments = json::array();
    for (const auto& m : empirical_vs_exact_moments(batch, {0, 1, 2}))
        moments.push_back({{"p", m.p},
                           {"empirical", m.empirical},
                           {"std_error", m.std_error},
                           {"exact", m.exact},
                           {"z", m.z},
                           {"flagged", m.flagged}});
    json j{{"schema", 1},
           {"command", "sample"},
           {"seed", c.seed},
           {"trials", trials},
           {"dims", spec.dims},
           {"params", params_json(spec.params())},
           {"moments", moments}};
    if (c.bins > 0) {
        const auto h = hard_edge_histogram(batch, c.bins, c.cutoff);
        j["histogram"] = {{"edges", h.edges},
                          {"counts", h.counts},
                          {"density", h.density},
                          {"predicted", h.predicted},
                          {"total_mass", h.total_mass},
                          {"sup_discrepancy", h.sup_discrepancy}};
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct CheckLog {
    json checks = json::array();
    bool passed = true;

    void add(const std::string& name, bool ok, double residual) {
        checks.push_back({{"name", name}, {"status", ok ? "pass" : "fail"}, {"residual", residual}});
        passed = passed && ok;
    }

    template <class F>
    void run(const std::string& name, F&& f) {
        try {
            const auto [ok, residual] = f();
            add(name, ok, residual);
        } catch (const std::exception& e) {
            checks.push_back({{"name", name}, {"status", "fail"}, {"residual", nullptr},
                              {"error", e.what()}});
            passed = false;
        }
    }
};

/// Nondecreasing nu tuples with entries in 0..numax.
inline std::vector<ParamSet> verify_sweep(int Mmax, int numax) {
    std::vector<ParamSet> out;
    for (int M = 1; M <= Mmax; ++M) {
        std::vector<int> v(M, 0);
        while (true) {
            out.emplace_back(M, std::vector<double>(v.begin(), v.end()));
            int i = M - 1;
            while (i >= 0 && v[i] == numax) --i;
            if (i < 0) break;
            ++v[i];
            for (int j = i + 1; j < M; ++j) v[j] = v[i];
        }
    }
    return out;
}

inline std::string label(const ParamSet& p) {
    std::string s = "M=" + std::to_string(p.M) + " nu=(";
    for (std::size_t i = 0; i < p.nu.size(); ++i) s += (i ? "," : "") + num(p.nu[i]);
    return s + ")";
}

inline void verify_exact(CheckLog& log, int nmax, double perturb_a0) {
    for (const ParamSet& p : verify_sweep(3, 2)) {
        const std::string tag = label(p);
        log.run("biorthogonality " + tag, [&] {
            double worst = 0.0;
            for (int j = 0; j <= nmax; ++j)
                for (int k = 0; k <= nmax; ++k) {
                    const Rational d = biorth_pairing(p, j, k).q - (j == k ? 1 : 0);
                    worst = std::max(worst, std::abs(static_cast<double>(d)));
                }
            return std::pair(worst == 0.0, worst);
        });
        log.run("recurrence " + tag, [&] {
            double worst = 0.0;
            for (int n = 1; n <= nmax; ++n) {
                const auto r = recurrence_residual(p, n, perturb_a0);
                worst = std::max(worst, r.is_zero() ? 0.0 : std::max(r.max_abs_coeff(), 1e-300));
            }
            return std::pair(worst == 0.0, worst);
        });
        log.run("dual recurrence " + tag, [&] {
            double worst = 0.0;
            for (int n = 1; n <= nmax; ++n) {
                const auto r = dual_recurrence_residual(p, n);
                worst = std::max(worst, r.is_zero() ? 0.0 : std::max(r.max_abs_coeff(), 1e-300));
            }
            return std::pair(worst == 0.0, worst);
        });
        log.run("duality " + tag, [&] {
            double worst = 0.0;
            for (int n = 0; n <= nmax; ++n)
                for (int k = 0; k <= std::min(p.M, n); ++k) {
                    const Rational d = a_coeff(p, k, n).q - b_coeff(p, k, n - k).q;
                    worst = std::max(worst, std::abs(static_cast<double>(d)));
                }
            return std::pair(worst == 0.0, worst);
        });
        log.run("leading order " + tag, [&] {
            bool ok = true;
            double worst = 0.0;
            for (int k = 0; k <= p.M; ++k) {
                const auto lo = a_leading_order(p, k);
                const Rational expected = binomial<Rational>(p.M + 1, k + 1);
                ok = ok && lo.degree == (k + 1) * p.M && lo.leading.q == expected;
                worst = std::max(worst, std::abs(static_cast<double>(lo.leading.q - expected)) +
                                            std::abs(lo.degree - (k + 1) * p.M));
            }
            return std::pair(ok, worst);
        });
        log.run("mop orthogonality " + tag, [&] {
            bool ok = true;
            for (int n = 0; n <= nmax; ++n) ok = ok && mop_orthogonality_check(p, n).passed;
            return std::pair(ok, ok ? 0.0 : 1.0);
        });
        log.run("trace " + tag, [&] {
            double worst = 0.0;
            for (int n = 1; n <= nmax; ++n) {
                KernelConfig kc;
                kc.params = p;
                kc.n = n;
                worst = std::max(worst, std::abs(static_cast<double>(trace_moment(kc, 0).q - n)));
            }
            return std::pair(worst == 0.0, worst);
        });
    }
}

inline void verify_numeric(CheckLog& log, int nmax) {
    const std::vector<double> pts{0.5, 2.0};
    for (const ParamSet& p : verify_sweep(3, 2)) {
        const std::string tag = label(p);
        log.run("kernel representations " + tag, [&] {
            double worst = 0.0;
            for (int n : {1, nmax / 2, nmax}) {
                if (n < 1) continue;
                KernelConfig kc;
                kc.params = p;
                kc.n = n;
                const KnSum sum(p, n);
                for (double x : pts)
                    for (double y : pts) {
                        const double k = sum(x, y).value;
                        const double du = std::abs(kn_u_integral(kc, x, y).value - k);
                        const double dc = std::abs(kn_contour(kc, x, y).value - k);
                        worst = std::max({worst, du / (1.0 + std::abs(k)), dc / (1.0 + std::abs(k))});
                    }
            }
            return std::pair(worst <= 1e-6, worst);
        });
        log.run("hard edge representations " + tag, [&] {
            HardEdgeConfig hc;
            hc.params = p;
            const HardEdgeU u(hc);
            double worst = 0.0;
            for (auto [x, y] : {std::pair{0.5, 2.0}, std::pair{2.0, 1.0}}) {
                const double a = u(x, y).value;
                const double b = hard_edge_contour(hc, x, y).value;
                const double c = hard_edge_integrable(hc, x, y).value;
                const double scale = std::abs(a);
                worst = std::max({worst, std::abs(a - b) / scale, std::abs(a - c) / scale});
            }
            return std::pair(worst <= 1e-7, worst);
        });
    }
    for (double nu : {0.0, 1.0, 2.0})
        log.run("bessel identity nu=" + num(nu), [&] {
            HardEdgeConfig hc;
            hc.params = ParamSet(1, {nu});
            const HardEdgeU u(hc);
            double worst = 0.0;
            for (double x : pts)
                for (double y : pts)
                    worst = std::max(worst, std::abs(u(x, y).value - hard_edge_bessel(nu, x, y)));
            return std::pair(worst <= 1e-10, worst);
        });
    for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.0}, std::pair{1.0, 1.0},
                        std::pair{0.5, 0.5}})
        log.run("cauchy identity a=" + num(a) + " b=" + num(b), [&] {
            const auto r = cauchy_identity_check(a, b, 1.0, 2.0);
            return std::pair(r.passed, r.rel_dev);
        });
}

inline std::pair<std::string, bool> cmd_verify(const JobConfig& c) {
    CheckLog log;
    const int nmax = 10;
    verify_exact(log, nmax, c.perturb_a0);
    if (!c.quick) verify_numeric(log, nmax);
    json j{{"schema", 1},
           {"command", "verify"},
           {"quick", c.quick},
           {"passed", log.passed},
           {"checks", log.checks}};
    return {j.dump(2) + "\n", log.passed};
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline void report_error(std::ostream& err, const std::string& code, const std::string& message) {
    err << json{{"schema", 1}, {"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

/// Parses argv into a config; returns nullopt when CLI11 handled the call
/// itself (--help), with `exit_code` set.
inline std::optional<JobConfig> parse(int argc, const char* const* argv, bool& dump, int& exit_code,
                                      std::ostream& out) {
    CLI::App app{"Correlation kernels for squared singular values of Ginibre matrix products",
                 "ginprod"};
    std::string command, config_path, nu, grid, dims, format, out_path, repr;
    int M = 0, n = 0, trials = 0, bins = 0;
    double tol = 0.0, cutoff = 0.0, perturb = 0.0;
    std::uint64_t seed = 0;
    bool diagonal = false, cauchy = false, quick = false;
    app.add_option("command", command, "poly | recurrence | kernel | hard-edge | sample | verify");
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    auto* oM = app.add_option("--M", M, "number of factors");
    auto* onu = app.add_option("--nu", nu, "comma-separated nu_1..nu_M");
    auto* on = app.add_option("--n", n, "polynomial degree / number of points");
    auto* ogrid = app.add_option("--grid", grid, "min,max,count,lin|log");
    auto* otol = app.add_option("--tol", tol, "absolute quadrature tolerance");
    auto* oseed = app.add_option("--seed", seed, "sampler seed");
    auto* otrials = app.add_option("--trials", trials, "Monte Carlo trials (sample)");
    auto* oout = app.add_option("--out", out_path, "output file (default stdout)");
    auto* ofmt = app.add_option("--format", format, "csv | json");
    auto* odims = app.add_option("--dims", dims, "N_0,...,N_M for sample");
    auto* odiag = app.add_flag("--diagonal", diagonal, "evaluate on x = y only");
    auto* orepr = app.add_option("--repr", repr, "representation (kernel, hard-edge)");
    auto* ocauchy = app.add_flag("--cauchy-check", cauchy, "add the Cauchy identity column (M = 2)");
    auto* oquick = app.add_flag("--quick", quick, "verify: exact suite only");
    auto* obins = app.add_option("--bins", bins, "sample: histogram bins near the hard edge");
    auto* ocut = app.add_option("--cutoff", cutoff, "sample: histogram range in n x");
    auto* opert = app.add_option("--test-perturb-a0", perturb, "verify: add to a_{0,n} (test hook)");
    opert->group("");
    app.add_flag("--dump-config", dump, "print the effective config as JSON and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        exit_code = kExitOk;
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ParameterError("config.parse", e.what());
    }
    JobConfig c;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ParameterError("config.file", "cannot read config file '" + config_path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ParameterError("config.json", std::string("invalid JSON: ") + e.what());
        }
        c = from_json(j);
    }
    if (!command.empty()) c.command = command;
    if (oM->count()) c.M = M;
    if (onu->count()) c.nu = parse_nu(nu);
    if (oM->count() && !onu->count() && static_cast<int>(c.nu.size()) != c.M)
        c.nu.assign(c.M, 0.0);
    if (on->count()) c.n = n;
    if (ogrid->count()) c.grid = parse_grid(grid);
    if (otol->count()) c.tol = tol;
    if (oseed->count()) c.seed = seed;
    if (otrials->count()) c.trials = trials;
    if (oout->count()) c.out = out_path;
    if (ofmt->count()) c.format = format;
    if (odims->count()) c.dims = parse_dims(dims);
    if (odiag->count()) c.diagonal = diagonal;
    if (orepr->count()) c.repr = repr;
    if (ocauchy->count()) c.cauchy_check = cauchy;
    if (oquick->count()) c.quick = quick;
    if (obins->count()) c.bins = bins;
    if (ocut->count()) c.cutoff = cutoff;
    if (opert->count()) c.perturb_a0 = perturb;
    if (!c.dims.empty() && !onu->count() && !oM->count()) {
        MatrixChainSpec{c.dims}.validate();
        const ParamSet p = MatrixChainSpec{c.dims}.params();
        c.M = p.M;
        c.nu = p.nu;
        c.n = c.dims.front();
    }
    return c;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    JobConfig c;
    bool dump = false;
    try {
        int code = kExitOk;
        auto parsed = parse(argc, argv, dump, code, out);
        if (!parsed) return code;
        c = *parsed;
        validate(c);
    } catch (const Error& e) {
        report_error(err, e.code(), e.what());
        return kExitConfig;
    }
    std::string text;
    int status = kExitOk;
    if (dump) {
        text = to_json(c).dump(2) + "\n";
    } else {
        try {
            if (c.command == "poly") text = cmd_poly(c);
            else if (c.command == "recurrence") text = cmd_recurrence(c);
            else if (c.command == "kernel") text = cmd_kernel(c);
            else if (c.command == "hard-edge") text = cmd_hard_edge(c);
            else if (c.command == "sample") text = cmd_sample(c);
            else {
                const auto [report, passed] = cmd_verify(c);
                text = report;
                status = passed ? kExitOk : kExitFailure;
            }
        } catch (const ParameterError& e) {
            report_error(err, e.code(), e.what());
            return kExitConfig;
        } catch (const Error& e) {
            report_error(err, e.code(), e.what());
            return kExitFailure;
        } catch (const std::exception& e) {
            report_error(err, "internal", e.what());
            return kExitFailure;
        }
    }
    if (c.out.empty() || dump) {
        out << text;
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) {
            report_error(err, "io.out", "cannot write '" + c.out + "'");
            return kExitConfig;
        }
        f << text;
    }
    return status;
}

}  // namespace ginprod::cli
