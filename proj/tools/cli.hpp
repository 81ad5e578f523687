#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgfisher/errors.hpp"
#include "qgfisher/estimators.hpp"
#include "qgfisher/inequalities.hpp"
#include "qgfisher/qgaussian.hpp"
#include "qgfisher/radial_density.hpp"
#include "qgfisher/sampler.hpp"
#include "qgfisher/variational.hpp"

namespace qgfisher::cli {

enum ExitCode : int { exit_ok = 0, exit_invalid_input = 2, exit_divergence = 3, exit_violation = 4 };

/// Everything a run depends on. Echoed into every report, and read back by config_from_json.
struct RunConfig {
    std::string subcommand;
    int n = 1;
    double alpha = 2.0;
    double q = 1.0;
    double gamma = 1.0;
    std::string density = "qgaussian";
    std::string method = "closed-form";
    std::vector<std::string> inequalities;
    bool all = false;
    Tolerances tolerances;
    std::uint64_t seed = 0;
    std::size_t count = 1000;
    double moment = 1.0;
    int nodes = 800;
    std::string init = "exponential";
    // sweep grids, "v", "a,b,c" or "start:stop:step"
    std::string n_grid = "1", alpha_grid = "2", q_grid = "1", gamma_grid = "1";
    unsigned threads = 0;
    std::string format = "json";
    std::string out;
};

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"subcommand", c.subcommand},
            {"n", c.n},
            {"alpha", c.alpha},
            {"q", c.q},
            {"gamma", c.gamma},
            {"density", c.density},
            {"method", c.method},
            {"inequalities", c.inequalities},
            {"all", c.all},
            {"tolerances", {{"rel_tol", c.tolerances.rel_tol}, {"eq_tol", c.tolerances.eq_tol}}},
            {"seed", c.seed},
            {"count", c.count},
            {"moment", c.moment},
            {"nodes", c.nodes},
            {"init", c.init},
            {"grid", {{"n", c.n_grid}, {"alpha", c.alpha_grid}, {"q", c.q_grid}, {"gamma", c.gamma_grid}}},
            {"threads", c.threads},
            {"format", c.format},
            {"out", c.out}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    c.n = j.at("n").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.q = j.at("q").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.density = j.at("density").get<std::string>();
    c.method = j.at("method").get<std::string>();
    c.inequalities = j.at("inequalities").get<std::vector<std::string>>();
    c.all = j.at("all").get<bool>();
    c.tolerances.rel_tol = j.at("tolerances").at("rel_tol").get<double>();
    c.tolerances.eq_tol = j.at("tolerances").at("eq_tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.count = j.at("count").get<std::size_t>();
    c.moment = j.at("moment").get<double>();
    c.nodes = j.at("nodes").get<int>();
    c.init = j.at("init").get<std::string>();
    const auto& g = j.at("grid");
    c.n_grid = g.at("n").get<std::string>();
    c.alpha_grid = g.at("alpha").get<std::string>();
    c.q_grid = g.at("q").get<std::string>();
    c.gamma_grid = g.at("gamma").get<std::string>();
    c.threads = j.at("threads").get<unsigned>();
    c.format = j.at("format").get<std::string>();
    c.out = j.at("out").get<std::string>();
    return c;
}

namespace detail {

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError(what + ": '" + s + "' is not a number");
    }
    if (used != s.size()) throw DomainError(what + ": '" + s + "' is not a number");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

inline RadialDensity parse_mixture(int n, const std::string& text) {
    std::vector<MixtureComponent> comps;
    for (const auto& term : split(text, ';')) {
        const auto f = split(term, ',');
        if (f.size() != 3) throw DomainError("mixture component '" + term + "' must be w,center,scale");
        const double w = parse_number(f[0], "mixture weight");
        const double center = parse_number(f[1], "mixture center");
        const double var = parse_number(f[2], "mixture scale");
        if (center != 0.0) throw DomainError("mixture centers must be 0 (radial densities only), got " + f[1]);
        comps.push_back({w, var});
    }
    return gaussian_mixture(n, std::move(comps));
}

// Two columns r, f per line; '#' starts a comment; commas or blanks separate.
inline RadialDensity profile_from_file(int n, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open profile file '" + path + "'");
    std::vector<double> r, f;
    std::string line;
    while (std::getline(in, line)) {
        line = line.substr(0, line.find('#'));
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a = 0.0, b = 0.0;
        if (!(ls >> a)) continue;
        if (!(ls >> b)) throw DomainError("profile file '" + path + "': expected two columns in '" + line + "'");
        r.push_back(a);
        f.push_back(b);
    }
    return tabulated_profile(n, std::move(r), std::move(f), "profile:" + path);
}

} // namespace detail

/// Density selector: qgaussian | mixture:w,0,v;... | uniform-ball[:radius] |
/// truncated-exponential:rate,cutoff | profile:path.
inline RadialDensity make_density(const RunConfig& c) {
    const auto colon = c.density.find(':');
    const std::string kind = c.density.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : c.density.substr(colon + 1);
    if (kind == "qgaussian") return qgaussian_density(QGaussianParams(c.n, c.alpha, c.q, c.gamma));
    if (kind == "mixture") return detail::parse_mixture(c.n, arg);
    if (kind == "uniform-ball") return uniform_ball(c.n, arg.empty() ? 1.0 : detail::parse_number(arg, "ball radius"));
    if (kind == "truncated-exponential") {
        const auto f = detail::split(arg, ',');
        if (f.size() != 2) throw DomainError("truncated-exponential needs rate,cutoff");
        return truncated_exponential(c.n, detail::parse_number(f[0], "rate"), detail::parse_number(f[1], "cutoff"));
    }
    if (kind == "profile") return detail::profile_from_file(c.n, arg);
    throw DomainError("unknown density '" + c.density + "'");
}

/// Grid syntax: a single value, a comma list, or start:stop:step (inclusive of stop up to rounding).
inline std::vector<double> parse_grid(const std::string& text, const std::string& what) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto f = detail::split(text, ':');
        if (f.size() != 3) throw DomainError(what + " grid '" + text + "' must be start:stop:step");
        const double a = detail::parse_number(f[0], what), b = detail::parse_number(f[1], what),
                     h = detail::parse_number(f[2], what);
        if (!(h > 0.0)) throw DomainError(what + " grid step must be > 0");
        if (b >= a) {
            const auto steps = static_cast<long>(std::floor((b - a) / h + 1e-9));
            for (long i = 0; i <= steps; ++i) values.push_back(a + i * h);
        }
    } else {
        for (const auto& s : detail::split(text, ','))
            if (!s.empty()) values.push_back(detail::parse_number(s, what));
    }
    return values;
}

namespace detail {

inline std::string csv_cell(double v) {
    if (!std::isfinite(v)) return "";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

inline void write_config_line(const RunConfig& c, std::ostream& os) { os << "# config: " << to_json(c).dump() << '\n'; }

inline nlohmann::json measures_json(const MeasureSet& m) {
    return {{"n", m.n},
            {"alpha", m.alpha},
            {"beta", m.beta},
            {"q", m.q},
            {"mq", m.Mq.value},
            {"hq", m.Hq.value},
            {"sq", m.Sq.value},
            {"nq", m.Nq.value},
            {"m_alpha", m.m_alpha.value},
            {"i_bq", m.I_bq ? nlohmann::json(m.I_bq->value) : nlohmann::json(nullptr)}};
}

inline std::vector<double> measure_values(const MeasureSet& m) {
    return {m.Mq.value, m.Hq.value, m.Sq.value, m.Nq.value, m.m_alpha.value,
            m.I_bq ? m.I_bq->value : std::numeric_limits<double>::quiet_NaN()};
}

inline double max_rel_diff(const MeasureSet& a, const MeasureSet& b) {
    const auto x = measure_values(a), y = measure_values(b);
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::isfinite(x[i]) && std::isfinite(y[i])) d = std::max(d, std::abs(x[i] - y[i]) / std::abs(y[i]));
    return d;
}

const std::vector<InequalityKind> kAllKinds{InequalityKind::fisher_moment_entropy, InequalityKind::moment_entropy,
                                            InequalityKind::stam, InequalityKind::cramer_rao};

} // namespace detail

inline int cmd_measures(const RunConfig& c, std::ostream& os) {
    const bool want_closed = c.method == "closed-form" || c.method == "both";
    const bool want_quad = c.method == "quadrature" || c.method == "both";
    if (!want_closed && !want_quad) throw DomainError("--method must be closed-form, quadrature or both");
    std::vector<std::pair<std::string, MeasureSet>> sets;
    if (c.density == "qgaussian") {
        const QGaussianParams p(c.n, c.alpha, c.q, c.gamma);
        p.require(Validity::mq_finite);
        if (want_closed) sets.emplace_back("closed-form", closed_measures(p));
        if (want_quad) sets.emplace_back("quadrature", measure_all(qgaussian_numeric(p), c.alpha, c.q));
    } else {
        if (want_closed) throw DomainError("closed forms exist only for --density qgaussian; use --method quadrature");
        sets.emplace_back("quadrature", measure_all(make_density(c), c.alpha, c.q));
    }
    if (c.format == "csv") {
        detail::write_config_line(c, os);
        os << "method,n,alpha,beta,q,mq,hq,sq,nq,m_alpha,i_bq\n";
        for (const auto& [name, m] : sets) {
            os << name << ',' << m.n << ',' << detail::csv_cell(m.alpha) << ',' << detail::csv_cell(m.beta) << ','
               << detail::csv_cell(m.q);
            for (double v : detail::measure_values(m)) os << ',' << detail::csv_cell(v);
            os << '\n';
        }
        return exit_ok;
    }
    nlohmann::json j{{"config", to_json(c)}, {"measures", nlohmann::json::object()}};
    for (const auto& [name, m] : sets) j["measures"][name] = detail::measures_json(m);
    if (sets.size() == 2) j["max_rel_diff"] = detail::max_rel_diff(sets[0].second, sets[1].second);
    os << j.dump(2) << '\n';
    return exit_ok;
}

inline int cmd_verify(const RunConfig& c, std::ostream& os) {
    std::vector<InequalityKind> kinds;
    if (c.all) kinds = detail::kAllKinds;
    for (const auto& s : c.inequalities) kinds.push_back(inequality_from_string(s));
    if (kinds.empty()) throw DomainError("verify needs --ineq <name> or --all");
    DensityMeasures d(make_density(c), c.alpha, c.q);
    std::vector<InequalityReport> reports;
    std::vector<std::pair<std::string, std::string>> skipped;
    for (auto kind : kinds) {
        try {
            reports.push_back(check(kind, d, c.tolerances));
        } catch (const PreconditionError& e) {
            // --all covers what applies; an explicitly requested check must apply.
            if (!c.all) throw;
            skipped.emplace_back(to_string(kind), e.bound());
        }
    }
    const bool all_pass = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passes; });
    if (c.format == "csv") {
        detail::write_config_line(c, os);
        os << "name,lhs,rhs,ratio,deficit,passes,equality,skipped\n";
        for (const auto& r : reports)
            os << r.name() << ',' << detail::csv_cell(r.lhs) << ',' << detail::csv_cell(r.rhs) << ','
               << detail::csv_cell(r.ratio) << ',' << detail::csv_cell(r.deficit) << ',' << (r.passes ? "true" : "false")
               << ',' << (r.equality ? "true" : "false") << ",\n";
        for (const auto& [name, bound] : skipped) os << name << ",,,,,,," << detail::csv_quote(bound) << '\n';
    } else {
        nlohmann::json j{{"config", to_json(c)}, {"reports", nlohmann::json::array()}, {"all_pass", all_pass}};
        for (const auto& r : reports) j["reports"].push_back(to_json(r));
        if (!skipped.empty()) {
            j["skipped"] = nlohmann::json::array();
            for (const auto& [name, bound] : skipped) j["skipped"].push_back({{"name", name}, {"bound", bound}});
        }
        os << j.dump(2) << '\n';
    }
    return all_pass ? exit_ok : exit_violation;
}

struct SweepRow {
    std::size_t index = 0;
    int n = 1;
    double alpha = 0.0, q = 0.0, gamma = 0.0;
    std::vector<double> measures;  // mq, hq, sq, nq, m_alpha, i_bq
    std::vector<double> deficits;  // one per kind in kAllKinds; NaN where the check does not apply
    std::string error;
};

inline SweepRow sweep_row(std::size_t index, int n, double alpha, double q, double gamma, bool closed) {
    SweepRow row{index, n, alpha, q, gamma, {}, {}, {}};
    try {
        const QGaussianParams p(n, alpha, q, gamma);
        p.require(Validity::mq_finite);
        row.measures = detail::measure_values(closed ? closed_measures(p) : measure_all(qgaussian_numeric(p), alpha, q));
        DensityMeasures d(closed ? qgaussian_density(p) : qgaussian_numeric(p), alpha, q);
        for (auto kind : detail::kAllKinds) {
            try {
                row.deficits.push_back(check(kind, d).deficit);
            } catch (const PreconditionError&) {
                row.deficits.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
    } catch (const std::exception& e) {
        row.measures.clear();
        row.deficits.clear();
        row.error = e.what();
    }
    return row;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& os) {
    if (c.method != "closed-form" && c.method != "quadrature") throw DomainError("sweep --method must be closed-form or quadrature");
    const auto ns = parse_grid(c.n_grid, "n");
    const auto alphas = parse_grid(c.alpha_grid, "alpha");
    const auto qs = parse_grid(c.q_grid, "q");
    const auto gammas = parse_grid(c.gamma_grid, "gamma");
    if (ns.empty() || alphas.empty() || qs.empty() || gammas.empty()) throw DomainError("sweep: empty grid");
    for (double n : ns)
        if (n != std::floor(n) || n < 1) throw DomainError("sweep: n values must be positive integers");

    struct Point {
        int n;
        double alpha, q, gamma;
    };
    std::vector<Point> points;
    for (double n : ns)
        for (double a : alphas)
            for (double q : qs)
                for (double g : gammas) points.push_back({static_cast<int>(n), a, q, g});

    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    const bool closed = c.method == "closed-form";
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++)
            rows[i] = sweep_row(i, points[i].n, points[i].alpha, points[i].q, points[i].gamma, closed);
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nthreads = std::min<std::size_t>(c.threads ? c.threads : hw, points.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const std::vector<std::string> measure_names{"mq", "hq", "sq", "nq", "m_alpha", "i_bq"};
    auto deficit_name = [](InequalityKind k) {
        std::string s = "deficit_" + to_string(k);
        std::replace(s.begin(), s.end(), '-', '_');
        return s;
    };
    if (c.format == "json") {
        nlohmann::json j{{"config", to_json(c)}, {"rows", nlohmann::json::array()}};
        for (const auto& r : rows) {
            nlohmann::json row{{"index", r.index}, {"n", r.n}, {"alpha", r.alpha}, {"q", r.q}, {"gamma", r.gamma}};
            for (std::size_t i = 0; i < r.measures.size(); ++i) row[measure_names[i]] = r.measures[i];
            for (std::size_t i = 0; i < r.deficits.size(); ++i)
                row[deficit_name(detail::kAllKinds[i])] =
                    std::isfinite(r.deficits[i]) ? nlohmann::json(r.deficits[i]) : nlohmann::json(nullptr);
            row["error"] = r.error;
            j["rows"].push_back(row);
        }
        os << j.dump(2) << '\n';
        return exit_ok;
    }
    detail::write_config_line(c, os);
    os << "index,n,alpha,q,gamma";
    for (const auto& m : measure_names) os << ',' << m;
    for (auto k : detail::kAllKinds) os << ',' << deficit_name(k);
    os << ",error\n";
    for (const auto& r : rows) {
        os << r.index << ',' << r.n << ',' << detail::csv_cell(r.alpha) << ',' << detail::csv_cell(r.q) << ','
           << detail::csv_cell(r.gamma);
        for (std::size_t i = 0; i < measure_names.size(); ++i)
            os << ',' << (i < r.measures.size() ? detail::csv_cell(r.measures[i]) : "");
        for (std::size_t i = 0; i < detail::kAllKinds.size(); ++i)
            os << ',' << (i < r.deficits.size() ? detail::csv_cell(r.deficits[i]) : "");
        os << ',' << detail::csv_quote(r.error) << '\n';
    }
    return exit_ok;
}

inline int cmd_sample(const RunConfig& c, std::ostream& os) {
    const QGaussianParams p(c.n, c.alpha, c.q, c.gamma);
    const auto batch = sample(p, c.count, c.seed);
    if (c.format == "csv") {
        detail::write_config_line(c, os);
        write_csv(batch, os);
        return exit_ok;
    }
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < batch.count; ++i) {
        const auto pt = batch.point(i);
        pts.push_back(std::vector<double>(pt.begin(), pt.end()));
    }
    os << nlohmann::json{{"config", to_json(c)}, {"rng", kRngName}, {"points", pts}}.dump(2) << '\n';
    return exit_ok;
}

inline int cmd_minimize(const RunConfig& c, std::ostream& os) {
    const auto p = make_problem(c.n, c.alpha, c.q, c.moment, c.nodes);
    const auto s = solve(p, init_from_string(c.init));
    const auto gap = check_energy_identity(s, p);
    if (c.format == "csv") {
        detail::write_config_line(c, os);
        os << "# objective: " << std::setprecision(17) << s.objective << " energy_identity_gap: " << gap.rel_gap << '\n';
        write_csv(p, s, os);
        return exit_ok;
    }
    auto j = to_json(s);
    j["config"] = to_json(c);
    j["expected_objective"] = p.expected_objective();
    j["relative_l2_error"] = relative_l2_error(p, s);
    j["energy_identity_gap"] = gap.rel_gap;
    os << j.dump(2) << '\n';
    return exit_ok;
}

/// Parses argv, runs one subcommand, and maps errors onto the exit-code contract.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"q-Gaussian information measures, inequality checks, sampling and variational solver"};
    app.require_subcommand(1);
    RunConfig c;
    std::vector<std::string> ineqs;

    auto params = [&](CLI::App* sub) {
        sub->add_option("--n", c.n, "dimension")->capture_default_str();
        sub->add_option("--alpha", c.alpha, "moment exponent")->capture_default_str();
        sub->add_option("--q", c.q, "entropic index")->capture_default_str();
        sub->add_option("--gamma", c.gamma, "q-Gaussian scale")->capture_default_str();
    };
    // Defaults that differ per subcommand are filled in after parsing: the options share `c`.
    auto output = [&](CLI::App* sub, const std::string& fmt) {
        sub->add_option("--format", c.format, "json or csv (default " + fmt + ")")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", c.out, "write here instead of stdout");
    };

    auto* measures = app.add_subcommand("measures", "information measures of one density");
    params(measures);
    measures->add_option("--density", c.density, "density selector")->capture_default_str();
    measures->add_option("--method", c.method, "closed-form, quadrature or both")->capture_default_str();
    output(measures, "json");

    auto* verify = app.add_subcommand("verify", "check information inequalities");
    params(verify);
    verify->add_option("--density", c.density, "qgaussian | mixture:w,0,v;... | uniform-ball[:R] | "
                                               "truncated-exponential:rate,cutoff | profile:path")
        ->capture_default_str();
    verify->add_option("--ineq", ineqs, "fisher-moment-entropy, moment-entropy, stam, cramer-rao (repeatable)");
    verify->add_flag("--all", c.all, "every inequality that applies");
    verify->add_option("--rel-tol", c.tolerances.rel_tol, "violation tolerance")->capture_default_str();
    verify->add_option("--eq-tol", c.tolerances.eq_tol, "equality tolerance")->capture_default_str();
    output(verify, "json");

    auto* sweep = app.add_subcommand("sweep", "measures and deficits of q-Gaussians over a parameter grid");
    sweep->add_option("--n", c.n_grid, "grid: v | a,b,c | start:stop:step")->capture_default_str();
    sweep->add_option("--alpha", c.alpha_grid, "grid")->capture_default_str();
    sweep->add_option("--q", c.q_grid, "grid")->capture_default_str();
    sweep->add_option("--gamma", c.gamma_grid, "grid")->capture_default_str();
    sweep->add_option("--method", c.method, "closed-form or quadrature (default quadrature)");
    sweep->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
    output(sweep, "csv");

    auto* samp = app.add_subcommand("sample", "draw points from a q-Gaussian");
    params(samp);
    samp->add_option("--count", c.count, "number of points")->capture_default_str();
    samp->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    output(samp, "csv");

    auto* minimize = app.add_subcommand("minimize", "solve the constrained energy minimization");
    minimize->add_option("--n", c.n, "dimension")->capture_default_str();
    minimize->add_option("--alpha", c.alpha, "moment exponent")->capture_default_str();
    minimize->add_option("--q", c.q, "entropic index")->capture_default_str();
    minimize->add_option("--moment", c.moment, "target m_alpha")->capture_default_str();
    minimize->add_option("--nodes", c.nodes, "grid intervals")->capture_default_str();
    minimize->add_option("--init", c.init, "flat, exponential or qgaussian-detuned")->capture_default_str();
    output(minimize, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    }
    const auto* sub = app.get_subcommands().front();
    c.subcommand = sub->get_name();
    if (sub->count("--format") == 0) c.format = (c.subcommand == "sweep" || c.subcommand == "sample") ? "csv" : "json";
    if (c.subcommand == "sweep" && sub->count("--method") == 0) c.method = "quadrature";
    c.inequalities = ineqs;

    try {
        std::ofstream file;
        if (!c.out.empty()) {
            file.open(c.out, std::ios::binary);
            if (!file) throw DomainError("cannot write '" + c.out + "'");
        }
        std::ostream& os = c.out.empty() ? out : file;
        if (c.subcommand == "measures") return cmd_measures(c, os);
        if (c.subcommand == "verify") {
            const int code = cmd_verify(c, os);
            if (code == exit_violation) err << "inequality violated beyond tolerance\n";
            return code;
        }
        if (c.subcommand == "sweep") return cmd_sweep(c, os);
        if (c.subcommand == "sample") return cmd_sample(c, os);
        return cmd_minimize(c, os);
    } catch (const ValidityError& e) {
        err << "invalid input (" << e.violation() << "): " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const PreconditionError& e) {
        err << "precondition failed (" << e.bound() << "): " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const DivergenceError& e) {
        err << "divergence: " << e.what() << '\n';
        return exit_divergence;
    } catch (const ConvergenceError& e) {
        err << "no convergence: " << e.what() << '\n';
        return exit_divergence;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"qgfisher"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace qgfisher::cli
