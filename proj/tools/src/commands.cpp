#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "medmarg/medmarg.hpp"
#include "medmarg_cli/app.hpp"
#include "medmarg_cli/csv.hpp"
#include "medmarg_cli/svg.hpp"

namespace medmarg::cli {

namespace {

struct Setup {
    std::string name;
    ConditionalFamily family;
    PriorSpec prior;
};

ConditionalFamily family_by_name(const std::string& name, double theta) {
    if (name == "exp") return ConditionalFamily::exponential_rate();
    if (name == "normal-var") return ConditionalFamily::normal_mean_var(theta);
    if (name == "normal-sd") return ConditionalFamily::normal_mean_sd(theta);
    throw UsageError("unknown family '" + name + "' (expected exp, normal-var or normal-sd)");
}

PriorSpec prior_by_name(const std::string& name) {
    if (name == "uniform01") return PriorSpec::uniform_unit();
    if (name == "exp1") return PriorSpec::exponential_unit();
    if (name.rfind("point:", 0) == 0) {
        const std::string loc = name.substr(6);
        char* end = nullptr;
        const double v = std::strtod(loc.c_str(), &end);
        if (loc.empty() || *end != '\0') throw UsageError("bad point-mass location in '" + name + "'");
        return PriorSpec::point_mass(v);
    }
    throw UsageError("unknown prior '" + name + "' (expected uniform01, exp1 or point:<v>)");
}

// Named normal-location setups with a prior on the variance or on the standard deviation.
std::optional<Setup> named_setup(const std::string& name) {
    if (name == "exp-on-variance") return Setup{name, ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit()};
    if (name == "uniform-on-variance") return Setup{name, ConditionalFamily::normal_mean_var(0.0), PriorSpec::uniform_unit()};
    if (name == "exp-on-sd") return Setup{name, ConditionalFamily::normal_mean_sd(0.0), PriorSpec::exponential_unit()};
    if (name == "uniform-on-sd") return Setup{name, ConditionalFamily::normal_mean_sd(0.0), PriorSpec::uniform_unit()};
    return std::nullopt;
}

std::optional<MarginalMethod> method_by_name(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name == "closed-form") return MarginalMethod::closed_form;
    if (name == "fast-path") return MarginalMethod::monotone_fast_path;
    if (name == "quadrature") return MarginalMethod::quadrature;
    if (name == "solve") return MarginalMethod::quantile_solve;
    throw UsageError("unknown method '" + name + "'");
}

std::vector<std::string> kinds_of(const std::string& kind) {
    if (kind == "both") return {"median", "mean"};
    return {kind};
}

MarginalCdf make_marginal(const std::string& kind, const ConditionalFamily& family, const PriorSpec& prior,
                          const std::string& method) {
    if (kind == "median") return MarginalCdf::median_based(family, prior, {}, method_by_name(method));
    return MarginalCdf::mean_based(family, prior, {}, method_by_name(method));
}

std::string default_grid(const RunSpec& s) {
    if (s.subcommand == Subcommand::power) return "-3:0:61";
    const bool exp = s.family == "exp";
    if (s.subcommand == Subcommand::verify) return exp ? "0:20:500" : "-5:5:500";
    return exp ? "0:10:201" : "-5:5:201";
}

RunSpec with_defaults(RunSpec s) {
    if (s.family.empty()) {
        const auto setup = named_setup(s.prior);
        if (setup) {
            s.family = setup->family.id() == FamilyId::normal_mean_sd ? "normal-sd" : "normal-var";
        } else {
            s.family = s.subcommand == Subcommand::estimate || s.subcommand == Subcommand::power ? "normal-var" : "exp";
        }
    }
    if (s.subcommand == Subcommand::power && s.prior == "uniform01" && s.family == "normal-var") {
        s.prior = "exp-on-variance";
    }
    if (s.grid.empty() && s.subcommand != Subcommand::figures) s.grid = default_grid(s);
    if (s.far.empty() && s.subcommand == Subcommand::verify) s.far = s.family == "exp" ? "-1:1e9" : "-1e9:1e9";
    return s;
}

Setup resolve_setup(const RunSpec& s) {
    if (auto named = named_setup(s.prior)) {
        if (s.theta != 0.0) named->family = named->family.with_theta(s.theta);
        return *named;
    }
    return {s.family + "/" + s.prior, family_by_name(s.family, s.theta), prior_by_name(s.prior)};
}

class Writer {
public:
    Writer(const RunSpec& spec, std::ostream& out) : spec_(spec), out_(out) {
        std::error_code ec;
        std::filesystem::create_directories(spec.out_dir, ec);
        if (ec || !std::filesystem::is_directory(spec.out_dir)) {
            throw UsageError("output directory '" + spec.out_dir + "' is not usable");
        }
    }

    Table table(std::vector<std::string> columns, const std::vector<std::vector<double>>& data) const {
        return Table::numeric(spec_.header_lines(), std::move(columns), data);
    }

    void csv(const std::string& name, const Table& t) const { write(name, to_csv(t)); }

    void svg(const std::string& name, const std::vector<Panel>& panels) const {
        write(name, render_svg(panels, spec_.header_lines()));
    }

private:
    void write(const std::string& name, const std::string& text) const {
        const std::string path = (std::filesystem::path(spec_.out_dir) / name).string();
        write_text_file(path, text);
        out_ << "wrote " << path << '\n';
    }

    const RunSpec& spec_;
    std::ostream& out_;
};

std::string six(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<double> curve(const MarginalCdf& m, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = m.cdf(xs[i]);
    return out;
}

// ---------------------------------------------------------------------------

int cmd_marginal(const RunSpec& s, std::ostream& out) {
    const auto setup = resolve_setup(s);
    std::vector<std::pair<std::string, MarginalCdf>> models;
    for (const auto& kind : kinds_of(s.kind)) models.emplace_back(kind, make_marginal(kind, setup.family, setup.prior, s.method));

    if (!s.x.empty()) {
        for (double x : s.x) {
            if (models.size() == 1) {
                out << six(models[0].second.cdf(x)) << '\n';
            } else {
                out << "x=" << format_number(x);
                for (const auto& [kind, m] : models) out << ' ' << kind << '=' << six(m.cdf(x));
                out << '\n';
            }
        }
        return kExitOk;
    }

    const Writer w(s, out);
    const auto xs = GridSpec::parse(s.grid).values();
    std::vector<Table> tables;
    for (const auto& [kind, m] : models) {
        tables.push_back(w.table({"x", kind}, {xs, curve(m, xs)}));
        w.csv("marginal_" + kind + ".csv", tables.back());
    }
    w.svg("marginal.svg", {panel_from_tables(setup.name, "x", "F(x)", tables)});
    return kExitOk;
}

std::vector<McAlgorithm> algorithms_of(const std::string& text) {
    if (text == "all") return {McAlgorithm::M1, McAlgorithm::M2, McAlgorithm::B1, McAlgorithm::B2};
    std::vector<McAlgorithm> out;
    std::istringstream is(text);
    std::string name;
    while (std::getline(is, name, ',')) {
        if (name == "m1") out.push_back(McAlgorithm::M1);
        else if (name == "m2") out.push_back(McAlgorithm::M2);
        else if (name == "b1") out.push_back(McAlgorithm::B1);
        else if (name == "b2") out.push_back(McAlgorithm::B2);
        else throw UsageError("unknown algorithm '" + name + "' (expected m1, m2, b1, b2 or all)");
    }
    if (out.empty()) throw UsageError("no algorithm selected");
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

McConfig mc_config(const RunSpec& s, std::vector<double> xs) {
    McConfig cfg;
    cfg.K = s.k;
    cfg.L = s.l;
    cfg.seed = s.seed;
    cfg.x_grid = std::move(xs);
    cfg.resample_per_x = s.resample_per_x;
    cfg.isotonic = s.isotonic;
    return cfg;
}

int cmd_approx(const RunSpec& s, std::ostream& out) {
    const auto setup = resolve_setup(s);
    const auto xs = GridSpec::parse(s.grid).values();
    const auto algs = algorithms_of(s.algorithm);
    const McConfig cfg = mc_config(s, xs);
    const Writer w(s, out);

    std::vector<Table> tables;
    bool need_median = false, need_mean = false;
    for (auto alg : algs) {
        const auto c = approximate(alg, setup.family, setup.prior, cfg);
        const std::string name = lower(to_string(alg));
        tables.push_back(w.table({"x", name}, {c.x_grid, c.values}));
        w.csv("approx_" + name + ".csv", tables.back());
        (alg == McAlgorithm::M1 || alg == McAlgorithm::M2 ? need_median : need_mean) = true;
    }
    for (const auto& [kind, needed] : {std::pair{std::string("median"), need_median}, std::pair{std::string("mean"), need_mean}}) {
        if (!needed) continue;
        const auto m = make_marginal(kind, setup.family, setup.prior, s.method);
        tables.push_back(w.table({"x", "exact_" + kind}, {xs, curve(m, xs)}));
        w.csv("approx_exact_" + kind + ".csv", tables.back());
    }
    w.svg("approx.svg", {panel_from_tables(setup.name + " (K=" + std::to_string(s.k) + ")", "x", "F(x)", tables)});
    return kExitOk;
}

struct PowerTables {
    Table power;
    std::optional<Table> std_error;
    std::vector<std::string> notes;
};

PowerTables power_tables(const RunSpec& s, const Setup& setup, const std::vector<double>& mu, const Writer& w) {
    const PowerMode mode = s.power_mode == "mc" ? PowerMode::monte_carlo : PowerMode::exact;
    std::vector<std::pair<std::string, SimpleHypothesisTest>> tests;
    for (const auto& kind : {std::string("median"), std::string("mean")}) {
        const auto model = make_marginal(kind, setup.family, setup.prior, s.method);
        if (s.test == "mp") {
            if (!s.theta1) throw UsageError("--test mp needs --theta1");
            tests.emplace_back(kind, mp_test(model, *s.theta1, s.alpha));
        } else {
            tests.emplace_back(kind, one_sided_test(model, s.alpha));
        }
    }
    for (double sigma : s.sigmas) {
        tests.emplace_back("known_sigma_" + format_number(sigma), ump_known_sigma(sigma, s.alpha, setup.family.theta().value_or(0.0)));
    }

    PowerTables result;
    std::vector<std::string> columns = {"mu"}, se_columns = {"mu"};
    std::vector<std::vector<double>> power = {mu}, se = {mu};
    for (const auto& [name, test] : tests) {
        const auto c = power_curve(test, mu, mode, s.mc_samples, s.seed);
        columns.push_back("power_" + name);
        se_columns.push_back("se_" + name);
        power.push_back(c.power);
        se.push_back(c.std_error);
        result.notes.push_back(setup.name + " " + name + " reject region " + test.region.describe());
    }
    result.power = w.table(columns, power);
    if (mode == PowerMode::monte_carlo) result.std_error = w.table(se_columns, se);
    return result;
}

int cmd_power(const RunSpec& s, std::ostream& out) {
    const auto setup = resolve_setup(s);
    const auto mu = GridSpec::parse(s.grid).values();
    const Writer w(s, out);
    const auto t = power_tables(s, setup, mu, w);
    for (const auto& note : t.notes) out << note << '\n';
    w.csv("power.csv", t.power);
    if (t.std_error) w.csv("power_stderr.csv", *t.std_error);
    w.svg("power.svg", {panel_from_tables(setup.name + ", alpha=" + format_number(s.alpha), "mu", "power", {t.power})});
    return kExitOk;
}

std::vector<double> read_data_file(const std::string& path) {
    std::istringstream is(read_text_file(path));
    std::vector<double> out;
    std::string line;
    while (std::getline(is, line)) {
        line = line.substr(0, line.find('#'));
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (*end != '\0') throw UsageError("non-numeric value '" + tok + "' in " + path);
            out.push_back(v);
        }
    }
    return out;
}

std::vector<ObjectiveKind> objectives_of(const std::string& text) {
    if (text == "mean") return {ObjectiveKind::mean_marginal};
    if (text == "median") return {ObjectiveKind::median_marginal};
    return {ObjectiveKind::mean_marginal, ObjectiveKind::median_marginal};
}

int cmd_study(const RunSpec& s, const Setup& setup, std::ostream& out) {
    const StudyConfig cfg{.true_theta = s.true_theta,
                          .truth = {setup.family, setup.prior, NuDraw::per_observation},
                          .analysis_prior = std::nullopt,
                          .N = s.n,
                          .replications = s.replications,
                          .seed = s.seed,
                          .tol = s.tol};
    const auto table = simulation_study(cfg);
    const Writer w(s, out);

    std::vector<double> index(table.replications);
    for (std::size_t r = 0; r < index.size(); ++r) index[r] = static_cast<double>(r);
    w.csv("study_estimates.csv",
          w.table({"replication", "mean_mle", "median_mle"}, {index, table.mean_mle.estimates, table.median_mle.estimates}));

    Table summary = w.table({"estimator", "bias", "variance", "mse", "succeeded", "failed"}, {{}, {}, {}, {}, {}, {}});
    for (const auto* e : {&table.mean_mle, &table.median_mle}) {
        summary.rows.push_back({e->label, format_number(e->bias), format_number(e->variance), format_number(e->mse),
                                std::to_string(e->succeeded), std::to_string(e->failed)});
        out << e->label << ": bias=" << format_number(e->bias) << " variance=" << format_number(e->variance)
            << " mse=" << format_number(e->mse) << " failed=" << e->failed << '\n';
    }
    w.csv("study_summary.csv", summary);
    out << "max_pair_gap=" << format_number(table.max_pair_gap) << '\n';
    out << "guard: " << (table.guard.all_pass() ? "PASS" : "FAIL") << '\n';
    if (!table.guard.all_pass()) throw NumericalError("simulation_study", "median marginal failed the distribution-function guard");
    return kExitOk;
}

int cmd_estimate(const RunSpec& s, std::ostream& out) {
    const auto setup = resolve_setup(s);
    if (s.study) return cmd_study(s, setup, out);

    std::vector<double> data = s.data;
    if (!s.data_file.empty()) {
        const auto more = read_data_file(s.data_file);
        data.insert(data.end(), more.begin(), more.end());
    }
    if (data.empty()) throw UsageError("estimate needs --data, --data-file or --study");
    std::pair<double, double> bounds;
    if (!s.bounds.empty()) {
        bounds = parse_range(s.bounds);
    } else {
        const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
        const double pad = std::max(1.0, *hi - *lo);
        bounds = {*lo - pad, *hi + pad};
    }

    const Writer w(s, out);
    Table t = w.table({"objective", "theta_hat", "log_objective", "evaluations", "converged", "zero_density_points"},
                      {{}, {}, {}, {}, {}, {}});
    bool all_converged = true;
    for (auto kind : objectives_of(s.objective)) {
        const EstimationProblem problem{data, setup.family, setup.prior, bounds, kind, {}};
        const auto r = estimate(problem, s.tol);
        t.rows.push_back({to_string(kind), format_number(r.theta_hat), format_number(r.log_objective),
                          std::to_string(r.evaluations), r.converged ? "true" : "false",
                          std::to_string(r.zero_density_points)});
        out << to_string(kind) << ": theta_hat=" << format_number(r.theta_hat)
            << " log_objective=" << format_number(r.log_objective) << " converged=" << (r.converged ? "true" : "false")
            << '\n';
        all_converged = all_converged && r.converged;
    }
    w.csv("estimate.csv", t);
    if (!all_converged) throw ConvergenceError("estimate", "evaluation budget exhausted before reaching --tol");
    return kExitOk;
}

std::vector<Setup> verify_setups(const RunSpec& s) {
    if (!s.all_setups) return {resolve_setup(s)};
    return {
        {"exp/uniform01", ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit()},
        {"exp/exp1", ConditionalFamily::exponential_rate(), PriorSpec::exponential_unit()},
        {"normal-var/uniform01", ConditionalFamily::normal_mean_var(0.0), PriorSpec::uniform_unit()},
        {"normal-var/exp1", ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit()},
    };
}

int cmd_verify(const RunSpec& s, std::ostream& out) {
    const Writer w(s, out);
    Table t = w.table({"setup", "kind", "monotone", "bounded", "limits", "continuity", "worst_violation"},
                      {{}, {}, {}, {}, {}, {}, {}});
    auto flag = [](bool ok) { return std::string(ok ? "PASS" : "FAIL"); };
    bool all_pass = true;
    for (const auto& setup : verify_setups(s)) {
        RunSpec local = s;
        local.family = setup.family.id() == FamilyId::exponential_rate ? "exp" : "normal-var";
        const auto xs = GridSpec::parse(s.all_setups ? default_grid(local) : s.grid).values();
        const auto far = parse_range(s.all_setups ? (local.family == "exp" ? "-1:1e9" : "-1e9:1e9") : s.far);
        for (const auto& kind : kinds_of(s.kind)) {
            const auto m = make_marginal(kind, setup.family, setup.prior, s.method);
            const auto report = verify_distribution_function(m, xs, far, s.verify_tol);
            // Jump proxy: no grid increment above ten times spacing times the largest density.
            double max_density = 0.0, max_jump = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (xs[i] > setup.family.support().first) max_density = std::max(max_density, m.pdf(xs[i]));
                if (i > 0) max_jump = std::max(max_jump, m.cdf(xs[i]) - m.cdf(xs[i - 1]));
            }
            const bool continuity = max_jump <= 10.0 * (xs[1] - xs[0]) * max_density;
            const bool ok = report.all_pass() && continuity;
            all_pass = all_pass && ok;
            t.rows.push_back({setup.name, kind, flag(report.monotone), flag(report.bounded), flag(report.limits),
                              flag(continuity), format_number(report.worst_violation)});
            out << setup.name << ' ' << kind << ": monotone=" << flag(report.monotone)
                << " bounded=" << flag(report.bounded) << " limits=" << flag(report.limits)
                << " continuity=" << flag(continuity) << " worst_violation=" << format_number(report.worst_violation)
                << '\n';
        }
    }
    w.csv("verify.csv", t);
    out << "verify: " << (all_pass ? "all-pass" : "FAIL") << '\n';
    return all_pass ? kExitOk : kExitNumerical;
}

void figure_cdf(const RunSpec& s, const Writer& w, int index, const PriorSpec& prior, const std::string& title) {
    const auto family = ConditionalFamily::exponential_rate();
    const auto xs = GridSpec{0.0, 10.0, 201}.values();
    const std::string stem = "fig" + std::to_string(index) + "_";
    const McConfig cfg = mc_config(s, xs);
    const std::vector<std::pair<std::string, std::vector<double>>> curves = {
        {"exact_median", curve(MarginalCdf::median_based(family, prior), xs)},
        {"exact_mean", curve(MarginalCdf::mean_based(family, prior), xs)},
        {"m1", algorithm_m1(family, prior, cfg).values},
        {"b1", algorithm_b1(family, prior, cfg).values},
    };
    std::vector<Table> tables;
    for (const auto& [name, values] : curves) {
        tables.push_back(w.table({"x", name}, {xs, values}));
        w.csv(stem + name + ".csv", tables.back());
    }
    w.svg("fig" + std::to_string(index) + ".svg",
          {panel_from_tables(title + " (K=" + std::to_string(s.k) + ")", "x", "F(x)", tables)});
}

void figure_power(const RunSpec& s, const Writer& w, int index, const std::string& uniform_setup,
                  const std::string& exp_setup, const std::string& parameter, std::ostream& out) {
    const auto mu = GridSpec{-3.0, 0.0, 61}.values();
    const std::string stem = "fig" + std::to_string(index) + "_";
    std::vector<Panel> panels;
    for (const auto& [label, setup_name] : {std::pair{std::string("uniform"), uniform_setup}, std::pair{std::string("exponential"), exp_setup}}) {
        const auto t = power_tables(s, *named_setup(setup_name), mu, w);
        for (const auto& note : t.notes) out << note << '\n';
        w.csv(stem + label + ".csv", t.power);
        if (t.std_error) w.csv(stem + label + "_stderr.csv", *t.std_error);
        panels.push_back(panel_from_tables(label + " prior on " + parameter, "mu", "power", {t.power}));
    }
    w.svg("fig" + std::to_string(index) + ".svg", panels);
}

int cmd_figures(const RunSpec& s, std::ostream& out) {
    const Writer w(s, out);
    auto want = [&](int i) { return s.which == "all" || s.which == std::to_string(i); };
    if (want(1)) figure_cdf(s, w, 1, PriorSpec::uniform_unit(), "exponential rate, uniform(0,1] prior");
    if (want(2)) figure_cdf(s, w, 2, PriorSpec::exponential_unit(), "exponential rate, exponential(1) prior");
    if (want(3)) figure_power(s, w, 3, "uniform-on-variance", "exp-on-variance", "variance", out);
    if (want(4)) figure_power(s, w, 4, "uniform-on-sd", "exp-on-sd", "standard deviation", out);
    return kExitOk;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        const RunSpec s = with_defaults(spec);
        switch (s.subcommand) {
            case Subcommand::marginal: return cmd_marginal(s, out);
            case Subcommand::approx: return cmd_approx(s, out);
            case Subcommand::power: return cmd_power(s, out);
            case Subcommand::estimate: return cmd_estimate(s, out);
            case Subcommand::verify: return cmd_verify(s, out);
            case Subcommand::figures: return cmd_figures(s, out);
        }
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n' << synopsis();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace medmarg::cli
