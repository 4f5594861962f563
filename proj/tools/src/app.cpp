#include "medmarg_cli/app.hpp"

#include <ostream>

#include "CLI11.hpp"

namespace medmarg::cli {

std::string synopsis() {
    return "usage: medmarg <marginal|approx|power|estimate|verify|figures> [options]\n"
           "       medmarg --help | medmarg <subcommand> --help\n"
           "options may also come from --config FILE (key=value lines); MEDMARG_OUT_DIR sets --out-dir\n";
}

std::optional<int> parse_command_line(int argc, const char* const* argv, RunSpec& spec, std::ostream& out,
                                      std::ostream& err) {
    CLI::App app{"Median-based and mean-based marginal distribution functions", "medmarg"};
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    struct Entry {
        Subcommand cmd;
        const char* help;
    };
    const Entry commands[] = {
        {Subcommand::marginal, "evaluate marginal CDFs at points (--x) or on a grid"},
        {Subcommand::approx, "Monte Carlo approximations M1, M2, B1, B2 on a grid"},
        {Subcommand::power, "power curves of the median-, mean- and known-sigma tests"},
        {Subcommand::estimate, "location estimates from data, or a simulation study (--study)"},
        {Subcommand::verify, "check that marginals behave like distribution functions"},
        {Subcommand::figures, "write the four standard figures as SVG plus CSV"},
    };
    std::vector<std::pair<CLI::App*, Subcommand>> subs;
    for (const auto& c : commands) subs.emplace_back(app.add_subcommand(to_string(c.cmd), c.help)->fallthrough(), c.cmd);

    app.add_option("--family", spec.family, "exp | normal-var | normal-sd");
    app.add_option("--prior", spec.prior,
                   "uniform01 | exp1 | point:<v>; for power also exp-on-variance, uniform-on-variance, "
                   "exp-on-sd, uniform-on-sd");
    app.add_option("--theta", spec.theta, "location of the normal families");
    app.add_option("--kind", spec.kind, "median | mean | both")->check(CLI::IsMember({"median", "mean", "both"}));
    app.add_option("--method", spec.method, "closed-form | fast-path | quadrature | solve")
        ->check(CLI::IsMember({"", "closed-form", "fast-path", "quadrature", "solve"}));
    app.add_option("--x", spec.x, "evaluation points");
    app.add_option("--grid", spec.grid, "min:max:points");
    app.add_option("--k", spec.k, "prior draws K")->check(CLI::PositiveNumber);
    app.add_option("--l", spec.l, "conditional draws L per prior draw (0 means K)");
    app.add_option("--seed", spec.seed, "random seed");
    app.add_option("--algorithm", spec.algorithm, "m1 | m2 | b1 | b2 | all, comma-separated");
    app.add_flag("--isotonic", spec.isotonic, "project Monte Carlo curves onto non-decreasing functions");
    app.add_flag("--resample-per-x", spec.resample_per_x, "fresh prior draws at every grid point");
    app.add_option("--alpha", spec.alpha, "test size");
    app.add_option("--test", spec.test, "one-sided | mp")->check(CLI::IsMember({"one-sided", "mp"}));
    double theta1 = 0.0;
    auto* theta1_opt = app.add_option("--theta1", theta1, "alternative location for --test mp");
    app.add_option("--power-mode", spec.power_mode, "exact | mc")->check(CLI::IsMember({"exact", "mc"}));
    app.add_option("--mc-samples", spec.mc_samples, "Monte Carlo draws per power grid point")
        ->check(CLI::PositiveNumber);
    app.add_option("--sigma", spec.sigmas, "known standard deviations for the overlay tests");
    app.add_option("--data", spec.data, "observations");
    app.add_option("--data-file", spec.data_file, "file of observations (whitespace or comma separated)");
    app.add_option("--objective", spec.objective, "mean | median | both")
        ->check(CLI::IsMember({"mean", "median", "both"}));
    app.add_option("--bounds", spec.bounds, "lo:hi search interval for theta");
    app.add_option("--tol", spec.tol, "optimizer interval tolerance");
    app.add_flag("--study", spec.study, "run the simulation study instead of a single estimate");
    app.add_option("--true-theta", spec.true_theta, "location used to simulate study data");
    app.add_option("--n", spec.n, "observations per study replication");
    app.add_option("--replications", spec.replications, "study replications");
    app.add_flag("--all", spec.all_setups, "verify every built-in family/prior pair");
    app.add_option("--verify-tol", spec.verify_tol, "tolerance of the distribution-function checks");
    app.add_option("--far", spec.far, "lo:hi probes for the limit checks");
    app.add_option("--which", spec.which, "1 | 2 | 3 | 4 | all")->check(CLI::IsMember({"1", "2", "3", "4", "all"}));
    app.add_option("--out-dir", spec.out_dir, "output directory")->envname("MEDMARG_OUT_DIR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) err << synopsis();
        return code == 0 ? kExitOk : kExitUsage;
    }
    for (const auto& [sub, cmd] : subs) {
        if (sub->parsed()) spec.subcommand = cmd;
    }
    if (theta1_opt->count() > 0) spec.theta1 = theta1;
    if (auto* cfg = app.get_config_ptr(); cfg && cfg->count() > 0) spec.config_file = cfg->as<std::string>();
    return std::nullopt;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    if (auto status = parse_command_line(argc, argv, spec, out, err)) return *status;
    return run(spec, out, err);
}

}  // namespace medmarg::cli
