#include "medmarg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "medmarg/error.hpp"
#include "medmarg/parallel.hpp"
#include "medmarg/random.hpp"

namespace medmarg {

namespace {

constexpr std::size_t kScanPoints = 17;

MarginalCdf marginal_at(const EstimationProblem& problem, double theta) {
    const ConditionalFamily family = problem.family.with_theta(theta);
    return problem.objective == ObjectiveKind::mean_marginal
               ? MarginalCdf::mean_based(family, problem.prior, problem.quadrature)
               : MarginalCdf::median_based(family, problem.prior, problem.quadrature);
}

EstimatorSummary summarize(std::string label, std::vector<double> estimates, double truth) {
    EstimatorSummary s;
    s.label = std::move(label);
    double sum = 0.0;
    double sq = 0.0;
    for (double e : estimates) {
        if (std::isnan(e)) {
            ++s.failed;
            continue;
        }
        ++s.succeeded;
        sum += e;
        sq += (e - truth) * (e - truth);
    }
    if (s.succeeded > 0) {
        const double n = static_cast<double>(s.succeeded);
        const double mean = sum / n;
        s.bias = mean - truth;
        s.mse = sq / n;
        double var = 0.0;
        for (double e : estimates) {
            if (!std::isnan(e)) var += (e - mean) * (e - mean);
        }
        s.variance = s.succeeded > 1 ? var / (n - 1.0) : 0.0;
    } else {
        s.bias = s.variance = s.mse = std::numeric_limits<double>::quiet_NaN();
    }
    s.estimates = std::move(estimates);
    return s;
}

}  // namespace

std::string to_string(ObjectiveKind kind) {
    return kind == ObjectiveKind::mean_marginal ? "mean_marginal" : "median_marginal";
}

void EstimationProblem::validate() const {
    if (data.empty()) throw InvalidParameter("EstimationProblem: data must not be empty");
    if (!family.theta()) throw InvalidParameter("EstimationProblem: family has no location parameter");
    const auto [lo, hi] = theta_bounds;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidParameter("EstimationProblem: theta bounds must be finite and non-degenerate");
    }
    for (double x : data) {
        if (!std::isfinite(x)) throw InvalidParameter("EstimationProblem: data must be finite");
    }
    quadrature.validate();
}

ObjectiveValue log_objective(const EstimationProblem& problem, double theta) {
    const MarginalCdf marginal = marginal_at(problem, theta);
    ObjectiveValue out;
    for (double x : problem.data) {
        const double f = marginal.pdf(x);
        if (f > 0.0) {
            out.log_value += std::log(f);
        } else {
            ++out.zero_density_points;
        }
    }
    if (out.zero_density_points > 0) out.log_value = -std::numeric_limits<double>::infinity();
    return out;
}

EstimateResult estimate(const EstimationProblem& problem, double tol, std::size_t max_evaluations) {
    problem.validate();
    if (!(tol > 0.0)) throw InvalidParameter("estimate: tol must be positive");
    // Scan, two golden-section seeds, and the final evaluation at theta_hat.
    if (max_evaluations < kScanPoints + 3) {
        throw InvalidParameter("estimate: max_evaluations must be at least " + std::to_string(kScanPoints + 3));
    }
    EstimateResult result;
    auto f = [&](double theta) {
        ++result.evaluations;
        return log_objective(problem, theta).log_value;
    };

    const auto [lo, hi] = problem.theta_bounds;
    const double step = (hi - lo) / (kScanPoints - 1);
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < kScanPoints; ++j) {
        const double v = f(lo + step * static_cast<double>(j));
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    if (!(best_value > -std::numeric_limits<double>::infinity())) {
        throw NumericalError("estimate", "every candidate theta gives zero likelihood");
    }

    double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
    double b = lo + step * static_cast<double>(std::min(best + 1, kScanPoints - 1));
    const double inv_phi = 1.0 / std::numbers::phi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a >= tol) {
        if (result.evaluations + 1 >= max_evaluations) break;
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    result.converged = b - a < tol;
    result.theta_hat = 0.5 * (a + b);
    const ObjectiveValue at_hat = log_objective(problem, result.theta_hat);
    ++result.evaluations;
    result.log_objective = at_hat.log_value;
    result.zero_density_points = at_hat.zero_density_points;
    return result;
}

StudyTable simulation_study(const StudyConfig& cfg) {
    if (cfg.replications < 100) throw InvalidParameter("simulation_study: replications must be >= 100");
    if (cfg.N == 0) throw InvalidParameter("simulation_study: N must be >= 1");
    const PriorSpec analysis_prior = cfg.analysis_prior.value_or(cfg.truth.nu_prior);
    const ConditionalFamily truth_family = cfg.truth.family.with_theta(cfg.true_theta);

    StudyTable table;
    table.replications = cfg.replications;
    {
        const MarginalCdf guard_model = MarginalCdf::median_based(truth_family, analysis_prior, cfg.quadrature);
        std::vector<double> grid(201);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = cfg.true_theta - 10.0 + 0.1 * static_cast<double>(i);
        table.guard = verify_distribution_function(guard_model, grid, {cfg.true_theta - 100.0, cfg.true_theta + 100.0},
                                                   1e-6);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> mean_hat(cfg.replications, nan);
    std::vector<double> median_hat(cfg.replications, nan);
    parallel_for(cfg.replications, [&](std::size_t r) {
        Rng rng = make_rng(cfg.seed, r + 1);
        std::vector<double> data(cfg.N);
        double nu = cfg.truth.nu_prior.sample(rng);
        for (auto& x : data) {
            if (cfg.truth.draw == NuDraw::per_observation) nu = cfg.truth.nu_prior.sample(rng);
            x = truth_family.sample(rng, nu);
        }
        const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
        EstimationProblem problem{data, cfg.truth.family, analysis_prior,
                                  {*mn - cfg.bounds_margin, *mx + cfg.bounds_margin},
                                  ObjectiveKind::mean_marginal, cfg.quadrature};
        for (ObjectiveKind kind : {ObjectiveKind::mean_marginal, ObjectiveKind::median_marginal}) {
            problem.objective = kind;
            try {
                const EstimateResult res = estimate(problem, cfg.tol);
                if (res.converged) {
                    (kind == ObjectiveKind::mean_marginal ? mean_hat : median_hat)[r] = res.theta_hat;
                }
            } catch (const NumericalError&) {
                // counted as a failure through the NaN slot
            }
        }
    });

    for (std::size_t r = 0; r < cfg.replications; ++r) {
        if (!std::isnan(mean_hat[r]) && !std::isnan(median_hat[r])) {
            table.max_pair_gap = std::max(table.max_pair_gap, std::abs(mean_hat[r] - median_hat[r]));
        }
    }
    table.mean_mle = summarize("mean_marginal_mle", std::move(mean_hat), cfg.true_theta);
    table.median_mle = summarize("median_marginal_mle", std::move(median_hat), cfg.true_theta);
    return table;
}

}  // namespace medmarg
