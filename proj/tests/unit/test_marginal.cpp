#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "medmarg/error.hpp"
#include "medmarg/marginal.hpp"
#include "medmarg/random.hpp"
#include "oracles.hpp"

using namespace medmarg;

namespace {

const std::vector<double> kClosedFormGrid = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};

struct Setup {
    std::string name;
    ConditionalFamily family;
    PriorSpec prior;
    double lo, hi;
};

std::vector<Setup> builtin_setups() {
    return {
        {"exp/uniform01", ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit(), 0.0, 20.0},
        {"exp/exp1", ConditionalFamily::exponential_rate(), PriorSpec::exponential_unit(), 0.0, 20.0},
        {"normal_var_uniform", ConditionalFamily::normal_mean_var(0.0), PriorSpec::uniform_unit(), -5.0, 5.0},
        {"normal_var_exp", ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit(), -5.0, 5.0},
    };
}

}  // namespace

TEST(MeanMarginal, QuadratureMatchesClosedForms) {
    const auto expo = ConditionalFamily::exponential_rate();
    for (double x : kClosedFormGrid) {
        EXPECT_NEAR(mean_marginal_cdf(expo, PriorSpec::uniform_unit(), x), oracle::exp_uniform_mean_cdf(x), 1e-7) << x;
        EXPECT_NEAR(mean_marginal_cdf(expo, PriorSpec::exponential_unit(), x), oracle::exp_exponential_mean_cdf(x), 1e-7) << x;
    }
    EXPECT_NEAR(mean_marginal_cdf(expo, PriorSpec::uniform_unit(), 1.0), std::exp(-1.0), 1e-8);
    EXPECT_NEAR(mean_marginal_cdf(expo, PriorSpec::uniform_unit(), 1.0), 0.36788, 1e-5);
    EXPECT_NEAR(mean_marginal_cdf(expo, PriorSpec::exponential_unit(), 1.0), 0.5, 1e-8);
}

TEST(MeanMarginal, ClosedFormMethodMatchesFormulas) {
    const auto expo = ConditionalFamily::exponential_rate();
    const auto m1 = MarginalCdf::mean_based(expo, PriorSpec::uniform_unit());
    const auto m2 = MarginalCdf::mean_based(expo, PriorSpec::exponential_unit());
    EXPECT_EQ(m1.method(), MarginalMethod::closed_form);
    for (double x : kClosedFormGrid) {
        EXPECT_NEAR(m1.cdf(x), oracle::exp_uniform_mean_cdf(x), 1e-14);
        EXPECT_NEAR(m2.cdf(x), oracle::exp_exponential_mean_cdf(x), 1e-15);
    }
    EXPECT_EQ(m2.cdf(1.0), 0.5);
}

TEST(MeanMarginal, NormalExponentialVarianceIsLaplace) {
    const auto fam = ConditionalFamily::normal_mean_var(0.0);
    const auto prior = PriorSpec::exponential_unit();
    for (double x : oracle::linspace(-4.0, 4.0, 33)) {
        EXPECT_NEAR(mean_marginal_cdf(fam, prior, x), oracle::laplace_cdf(x), 2e-8) << x;
        if (x != 0.0) EXPECT_NEAR(mean_marginal_pdf(fam, prior, x), oracle::laplace_pdf(x), 1e-7) << x;
    }
}

TEST(MeanMarginal, UniformVarianceMatchesSimpsonOracle) {
    const auto fam = ConditionalFamily::normal_mean_var(0.5);
    const auto prior = PriorSpec::uniform_unit();
    for (double x : {-2.0, -0.3, 0.5, 1.1, 3.0}) {
        // substitute nu = s^2 so the oracle integrand stays smooth at 0
        const double ref = oracle::simpson(
            [&](double s) { return s == 0.0 ? 0.0 : oracle::phi_cdf((x - 0.5) / s) * 2 * s; },
            0.0, 1.0);
        EXPECT_NEAR(mean_marginal_cdf(fam, prior, x), ref, 1e-8) << x;
    }
}

TEST(MeanMarginal, PointMassCollapsesToConditional) {
    for (const auto& fam : {ConditionalFamily::exponential_rate(), ConditionalFamily::normal_mean_var(0.3)}) {
        for (double x : oracle::linspace(-3.0, 6.0, 19)) {
            EXPECT_NEAR(mean_marginal_cdf(fam, PriorSpec::point_mass(1.7), x), fam.cdf(x, 1.7), 1e-9);
            EXPECT_NEAR(median_marginal_cdf(fam, PriorSpec::point_mass(1.7), x), fam.cdf(x, 1.7), 1e-9);
            EXPECT_NEAR(median_marginal_cdf_solve(fam, PriorSpec::point_mass(1.7), x), fam.cdf(x, 1.7), 1e-9);
        }
    }
}

TEST(MeanMarginal, ConvergenceFailureIsReported) {
    QuadratureConfig tight;
    tight.abs_tol = 1e-15;
    tight.max_subdivisions = 2;
    EXPECT_THROW(mean_marginal_cdf(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit(), 0.01,
                                   tight),
                 ConvergenceError);
}

TEST(QuadratureConfig, Validation) {
    QuadratureConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.tail_mass_cutoff = 1e-3;
    EXPECT_THROW(cfg.validate(), InvalidParameter);
    cfg = {};
    cfg.abs_tol = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidParameter);
}

TEST(MedianMarginal, ExampleValues) {
    const auto expo = ConditionalFamily::exponential_rate();
    EXPECT_NEAR(median_marginal_cdf(expo, PriorSpec::uniform_unit(), 2.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(median_marginal_cdf(expo, PriorSpec::uniform_unit(), 2.0), 0.63212, 1e-5);
    EXPECT_NEAR(median_marginal_cdf(expo, PriorSpec::exponential_unit(), 1.0), 0.5, 1e-15);
    EXPECT_EQ(median_marginal_cdf(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit(), 0.0),
              0.5);
}

TEST(MedianMarginal, AllRoutesAgreeWithClosedForms) {
    const auto expo = ConditionalFamily::exponential_rate();
    for (double x : kClosedFormGrid) {
        for (auto method : {MarginalMethod::closed_form, MarginalMethod::monotone_fast_path,
                            MarginalMethod::quantile_solve}) {
            const auto m1 = MarginalCdf::median_based(expo, PriorSpec::uniform_unit(), {}, method);
            const auto m2 = MarginalCdf::median_based(expo, PriorSpec::exponential_unit(), {}, method);
            EXPECT_NEAR(m1.cdf(x), oracle::exp_uniform_median_cdf(x), 1e-9) << to_string(method) << " x=" << x;
            EXPECT_NEAR(m2.cdf(x), oracle::exp_exponential_median_cdf(x), 1e-9) << to_string(method) << " x=" << x;
        }
    }
}

TEST(MedianMarginal, FastPathAgreesWithGenericSolveAndBruteForce) {
    for (const auto& s : builtin_setups()) {
        for (double x : oracle::linspace(s.lo + 0.05, s.hi - 0.05, 13)) {
            const double fast = median_marginal_cdf(s.family, s.prior, x);
            const double solve = median_marginal_cdf_solve(s.family, s.prior, x);
            const double brute = oracle::stratified_median(
                [&](double u) { return s.family.cdf(x, s.prior.quantile(u)); });
            EXPECT_NEAR(fast, solve, 1e-9) << s.name << " x=" << x;
            EXPECT_NEAR(fast, brute, 1e-5) << s.name << " x=" << x;
        }
    }
}

TEST(MedianMarginal, AtomAtLocationUsesLowerMedian) {
    const auto fam = ConditionalFamily::normal_mean_var(2.0);
    EXPECT_EQ(median_marginal_cdf_solve(fam, PriorSpec::exponential_unit(), 2.0), 0.5);
    EXPECT_EQ(prior_probability_at_most([&](double nu) { return fam.cdf(2.0, nu); }, PriorSpec::exponential_unit(),
                                        0.5),
              1.0);
    EXPECT_EQ(prior_probability_at_most([&](double nu) { return fam.cdf(2.0, nu); }, PriorSpec::exponential_unit(),
                                        0.4999),
              0.0);
}

TEST(MedianMarginal, LowerMedianOfNonMonotoneTransform) {
    // g(nu) = (nu - 0.5)^2 under U(0,1): P(g <= t) = 2 sqrt(t), median at t = 1/16.
    const auto g = [](double nu) { return (nu - 0.5) * (nu - 0.5); };
    EXPECT_NEAR(lower_median_of(g, PriorSpec::uniform_unit()), 1.0 / 16.0, 1e-12);
    EXPECT_NEAR(prior_probability_at_most(g, PriorSpec::uniform_unit(), 0.01), 0.2, 1e-9);
}

TEST(MedianMarginal, UnresolvableRegionThrowsUnsupported) {
    const auto wiggle = [](double nu) { return 0.5 + 0.5 * std::sin(5000.0 * nu); };
    EXPECT_THROW(lower_median_of(wiggle, PriorSpec::uniform_unit()), UnsupportedFamily);
    EXPECT_THROW(lower_median_of([](double) { return NAN; }, PriorSpec::uniform_unit()), UnsupportedFamily);
}

TEST(MedianMarginal, PushforwardConsistencyVarianceToSd) {
    const auto sd_prior = pushforward_prior(
        PriorSpec::exponential_unit(), [](double v) { return std::sqrt(v); }, [](double s) { return s * s; },
        [](double s) { return 2.0 * s; }, "exp_variance_as_sd");
    const auto var_family = ConditionalFamily::normal_mean_var(0.4);
    const auto sd_family = ConditionalFamily::normal_mean_sd(0.4);
    for (double x : oracle::linspace(-4.0, 4.0, 41)) {
        EXPECT_NEAR(median_marginal_cdf(var_family, PriorSpec::exponential_unit(), x),
                    median_marginal_cdf(sd_family, sd_prior, x), 1e-9);
        EXPECT_NEAR(mean_marginal_cdf(var_family, PriorSpec::exponential_unit(), x),
                    mean_marginal_cdf(sd_family, sd_prior, x), 5e-8);
    }
}

// Non-decreasing on a 500-point grid, and adjacent jumps bounded by the
// local slope (continuity proxy).
TEST(MedianMarginal, NonDecreasingAndContinuousOnFineGrids) {
    for (const auto& s : builtin_setups()) {
        const auto m = MarginalCdf::median_based(s.family, s.prior);
        const auto grid = oracle::linspace(s.lo, s.hi, 500);
        const double spacing = grid[1] - grid[0];
        double max_density = 0.0;
        for (double x : grid) {
            if (x > s.family.support().first) max_density = std::max(max_density, m.pdf(x));
        }
        double prev = m.cdf(grid[0]);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double v = m.cdf(grid[i]);
            EXPECT_GE(v, prev) << s.name;
            EXPECT_LT(v - prev, 10.0 * spacing * max_density) << s.name;
            prev = v;
        }
    }
}

TEST(MedianMarginal, QuantileEquationHoldsUnderMonteCarlo) {
    const std::size_t K = 100000;
    const double se = std::sqrt(0.25 / K);
    for (const auto& s : builtin_setups()) {
        const auto nu = s.prior.sample_n(5, K);
        for (double x : {s.lo + 0.5, 0.5 * (s.lo + s.hi) + 0.3, s.hi - 1.0}) {
            const double t = median_marginal_cdf(s.family, s.prior, x);
            std::size_t below = 0, above = 0;
            for (double v : nu) {
                const double y = s.family.cdf(x, v);
                below += y <= t;
                above += y >= t;
            }
            EXPECT_GE(below / double(K), 0.5 - 3 * se) << s.name << " x=" << x;
            EXPECT_GE(above / double(K), 0.5 - 3 * se) << s.name << " x=" << x;
        }
    }
}

TEST(MarginalPdf, Examples) {
    const auto expo = ConditionalFamily::exponential_rate();
    const auto unif = MarginalCdf::median_based(expo, PriorSpec::uniform_unit());
    const auto expp = MarginalCdf::median_based(expo, PriorSpec::exponential_unit());
    EXPECT_NEAR(unif.pdf(2.0), 0.5 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(unif.pdf(2.0), 0.18394, 1e-5);
    EXPECT_NEAR(expp.pdf(1.0), std::numbers::ln2 / 2.0, 1e-15);
    EXPECT_NEAR(expp.pdf(1.0), 0.34657, 1e-5);

    const auto normal = MarginalCdf::median_based(ConditionalFamily::normal_mean_var(0.7), PriorSpec::exponential_unit());
    const double sd = std::sqrt(std::numbers::ln2);
    for (double x : oracle::linspace(-3.0, 3.0, 25)) {
        EXPECT_NEAR(normal.pdf(x), oracle::phi_pdf((x - 0.7) / sd) / sd, 1e-14);
    }
}

TEST(MarginalPdf, AnalyticAndDifferencedRoutesAgree) {
    const auto expo = ConditionalFamily::exponential_rate();
    for (const auto& prior : {PriorSpec::uniform_unit(), PriorSpec::exponential_unit()}) {
        const auto closed_mean = MarginalCdf::mean_based(expo, prior);
        const auto quad_mean = MarginalCdf::mean_based(expo, prior, {}, MarginalMethod::quadrature);
        const auto closed_med = MarginalCdf::median_based(expo, prior);
        const auto solve_med = MarginalCdf::median_based(expo, prior, {}, MarginalMethod::quantile_solve);
        for (double x : {0.0005, 0.1, 0.7, 2.0, 6.0}) {
            const double h = 1e-6;
            EXPECT_NEAR(closed_mean.pdf(x), (closed_mean.cdf(x + h) - closed_mean.cdf(x - h)) / (2 * h), 1e-6) << x;
            EXPECT_NEAR(quad_mean.pdf(x), closed_mean.pdf(x), 1e-7) << x;
            EXPECT_NEAR(solve_med.pdf(x), closed_med.pdf(x), 1e-5) << x;
        }
    }
}

TEST(MarginalPdf, SupportBoundaryIsAnError) {
    const auto m = MarginalCdf::median_based(ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit());
    EXPECT_THROW(m.pdf(0.0), DomainError);
    EXPECT_EQ(m.pdf(-1.0), 0.0);
}

TEST(MarginalPdf, MeanMarginalDensityIntegratesToOne) {
    const auto m = MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::uniform_unit());
    EXPECT_NEAR(oracle::simpson([&](double x) { return m.pdf(x == 0.0 ? 1e-12 : x); }, -8.0, 8.0, 4000), 1.0, 1e-6);
}

TEST(MarginalCdfClass, QuantileInvertsCdf) {
    const std::vector<MarginalCdf> marginals = {
        MarginalCdf::mean_based(ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit()),
        MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(1.0), PriorSpec::exponential_unit()),
        MarginalCdf::median_based(ConditionalFamily::normal_mean_sd(1.0), PriorSpec::uniform_unit()),
        MarginalCdf::median_based(ConditionalFamily::exponential_rate(), PriorSpec::exponential_unit(), {},
                                  MarginalMethod::quantile_solve),
    };
    for (const auto& m : marginals) {
        for (double p : {0.01, 0.05, 0.5, 0.9}) {
            EXPECT_NEAR(m.cdf(m.quantile(p)), p, 1e-8) << m.describe();
        }
    }
}

TEST(MarginalCdfClass, MethodValidation) {
    const auto normal = ConditionalFamily::normal_mean_var(0.0);
    EXPECT_THROW(MarginalCdf::mean_based(normal, PriorSpec::uniform_unit(), {}, MarginalMethod::closed_form),
                 InvalidParameter);
    EXPECT_THROW(MarginalCdf::mean_based(normal, PriorSpec::uniform_unit(), {}, MarginalMethod::quantile_solve),
                 InvalidParameter);
    EXPECT_THROW(MarginalCdf::median_based(normal, PriorSpec::uniform_unit(), {}, MarginalMethod::quadrature),
                 InvalidParameter);
    EXPECT_EQ(MarginalCdf::median_based(normal, PriorSpec::uniform_unit()).method(),
              MarginalMethod::monotone_fast_path);
    EXPECT_THROW(MarginalCdf::median_based(ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit())
                     .at_location(1.0),
                 InvalidParameter);
}

TEST(MarginalCdfClass, AtLocationShifts) {
    const auto m = MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit());
    const auto shifted = m.at_location(-2.0);
    EXPECT_EQ(*shifted.theta(), -2.0);
    EXPECT_NEAR(shifted.cdf(-1.5), m.cdf(0.5), 1e-9);
}

TEST(MarginalCdfClass, SamplingFollowsTheMarginal) {
    const auto m = MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit());
    Rng rng = make_rng(3);
    const std::size_t n = 200000;
    std::size_t below = 0;
    for (std::size_t i = 0; i < n; ++i) below += m.sample(rng) < -1.0;
    EXPECT_NEAR(below / double(n), oracle::laplace_cdf(-1.0), 4 * std::sqrt(0.25 / n));
}

TEST(VerifyDistributionFunction, UniformPriorMedianPasses) {
    const auto m = MarginalCdf::median_based(ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit());
    const auto grid = oracle::linspace(0.0, 20.0, 201);
    const auto report = verify_distribution_function(m, grid, {-1.0, 200.0}, 1e-9);
    EXPECT_TRUE(report.monotone);
    EXPECT_TRUE(report.bounded);
    EXPECT_TRUE(report.limits);
    EXPECT_TRUE(report.all_pass());
}

TEST(VerifyDistributionFunction, ExponentialPriorMeanPassesWithFarProbe) {
    const auto m = MarginalCdf::mean_based(ConditionalFamily::exponential_rate(), PriorSpec::exponential_unit());
    const auto grid = oracle::linspace(0.0, 1000.0, 1001);
    const auto report = verify_distribution_function(m, grid, {0.0, 1e6}, 1e-5);
    EXPECT_TRUE(report.all_pass());
    EXPECT_NEAR(report.value_at_high_probe, 1.0 - 1.0 / (1e6 + 1.0), 1e-15);
}

TEST(VerifyDistributionFunction, CorruptedCurveIsFlagged) {
    const auto bad = MarginalCdf::from_curve(MarginalKind::median_based, {0, 1, 2, 3, 4}, {0.0, 0.4, 0.3, 0.8, 1.0});
    const std::vector<double> grid = {0, 1, 2, 3, 4};
    const auto report = verify_distribution_function(bad, grid, {0.0, 4.0}, 1e-9);
    EXPECT_FALSE(report.monotone);
    EXPECT_TRUE(report.bounded);
    EXPECT_TRUE(report.limits);
    EXPECT_NEAR(report.worst_violation, 0.1, 1e-12);
}

TEST(VerifyDistributionFunction, DefectiveLimitsAndBounds) {
    const std::vector<double> grid = {0.0, 1.0, 2.0};
    const auto half = verify_distribution_function([](double) { return 0.5; }, grid, {-10.0, 10.0}, 1e-6);
    EXPECT_FALSE(half.limits);
    EXPECT_NEAR(half.worst_violation, 0.5, 1e-15);
    const auto over = verify_distribution_function([](double x) { return x; }, grid, {-10.0, 10.0}, 1e-6);
    EXPECT_FALSE(over.bounded);
    const std::vector<double> unsorted = {1.0, 0.0};
    EXPECT_THROW(verify_distribution_function([](double) { return 0.0; }, unsorted, {0, 1}, 1e-6),
                 InvalidParameter);
}
