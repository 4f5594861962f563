#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "medmarg/distributions.hpp"
#include "medmarg/error.hpp"
#include "medmarg/hypothesis.hpp"
#include "medmarg/marginal.hpp"
#include "oracles.hpp"

using namespace medmarg;

namespace {

constexpr double kZ05 = -1.6448536269514727;

MarginalCdf median_model(const PriorSpec& prior) {
    return MarginalCdf::median_based(ConditionalFamily::normal_mean_var(0.0), prior);
}

MarginalCdf mean_model(const PriorSpec& prior) {
    return MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(0.0), prior);
}

MarginalCdf standard_normal_model() { return median_model(PriorSpec::point_mass(1.0)); }

std::vector<double> fig_grid() { return oracle::linspace(-3.0, 0.0, 61); }

}  // namespace

TEST(MpTest, MedianMarginalThresholds) {
    const auto exp_test = mp_test(median_model(PriorSpec::exponential_unit()), -1.0, 0.05);
    EXPECT_NEAR(exp_test.threshold(), std::sqrt(std::numbers::ln2) * kZ05, 1e-9);
    EXPECT_NEAR(exp_test.threshold(), -1.3695, 1e-4);
    EXPECT_EQ(exp_test.variant, TestVariant::median_marginal);

    const auto unif_test = mp_test(median_model(PriorSpec::uniform_unit()), -0.5, 0.05);
    EXPECT_NEAR(unif_test.threshold(), std::sqrt(0.5) * kZ05, 1e-9);
    EXPECT_NEAR(unif_test.threshold(), -1.1631, 1e-4);
}

TEST(MpTest, HalfSizeOnSymmetricNullIsTheMedian) {
    EXPECT_NEAR(mp_test(median_model(PriorSpec::exponential_unit()), -1.0, 0.5).threshold(), 0.0, 1e-12);
}

TEST(MpTest, MeanMarginalThresholdIsNullQuantile) {
    const auto model = mean_model(PriorSpec::exponential_unit());
    const auto test = mp_test(model, -1.0, 0.05);
    EXPECT_EQ(test.variant, TestVariant::mean_marginal);
    // Exponential mixture of normal variances is Laplace with scale 1/sqrt(2).
    EXPECT_NEAR(test.threshold(), std::log(0.1) / std::sqrt(2.0), 1e-7);
    EXPECT_NEAR(oracle::laplace_cdf(test.threshold()), 0.05, 1e-8);
}

TEST(MpTest, RejectsBadAlpha) {
    const auto model = standard_normal_model();
    EXPECT_THROW(mp_test(model, -1.0, 0.0), InvalidParameter);
    EXPECT_THROW(mp_test(model, -1.0, 1.0), InvalidParameter);
    EXPECT_THROW(ump_known_sigma(0.0, 0.05), InvalidParameter);
}

TEST(MpTest, AgreesWithKnownSigmaTestForEveryAlternative) {
    const auto model = standard_normal_model();
    const auto ump = ump_known_sigma(1.0, 0.05);
    for (double mu1 : {-0.01, -0.3, -1.0, -2.0, -5.0}) {
        const auto test = mp_test([](double x) { return oracle::phi_pdf(x); },
                                  [mu1](double x) { return oracle::phi_pdf(x - mu1); }, 0.05, model, mu1);
        EXPECT_NEAR(test.threshold(), ump.threshold(), 1e-9) << mu1;
    }
}

TEST(MpTest, RightAlternativeGivesRightHalfLine) {
    const auto test = mp_test(standard_normal_model(), 1.0, 0.05);
    ASSERT_EQ(test.region.intervals().size(), 1u);
    EXPECT_NEAR(test.region.intervals()[0].lo, -kZ05, 1e-9);
    EXPECT_TRUE(std::isinf(test.region.intervals()[0].hi));
    EXPECT_THROW(test.threshold(), InvalidParameter);
}

// Scale alternative: log f1/f0 is U-shaped, so the region is two tails.
TEST(MpTest, NonMonotoneRatioGivesTwoTails) {
    const auto model = standard_normal_model();
    const auto test = mp_test([](double x) { return oracle::phi_pdf(x); },
                              [](double x) { return oracle::phi_pdf(x / 2.0) / 2.0; }, 0.05, model);
    const auto ivs = test.region.intervals();
    ASSERT_EQ(ivs.size(), 2u);
    EXPECT_NEAR(ivs[0].hi, -1.959963984540054, 1e-5);
    EXPECT_NEAR(ivs[1].lo, 1.959963984540054, 1e-5);
    EXPECT_NEAR(test.region.probability([](double x) { return oracle::phi_cdf(x); }), 0.05, 1e-6);
    ASSERT_TRUE(test.ratio_threshold.has_value());
}

// A two-valued ratio only admits regions of null mass 0, ~0.683, or 1.
TEST(MpTest, UnattainableSizeIsReported) {
    const double norm = 0.5 + 0.5 * (2.0 * oracle::phi_cdf(1.0) - 1.0);
    auto f1 = [norm](double x) { return oracle::phi_pdf(x) * (std::abs(x) < 1.0 ? 1.0 : 0.5) / norm; };
    EXPECT_THROW(mp_test([](double x) { return oracle::phi_pdf(x); }, f1, 0.05, standard_normal_model()),
                 CalibrationError);
}

TEST(UmpKnownSigma, Thresholds) {
    EXPECT_NEAR(ump_known_sigma(1.0, 0.05).threshold(), kZ05, 1e-12);
    EXPECT_NEAR(ump_known_sigma(1.0, 0.05).threshold(), -1.6449, 1e-4);
    EXPECT_NEAR(ump_known_sigma(0.4, 0.05).threshold(), 0.4 * kZ05, 1e-12);
    EXPECT_NEAR(ump_known_sigma(0.4, 0.05).threshold(), -0.65794, 1e-5);
    EXPECT_NEAR(ump_known_sigma(1.0, 0.5).threshold(), 0.0, 1e-15);
    EXPECT_TRUE(ump_known_sigma(1.0, 0.05).rejects(-2.0));
    EXPECT_FALSE(ump_known_sigma(1.0, 0.05).rejects(-1.0));
}

TEST(PowerCurve, ExactValues) {
    const std::vector<double> mu = {-2.0};
    const auto ump = power_curve(ump_known_sigma(1.0, 0.05), mu, PowerMode::exact);
    EXPECT_NEAR(ump.power[0], oracle::phi_cdf(kZ05 + 2.0), 1e-12);
    EXPECT_NEAR(ump.power[0], 0.6388, 1e-4);

    const auto med = power_curve(one_sided_test(median_model(PriorSpec::exponential_unit()), 0.05), mu,
                                 PowerMode::exact);
    EXPECT_NEAR(med.power[0], oracle::phi_cdf(kZ05 + 2.0 / std::sqrt(std::numbers::ln2)), 1e-10);
    EXPECT_NEAR(med.power[0], 0.7756, 1e-4);
}

TEST(PowerCurve, SizeUnderMonteCarlo) {
    const std::vector<double> zero = {0.0};
    for (const auto& test : {one_sided_test(median_model(PriorSpec::exponential_unit()), 0.05),
                             one_sided_test(mean_model(PriorSpec::exponential_unit()), 0.05),
                             ump_known_sigma(0.4, 0.05), ump_known_sigma(1.0, 0.05)}) {
        const auto curve = power_curve(test, zero, PowerMode::monte_carlo, 1000000, 5);
        EXPECT_NEAR(curve.power[0], 0.05, 0.005) << to_string(test.variant);
        EXPECT_GT(curve.std_error[0], 0.0);
    }
}

TEST(PowerCurve, ExactPowerIsNonIncreasingInMu) {
    for (const auto& test : {one_sided_test(median_model(PriorSpec::uniform_unit()), 0.05),
                             one_sided_test(mean_model(PriorSpec::exponential_unit()), 0.05),
                             ump_known_sigma(0.4, 0.05)}) {
        const auto grid = fig_grid();
        const auto curve = power_curve(test, grid, PowerMode::exact);
        for (std::size_t i = 1; i < curve.power.size(); ++i) EXPECT_LE(curve.power[i], curve.power[i - 1]);
        EXPECT_NEAR(curve.power.back(), 0.05, 1e-9);
        for (double p : curve.power) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
        }
    }
}

TEST(PowerCurve, MonteCarloIsReproducible) {
    const auto test = one_sided_test(median_model(PriorSpec::exponential_unit()), 0.05);
    const std::vector<double> grid = {-2.0, -1.0};
    const auto a = power_curve(test, grid, PowerMode::monte_carlo, 5000, 3);
    const auto b = power_curve(test, grid, PowerMode::monte_carlo, 5000, 3);
    EXPECT_EQ(a.power, b.power);
    EXPECT_THROW(power_curve(test, grid, PowerMode::monte_carlo, 0, 3), InvalidParameter);
    EXPECT_THROW(power_curve(test, std::vector<double>{}, PowerMode::exact), InvalidParameter);
}

// Regions of the same null size built from other quantile splits never beat
// the Neyman-Pearson half-line under the alternative.
TEST(PowerCurve, NeymanPearsonBeatsSizeMatchedAlternatives) {
    const auto model = median_model(PriorSpec::exponential_unit());
    const double alpha = 0.05;
    for (double theta1 : {-0.5, -1.0, -2.0}) {
        const auto best = mp_test(model, theta1, alpha);
        const auto alt = model.at_location(theta1);
        auto alt_cdf = [&](double x) { return alt.cdf(x); };
        const double best_power = best.region.probability(alt_cdf);
        for (int j = 1; j <= 20; ++j) {
            RejectRegion region;
            if (j <= 10) {
                const double left = alpha * (1.0 - j / 11.0);
                region = RejectRegion({{-INFINITY, model.quantile(left)},
                                       {model.quantile(1.0 - (alpha - left)), INFINITY}});
            } else {
                const double start = 0.9 * (j - 10) / 10.0 * (1.0 - alpha);
                region = RejectRegion({{model.quantile(start), model.quantile(start + alpha)}});
            }
            EXPECT_NEAR(region.probability([&](double x) { return model.cdf(x); }), alpha, 1e-9);
            EXPECT_GE(best_power, region.probability(alt_cdf)) << theta1 << " " << region.describe();
        }
    }
}

TEST(ComparePower, SelfComparisonIsTie) {
    const auto grid = fig_grid();
    const auto curve = power_curve(ump_known_sigma(1.0, 0.05), grid, PowerMode::exact);
    const auto report = compare_power(curve, curve);
    EXPECT_EQ(report.verdict, DominanceVerdict::tie);
    for (double d : report.difference) EXPECT_EQ(d, 0.0);
}

TEST(ComparePower, MedianBeatsMeanForExponentialVariancePrior) {
    const auto grid = fig_grid();
    const auto med = power_curve(one_sided_test(median_model(PriorSpec::exponential_unit()), 0.05), grid,
                                 PowerMode::exact);
    const auto mean = power_curve(one_sided_test(mean_model(PriorSpec::exponential_unit()), 0.05), grid,
                                  PowerMode::exact);
    const auto report = compare_power(med, mean);
    EXPECT_EQ(report.verdict, DominanceVerdict::a_dominates);
    EXPECT_EQ(report.a_better_count, grid.size() - 1);
    EXPECT_EQ(compare_power(mean, med).verdict, DominanceVerdict::b_dominates);
}

TEST(ComparePower, CrossingAndGridMismatch) {
    PowerCurve a{{0, 1}, {0.5, 0.1}, {0, 0}, "a", PowerMode::exact, 0};
    PowerCurve b{{0, 1}, {0.1, 0.5}, {0, 0}, "b", PowerMode::exact, 0};
    EXPECT_EQ(compare_power(a, b).verdict, DominanceVerdict::crossing);
    PowerCurve c{{0, 2}, {0.1, 0.5}, {0, 0}, "c", PowerMode::exact, 0};
    EXPECT_THROW(compare_power(a, c), InvalidParameter);
}

TEST(ComparePower, MonteCarloNoiseIsNotABetterCurve) {
    const auto test = ump_known_sigma(1.0, 0.05);
    const std::vector<double> grid = {-1.0, -0.5};
    const auto a = power_curve(test, grid, PowerMode::monte_carlo, 20000, 1);
    const auto b = power_curve(test, grid, PowerMode::monte_carlo, 20000, 2);
    EXPECT_EQ(compare_power(a, b).verdict, DominanceVerdict::tie);
}

TEST(RejectRegion, Construction) {
    EXPECT_THROW(RejectRegion({{1.0, 0.0}}), InvalidParameter);
    EXPECT_THROW(RejectRegion({{0.0, 2.0}, {1.0, 3.0}}), InvalidParameter);
    const auto r = RejectRegion::left_half_line(-1.0);
    EXPECT_TRUE(r.contains(-2.0));
    EXPECT_FALSE(r.contains(-1.0));
    EXPECT_EQ(*r.left_threshold(), -1.0);
    EXPECT_FALSE(RejectRegion::right_half_line(1.0).left_threshold().has_value());
}
