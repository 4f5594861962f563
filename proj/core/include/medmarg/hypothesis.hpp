#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medmarg/marginal.hpp"

namespace medmarg {

enum class TestVariant { median_marginal, mean_marginal, known_sigma };

std::string to_string(TestVariant variant);

// Open interval; either end may be infinite.
struct Interval {
    double lo;
    double hi;
};

// Union of disjoint, ascending intervals where H0 is rejected.
class RejectRegion {
public:
    RejectRegion() = default;
    explicit RejectRegion(std::vector<Interval> intervals);
    static RejectRegion left_half_line(double c);
    static RejectRegion right_half_line(double c);

    bool contains(double x) const noexcept;
    std::span<const Interval> intervals() const noexcept { return intervals_; }
    // c when the region is exactly (-inf, c).
    std::optional<double> left_threshold() const noexcept;
    // Probability of the region under a distribution with the given CDF.
    double probability(const std::function<double(double)>& cdf) const;
    std::string describe() const;

private:
    std::vector<Interval> intervals_;
};

// Calibrated simple-vs-simple (or one-sided) test on a single observation.
struct SimpleHypothesisTest {
    double theta0 = 0.0;
    std::optional<double> theta1;
    double alpha = 0.05;
    RejectRegion region;
    TestVariant variant = TestVariant::median_marginal;
    // Null-hypothesis model for the marginal variants.
    std::optional<MarginalCdf> model;
    // Known standard deviation for the known_sigma variant.
    std::optional<double> sigma;
    // k of the rule f1 > k f0 when the region was found as a level set.
    std::optional<double> ratio_threshold;

    // Left threshold c; throws InvalidParameter when the region is not (-inf, c).
    double threshold() const;
    bool rejects(double x) const noexcept { return region.contains(x); }
};

using Density = std::function<double(double)>;

// Neyman-Pearson test: reject when f1(x) > k f0(x), with k set so the region
// has probability alpha under null_model. A likelihood ratio monotone in x
// yields a half-line with c taken straight from the null quantile; otherwise
// the level set {f1 > k f0} is traced numerically. Throws CalibrationError
// when no k reaches size alpha without randomization.
SimpleHypothesisTest mp_test(const Density& f0, const Density& f1, double alpha, const MarginalCdf& null_model,
                             std::optional<double> theta1 = std::nullopt);

// mp_test with f0, f1 the null model's density at its own location and at theta1.
SimpleHypothesisTest mp_test(const MarginalCdf& null_model, double theta1, double alpha);

// One-sided location test H0: theta = theta0 vs H1: theta < theta0 that
// rejects for x < c, c the alpha-quantile of the null model.
SimpleHypothesisTest one_sided_test(const MarginalCdf& null_model, double alpha);

// Known-sigma normal test: reject iff (x - theta0) / sigma < z_alpha.
SimpleHypothesisTest ump_known_sigma(double sigma, double alpha, double theta0 = 0.0);

enum class PowerMode { exact, monte_carlo };

struct PowerCurve {
    std::vector<double> mu_grid;
    std::vector<double> power;
    // Binomial standard error per point; zeros in exact mode.
    std::vector<double> std_error;
    std::string label;
    PowerMode mode = PowerMode::exact;
    std::size_t mc_samples = 0;
};

// Power of `test` with X drawn from the test's own model moved to each mu
// (N(mu, sigma^2) for known_sigma). Monte Carlo point i uses substream i+1 of seed.
PowerCurve power_curve(const SimpleHypothesisTest& test, std::span<const double> mu_grid, PowerMode mode,
                       std::size_t mc_samples = 0, std::uint64_t seed = 0);

enum class DominanceVerdict { a_dominates, b_dominates, crossing, tie };

std::string to_string(DominanceVerdict verdict);

struct DominanceReport {
    std::vector<double> difference;     // a - b per grid point
    std::vector<double> noise_margin;   // z * combined standard error (or a tiny floor in exact mode)
    std::vector<bool> a_better;
    std::vector<bool> b_better;
    std::size_t a_better_count = 0;
    std::size_t b_better_count = 0;
    DominanceVerdict verdict = DominanceVerdict::tie;
};

// Point-wise comparison; differences within z standard errors count for neither side.
DominanceReport compare_power(const PowerCurve& a, const PowerCurve& b, double z = 3.0);

}  // namespace medmarg
