#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medmarg/distributions.hpp"
#include "medmarg/random.hpp"

namespace medmarg {

struct QuadratureConfig {
    double abs_tol = 1e-8;
    std::size_t max_subdivisions = 2000;
    // Unbounded prior supports are cut where the remaining prior mass is
    // below this value.
    double tail_mass_cutoff = 1e-10;

    void validate() const;
};

enum class MarginalKind { mean_based, median_based };

enum class MarginalMethod { closed_form, monotone_fast_path, quadrature, quantile_solve, monte_carlo_curve };

std::string to_string(MarginalKind kind);
std::string to_string(MarginalMethod method);

// Total-probability marginal: integral of F(x|nu) pi(nu) dnu.
double mean_marginal_cdf(const ConditionalFamily& family, const PriorSpec& prior, double x,
                         const QuadratureConfig& cfg = {});

// Density of the total-probability marginal, integral of f(x|nu) pi(nu) dnu.
double mean_marginal_pdf(const ConditionalFamily& family, const PriorSpec& prior, double x,
                         const QuadratureConfig& cfg = {});

// Median over nu ~ pi of F(x|nu). Uses F(x | median(nu)) when the family is
// monotone in nu at x; otherwise falls back to median_marginal_cdf_solve.
double median_marginal_cdf(const ConditionalFamily& family, const PriorSpec& prior, double x,
                           const QuadratureConfig& cfg = {});

// Generic route: bisection on t for the smallest t with P(F(x|nu) <= t) >= 1/2.
double median_marginal_cdf_solve(const ConditionalFamily& family, const PriorSpec& prior, double x,
                                 const QuadratureConfig& cfg = {});

// P(g(nu) <= t) for nu ~ prior. The nu-region {g <= t} is resolved on a
// grid in prior-quantile coordinates with each crossing refined by
// bisection, so the probability is the exact prior mass of that region up
// to the tail cutoff. Throws UnsupportedFamily when g is not finite or
// crosses t too often to resolve.
double prior_probability_at_most(const std::function<double(double)>& g, const PriorSpec& prior,
                                 double t, const QuadratureConfig& cfg = {});

// Lower median (smallest t with P(g(nu) <= t) >= 1/2) of g(nu), g valued in [0,1].
double lower_median_of(const std::function<double(double)>& g, const PriorSpec& prior,
                       const QuadratureConfig& cfg = {});

// A realized marginal distribution function. Immutable and thread-safe.
class MarginalCdf {
public:
    // Defaults: closed_form when available, otherwise quadrature (mean) or
    // monotone_fast_path (median). Throws InvalidParameter when an explicit
    // method does not apply to the kind or family/prior pair.
    static MarginalCdf mean_based(const ConditionalFamily& family, const PriorSpec& prior,
                                  const QuadratureConfig& cfg = {},
                                  std::optional<MarginalMethod> method = std::nullopt);
    static MarginalCdf median_based(const ConditionalFamily& family, const PriorSpec& prior,
                                    const QuadratureConfig& cfg = {},
                                    std::optional<MarginalMethod> method = std::nullopt);
    // Piecewise-linear interpolant through (xs, values); constant beyond the ends.
    static MarginalCdf from_curve(MarginalKind kind, std::vector<double> xs, std::vector<double> values);

    MarginalKind kind() const noexcept { return kind_; }
    MarginalMethod method() const noexcept { return method_; }
    bool has_model() const noexcept { return family_.has_value(); }
    const ConditionalFamily& family() const;
    const PriorSpec& prior() const;
    std::optional<double> theta() const noexcept;
    const QuadratureConfig& config() const noexcept { return cfg_; }
    std::string describe() const;

    double cdf(double x) const;
    // Analytic for closed_form, fast-path and quadrature marginals; central
    // differences otherwise. Throws DomainError at a finite support boundary.
    double pdf(double x) const;
    double quantile(double p) const;
    double sample(Rng& rng) const;

    // Same marginal with the family relocated to theta.
    MarginalCdf at_location(double theta) const;

    // Number of times a differenced density came out negative and was clamped.
    std::size_t clamped_density_count() const noexcept { return clamped_->load(); }

private:
    enum class ClosedForm { none, exp_uniform, exp_exponential };

    MarginalCdf(MarginalKind kind, MarginalMethod method) : kind_(kind), method_(method) {}
    double difference_pdf(double x) const;
    double curve_cdf(double x) const;

    MarginalKind kind_;
    MarginalMethod method_;
    std::optional<ConditionalFamily> family_;
    std::optional<PriorSpec> prior_;
    QuadratureConfig cfg_;
    ClosedForm closed_form_ = ClosedForm::none;
    double nu_median_ = 0.0;
    std::shared_ptr<const std::vector<double>> curve_x_;
    std::shared_ptr<const std::vector<double>> curve_y_;
    std::shared_ptr<std::atomic<std::size_t>> clamped_ = std::make_shared<std::atomic<std::size_t>>(0);
};

struct VerificationReport {
    bool monotone = true;
    bool bounded = true;
    bool limits = true;
    // Largest violation found among all three checks (0 when clean).
    double worst_violation = 0.0;
    double value_at_low_probe = 0.0;
    double value_at_high_probe = 0.0;

    bool all_pass() const noexcept { return monotone && bounded && limits; }
};

// Checks that a function behaves like a distribution function: no decrease
// beyond tol along the sorted probe grid, values in [0,1] (within tol), and
// value within tol of 0 at far_probes.first and of 1 at far_probes.second.
VerificationReport verify_distribution_function(const std::function<double(double)>& cdf,
                                                std::span<const double> probe_grid,
                                                std::pair<double, double> far_probes, double tol);
VerificationReport verify_distribution_function(const MarginalCdf& marginal,
                                                std::span<const double> probe_grid,
                                                std::pair<double, double> far_probes, double tol);

}  // namespace medmarg
