#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medmarg/random.hpp"

namespace medmarg {

enum class FamilyId { exponential_rate, normal_mean_var, normal_mean_sd };

// How F(x|nu) moves with nu at fixed x.
enum class Monotonicity { increasing_in_nu, decreasing_in_nu, sign_switching_at_theta, unknown };

// Conditional law F_{X|nu}(x|nu), with an optional location parameter theta.
//
// exponential_rate:  F = 1 - exp(-nu x), x > 0, nu > 0 (rate).
// normal_mean_var:   X ~ N(theta, nu), nu is the variance.
// normal_mean_sd:    X ~ N(theta, nu^2), nu is the standard deviation.
class ConditionalFamily {
public:
    static ConditionalFamily exponential_rate();
    static ConditionalFamily normal_mean_var(double theta);
    static ConditionalFamily normal_mean_sd(double theta);

    FamilyId id() const noexcept { return id_; }
    std::optional<double> theta() const noexcept { return theta_; }
    Monotonicity monotonicity() const noexcept;
    std::string name() const;

    // Same family relocated to `theta`. Throws InvalidParameter for families
    // without a location parameter.
    ConditionalFamily with_theta(double theta) const;

    bool valid_nu(double nu) const noexcept;
    // Lower and upper end of the support of X (may be infinite).
    std::pair<double, double> support() const noexcept;

    double cdf(double x, double nu) const;
    double pdf(double x, double nu) const;
    double quantile(double p, double nu) const;
    double sample(Rng& rng, double nu) const;

    // Sign of d/dnu F(x|nu) at this x: +1, -1, or 0 (constant in nu).
    // Empty when the family carries no monotonicity information.
    std::optional<int> nu_direction(double x) const noexcept;

    friend bool operator==(const ConditionalFamily&, const ConditionalFamily&) = default;

private:
    ConditionalFamily(FamilyId id, std::optional<double> theta) : id_(id), theta_(theta) {}
    void check_nu(double nu) const;

    FamilyId id_;
    std::optional<double> theta_;
};

enum class PriorId { uniform_unit, exponential_unit, point_mass, custom };

// User-defined prior. density, quantile and sampler are all mandatory; cdf is
// optional. [lower, upper] bounds the support (infinite ends allowed).
struct CustomPrior {
    std::function<double(double)> density;
    std::function<double(double)> quantile;
    std::function<double(Rng&)> sampler;
    std::function<double(double)> cdf;
    double lower = 0.0;
    double upper = 0.0;
    std::string name = "custom";
};

// Prior pi(nu) on the nuisance parameter.
class PriorSpec {
public:
    // pi(nu) = 1 on 0 < nu <= 1.
    static PriorSpec uniform_unit();
    // pi(nu) = exp(-nu), nu > 0.
    static PriorSpec exponential_unit();
    static PriorSpec point_mass(double location);
    static PriorSpec custom(CustomPrior spec);

    PriorId id() const noexcept { return id_; }
    const std::vector<double>& params() const noexcept { return params_; }
    bool is_point_mass() const noexcept { return id_ == PriorId::point_mass; }
    std::string name() const;

    std::pair<double, double> support() const noexcept;

    // Throws InvalidParameter for point_mass (no density) and for custom
    // priors without a cdf callback (cdf only).
    double density(double nu) const;
    double cdf(double nu) const;
    // inf{nu : cdf(nu) >= p}; throws DomainError for p outside (0,1).
    double quantile(double p) const;
    double median() const { return quantile(0.5); }

    double sample(Rng& rng) const;
    // n draws from the stream seeded by `seed`; identical seeds give identical output.
    std::vector<double> sample_n(std::uint64_t seed, std::size_t n) const;

private:
    PriorSpec(PriorId id, std::vector<double> params, std::shared_ptr<const CustomPrior> custom = {})
        : id_(id), params_(std::move(params)), custom_(std::move(custom)) {}

    PriorId id_;
    std::vector<double> params_;
    std::shared_ptr<const CustomPrior> custom_;
};

// Prior of g(nu) for a strictly increasing g with inverse g_inv and
// derivative of the inverse. Used to move a variance prior onto the
// standard deviation.
PriorSpec pushforward_prior(const PriorSpec& prior, std::function<double(double)> g,
                            std::function<double(double)> g_inv,
                            std::function<double(double)> g_inv_derivative, std::string name);

}  // namespace medmarg
