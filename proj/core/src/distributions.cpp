#include "medmarg/distributions.hpp"

#include <cmath>
#include <limits>

#include "medmarg/error.hpp"
#include "medmarg/normal.hpp"

namespace medmarg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConditionalFamily ConditionalFamily::exponential_rate() {
    return ConditionalFamily(FamilyId::exponential_rate, std::nullopt);
}

ConditionalFamily ConditionalFamily::normal_mean_var(double theta) {
    if (!std::isfinite(theta)) throw InvalidParameter("normal_mean_var: theta must be finite");
    return ConditionalFamily(FamilyId::normal_mean_var, theta);
}

ConditionalFamily ConditionalFamily::normal_mean_sd(double theta) {
    if (!std::isfinite(theta)) throw InvalidParameter("normal_mean_sd: theta must be finite");
    return ConditionalFamily(FamilyId::normal_mean_sd, theta);
}

Monotonicity ConditionalFamily::monotonicity() const noexcept {
    return id_ == FamilyId::exponential_rate ? Monotonicity::increasing_in_nu
                                             : Monotonicity::sign_switching_at_theta;
}

std::string ConditionalFamily::name() const {
    switch (id_) {
        case FamilyId::exponential_rate: return "exponential_rate";
        case FamilyId::normal_mean_var: return "normal_mean_var";
        case FamilyId::normal_mean_sd: return "normal_mean_sd";
    }
    return "unknown";
}

ConditionalFamily ConditionalFamily::with_theta(double theta) const {
    switch (id_) {
        case FamilyId::normal_mean_var: return normal_mean_var(theta);
        case FamilyId::normal_mean_sd: return normal_mean_sd(theta);
        case FamilyId::exponential_rate: break;
    }
    throw InvalidParameter("exponential_rate family has no location parameter");
}

bool ConditionalFamily::valid_nu(double nu) const noexcept {
    return nu > 0.0 && std::isfinite(nu);
}

std::pair<double, double> ConditionalFamily::support() const noexcept {
    if (id_ == FamilyId::exponential_rate) return {0.0, kInf};
    return {-kInf, kInf};
}

void ConditionalFamily::check_nu(double nu) const {
    if (!valid_nu(nu)) {
        throw InvalidParameter(name() + ": nu must be positive and finite, got " + std::to_string(nu));
    }
}

double ConditionalFamily::cdf(double x, double nu) const {
    check_nu(nu);
    switch (id_) {
        case FamilyId::exponential_rate:
            return x <= 0.0 ? 0.0 : -std::expm1(-nu * x);
        case FamilyId::normal_mean_var:
            return normal_cdf((x - *theta_) / std::sqrt(nu));
        case FamilyId::normal_mean_sd:
            return normal_cdf((x - *theta_) / nu);
    }
    return 0.0;
}

double ConditionalFamily::pdf(double x, double nu) const {
    check_nu(nu);
    switch (id_) {
        case FamilyId::exponential_rate:
            return x < 0.0 ? 0.0 : nu * std::exp(-nu * x);
        case FamilyId::normal_mean_var: {
            const double sd = std::sqrt(nu);
            return normal_pdf((x - *theta_) / sd) / sd;
        }
        case FamilyId::normal_mean_sd:
            return normal_pdf((x - *theta_) / nu) / nu;
    }
    return 0.0;
}

double ConditionalFamily::quantile(double p, double nu) const {
    check_nu(nu);
    if (!(p > 0.0 && p < 1.0)) throw DomainError(name() + ": quantile p must lie in (0,1)");
    switch (id_) {
        case FamilyId::exponential_rate:
            return -std::log1p(-p) / nu;
        case FamilyId::normal_mean_var:
            return *theta_ + std::sqrt(nu) * normal_quantile(p);
        case FamilyId::normal_mean_sd:
            return *theta_ + nu * normal_quantile(p);
    }
    return 0.0;
}

double ConditionalFamily::sample(Rng& rng, double nu) const {
    check_nu(nu);
    if (id_ == FamilyId::exponential_rate) return -std::log(uniform_open(rng)) / nu;
    return quantile(uniform_open(rng), nu);
}

std::optional<int> ConditionalFamily::nu_direction(double x) const noexcept {
    if (id_ == FamilyId::exponential_rate) return x > 0.0 ? 1 : 0;
    if (x < *theta_) return 1;
    if (x > *theta_) return -1;
    return 0;
}

PriorSpec PriorSpec::uniform_unit() { return PriorSpec(PriorId::uniform_unit, {}); }

PriorSpec PriorSpec::exponential_unit() { return PriorSpec(PriorId::exponential_unit, {}); }

PriorSpec PriorSpec::point_mass(double location) {
    if (!(location > 0.0) || !std::isfinite(location)) {
        throw InvalidParameter("point_mass: location must be positive and finite");
    }
    return PriorSpec(PriorId::point_mass, {location});
}

PriorSpec PriorSpec::custom(CustomPrior spec) {
    if (!spec.density || !spec.quantile || !spec.sampler) {
        throw InvalidParameter("custom prior requires density, quantile and sampler");
    }
    if (!(spec.lower < spec.upper)) throw InvalidParameter("custom prior: empty support");
    return PriorSpec(PriorId::custom, {}, std::make_shared<const CustomPrior>(std::move(spec)));
}

std::string PriorSpec::name() const {
    switch (id_) {
        case PriorId::uniform_unit: return "uniform_unit";
        case PriorId::exponential_unit: return "exponential_unit";
        case PriorId::point_mass: return "point_mass(" + std::to_string(params_[0]) + ")";
        case PriorId::custom: return custom_->name;
    }
    return "unknown";
}

std::pair<double, double> PriorSpec::support() const noexcept {
    switch (id_) {
        case PriorId::uniform_unit: return {0.0, 1.0};
        case PriorId::exponential_unit: return {0.0, kInf};
        case PriorId::point_mass: return {params_[0], params_[0]};
        case PriorId::custom: return {custom_->lower, custom_->upper};
    }
    return {0.0, 0.0};
}

double PriorSpec::density(double nu) const {
    switch (id_) {
        case PriorId::uniform_unit: return (nu > 0.0 && nu <= 1.0) ? 1.0 : 0.0;
        case PriorId::exponential_unit: return nu > 0.0 ? std::exp(-nu) : 0.0;
        case PriorId::point_mass: break;
        case PriorId::custom: return custom_->density(nu);
    }
    throw InvalidParameter("point_mass prior has no density");
}

double PriorSpec::cdf(double nu) const {
    switch (id_) {
        case PriorId::uniform_unit: return nu <= 0.0 ? 0.0 : (nu >= 1.0 ? 1.0 : nu);
        case PriorId::exponential_unit: return nu <= 0.0 ? 0.0 : -std::expm1(-nu);
        case PriorId::point_mass: return nu < params_[0] ? 0.0 : 1.0;
        case PriorId::custom:
            if (custom_->cdf) return custom_->cdf(nu);
            break;
    }
    throw InvalidParameter("custom prior '" + custom_->name + "' has no cdf");
}

double PriorSpec::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("prior_quantile: p must lie in (0,1)");
    switch (id_) {
        case PriorId::uniform_unit: return p;
        case PriorId::exponential_unit: return -std::log1p(-p);
        case PriorId::point_mass: return params_[0];
        case PriorId::custom: return custom_->quantile(p);
    }
    return 0.0;
}

double PriorSpec::sample(Rng& rng) const {
    switch (id_) {
        // uniform_open never returns 0, so the draw lies in (0,1].
        case PriorId::uniform_unit: return uniform_open(rng);
        case PriorId::exponential_unit: return -std::log(uniform_open(rng));
        case PriorId::point_mass: return params_[0];
        case PriorId::custom: return custom_->sampler(rng);
    }
    return 0.0;
}

std::vector<double> PriorSpec::sample_n(std::uint64_t seed, std::size_t n) const {
    if (n == 0) throw InvalidParameter("prior_sample: n must be >= 1");
    Rng rng = make_rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = sample(rng);
    return out;
}

PriorSpec pushforward_prior(const PriorSpec& prior, std::function<double(double)> g,
                            std::function<double(double)> g_inv,
                            std::function<double(double)> g_inv_derivative, std::string name) {
    if (prior.is_point_mass()) return PriorSpec::point_mass(g(prior.params()[0]));
    const auto [lo, hi] = prior.support();
    CustomPrior spec;
    spec.density = [prior, g_inv, g_inv_derivative](double y) {
        return prior.density(g_inv(y)) * std::abs(g_inv_derivative(y));
    };
    spec.quantile = [prior, g](double p) { return g(prior.quantile(p)); };
    spec.sampler = [prior, g](Rng& rng) { return g(prior.sample(rng)); };
    spec.cdf = [prior, g_inv](double y) { return prior.cdf(g_inv(y)); };
    spec.lower = g(lo);
    spec.upper = std::isinf(hi) ? hi : g(hi);
    spec.name = std::move(name);
    return PriorSpec::custom(std::move(spec));
}

}  // namespace medmarg
