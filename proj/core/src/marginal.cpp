#include "medmarg/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "medmarg/error.hpp"
#include "medmarg/quadrature.hpp"

namespace medmarg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kQuantileGridCells = 1024;
constexpr std::size_t kMaxCrossings = 64;

// Integral of h(nu) pi(nu) over the (truncated) prior support. The
// substitution nu = lo + (hi - lo) w^2 absorbs the inverse-square-root
// behaviour normal densities show as the variance goes to zero.
double integrate_over_prior(const std::function<double(double)>& h, const PriorSpec& prior,
                            const QuadratureConfig& cfg) {
    if (prior.is_point_mass()) return h(prior.params()[0]);
    auto [lo, hi] = prior.support();
    if (std::isinf(lo)) lo = prior.quantile(cfg.tail_mass_cutoff);
    if (std::isinf(hi)) hi = prior.quantile(1.0 - cfg.tail_mass_cutoff);
    const double width = hi - lo;
    auto integrand = [&](double w) {
        const double nu = lo + width * w * w;
        const double weight = prior.density(nu);
        if (weight == 0.0) return 0.0;
        return h(nu) * weight * 2.0 * width * w;
    };
    return integrate_adaptive(integrand, 0.0, 1.0, cfg.abs_tol, cfg.max_subdivisions).value;
}

// g(Q(u)) tabulated on a uniform grid in prior-quantile coordinates u. The
// end cells absorb the tail mass below/above the cutoff.
class QuantileGrid {
public:
    QuantileGrid(const std::function<double(double)>& g, const PriorSpec& prior, const QuadratureConfig& cfg)
        : g_(g), prior_(prior) {
        const double eps = cfg.tail_mass_cutoff;
        u_.resize(kQuantileGridCells + 1);
        values_.resize(kQuantileGridCells + 1);
        for (std::size_t i = 0; i <= kQuantileGridCells; ++i) {
            double u = static_cast<double>(i) / kQuantileGridCells;
            u = std::clamp(u, eps, 1.0 - eps);
            u_[i] = u;
            values_[i] = eval(u);
        }
    }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    // Prior mass of {nu : g(nu) <= t}.
    double mass_at_most(double t) const {
        double mass = 0.0;
        std::size_t crossings = 0;
        if (values_.front() <= t) mass += u_.front();
        if (values_.back() <= t) mass += 1.0 - u_.back();
        for (std::size_t i = 0; i + 1 < u_.size(); ++i) {
            const bool left_in = values_[i] <= t;
            const bool right_in = values_[i + 1] <= t;
            if (left_in && right_in) {
                mass += u_[i + 1] - u_[i];
            } else if (left_in != right_in) {
                if (++crossings > kMaxCrossings) {
                    throw UnsupportedFamily("median_marginal_cdf",
                                            "nu-region {F(x|nu) <= t} has too many components to resolve");
                }
                // Bisect for the boundary; `a` stays on the left cell's side.
                double a = u_[i], b = u_[i + 1];
                for (int it = 0; it < 80 && b - a > 1e-17; ++it) {
                    const double m = 0.5 * (a + b);
                    if ((eval(m) <= t) == left_in) a = m; else b = m;
                }
                const double boundary = 0.5 * (a + b);
                mass += left_in ? boundary - u_[i] : u_[i + 1] - boundary;
            }
        }
        return mass;
    }

private:
    double eval(double u) const {
        const double v = g_(prior_.quantile(u));
        if (!std::isfinite(v)) {
            throw UnsupportedFamily("median_marginal_cdf", "F(x|nu) is not finite on the prior support");
        }
        return v;
    }

    const std::function<double(double)>& g_;
    const PriorSpec& prior_;
    std::vector<double> u_;
    std::vector<double> values_;
};

double lower_median_on(const QuantileGrid& grid) {
    double lo = grid.min_value();
    double hi = grid.max_value();
    if (grid.mass_at_most(lo) >= 0.5) return lo;
    if (grid.mass_at_most(hi) < 0.5) {
        throw ConvergenceError("median_marginal_cdf", "could not bracket the median");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (grid.mass_at_most(mid) >= 0.5) hi = mid; else lo = mid;
    }
    return hi;
}

bool is_exp_uniform(const ConditionalFamily& f, const PriorSpec& p) {
    return f.id() == FamilyId::exponential_rate && p.id() == PriorId::uniform_unit;
}
bool is_exp_exponential(const ConditionalFamily& f, const PriorSpec& p) {
    return f.id() == FamilyId::exponential_rate && p.id() == PriorId::exponential_unit;
}

}  // namespace

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0)) throw InvalidParameter("QuadratureConfig: abs_tol must be positive");
    if (max_subdivisions == 0) throw InvalidParameter("QuadratureConfig: max_subdivisions must be >= 1");
    if (!(tail_mass_cutoff > 0.0 && tail_mass_cutoff < 1e-6)) {
        throw InvalidParameter("QuadratureConfig: tail_mass_cutoff must lie in (0, 1e-6)");
    }
}

std::string to_string(MarginalKind kind) {
    return kind == MarginalKind::mean_based ? "mean_based" : "median_based";
}

std::string to_string(MarginalMethod method) {
    switch (method) {
        case MarginalMethod::closed_form: return "closed_form";
        case MarginalMethod::monotone_fast_path: return "monotone_fast_path";
        case MarginalMethod::quadrature: return "quadrature";
        case MarginalMethod::quantile_solve: return "quantile_solve";
        case MarginalMethod::monte_carlo_curve: return "monte_carlo_curve";
    }
    return "unknown";
}

double mean_marginal_cdf(const ConditionalFamily& family, const PriorSpec& prior, double x,
                         const QuadratureConfig& cfg) {
    cfg.validate();
    return std::clamp(integrate_over_prior([&](double nu) { return family.cdf(x, nu); }, prior, cfg), 0.0, 1.0);
}

double mean_marginal_pdf(const ConditionalFamily& family, const PriorSpec& prior, double x,
                         const QuadratureConfig& cfg) {
    cfg.validate();
    return std::max(0.0, integrate_over_prior([&](double nu) { return family.pdf(x, nu); }, prior, cfg));
}

double median_marginal_cdf(const ConditionalFamily& family, const PriorSpec& prior, double x,
                           const QuadratureConfig& cfg) {
    if (family.nu_direction(x).has_value()) {
        cfg.validate();
        return family.cdf(x, prior.median());
    }
    return median_marginal_cdf_solve(family, prior, x, cfg);
}

double median_marginal_cdf_solve(const ConditionalFamily& family, const PriorSpec& prior, double x,
                                 const QuadratureConfig& cfg) {
    return lower_median_of([&](double nu) { return family.cdf(x, nu); }, prior, cfg);
}

double prior_probability_at_most(const std::function<double(double)>& g, const PriorSpec& prior, double t,
                                 const QuadratureConfig& cfg) {
    cfg.validate();
    if (prior.is_point_mass()) return g(prior.params()[0]) <= t ? 1.0 : 0.0;
    return QuantileGrid(g, prior, cfg).mass_at_most(t);
}

double lower_median_of(const std::function<double(double)>& g, const PriorSpec& prior,
                       const QuadratureConfig& cfg) {
    cfg.validate();
    if (prior.is_point_mass()) return g(prior.params()[0]);
    return lower_median_on(QuantileGrid(g, prior, cfg));
}

// ---------------------------------------------------------------------------
// MarginalCdf

MarginalCdf MarginalCdf::mean_based(const ConditionalFamily& family, const PriorSpec& prior,
                                    const QuadratureConfig& cfg, std::optional<MarginalMethod> method) {
    cfg.validate();
    const bool has_closed = is_exp_uniform(family, prior) || is_exp_exponential(family, prior);
    const MarginalMethod m = method.value_or(has_closed ? MarginalMethod::closed_form : MarginalMethod::quadrature);
    if (m == MarginalMethod::closed_form && !has_closed) {
        throw InvalidParameter("no closed form for mean marginal of " + family.name() + " / " + prior.name());
    }
    if (m != MarginalMethod::closed_form && m != MarginalMethod::quadrature) {
        throw InvalidParameter("method " + to_string(m) + " does not apply to mean-based marginals");
    }
    MarginalCdf out(MarginalKind::mean_based, m);
    out.family_ = family;
    out.prior_ = prior;
    out.cfg_ = cfg;
    if (m == MarginalMethod::closed_form) {
        out.closed_form_ = is_exp_uniform(family, prior) ? ClosedForm::exp_uniform : ClosedForm::exp_exponential;
    }
    return out;
}

MarginalCdf MarginalCdf::median_based(const ConditionalFamily& family, const PriorSpec& prior,
                                      const QuadratureConfig& cfg, std::optional<MarginalMethod> method) {
    cfg.validate();
    const bool has_closed = is_exp_uniform(family, prior) || is_exp_exponential(family, prior);
    const MarginalMethod m =
        method.value_or(has_closed ? MarginalMethod::closed_form : MarginalMethod::monotone_fast_path);
    switch (m) {
        case MarginalMethod::closed_form:
            if (!has_closed) {
                throw InvalidParameter("no closed form for median marginal of " + family.name() + " / " +
                                       prior.name());
            }
            break;
        case MarginalMethod::monotone_fast_path:
            if (family.monotonicity() == Monotonicity::unknown) {
                throw InvalidParameter("monotone fast path needs a family monotone in nu");
            }
            break;
        case MarginalMethod::quantile_solve: break;
        default: throw InvalidParameter("method " + to_string(m) + " does not apply to median-based marginals");
    }
    MarginalCdf out(MarginalKind::median_based, m);
    out.family_ = family;
    out.prior_ = prior;
    out.cfg_ = cfg;
    out.nu_median_ = prior.median();
    if (m == MarginalMethod::closed_form) {
        out.closed_form_ = is_exp_uniform(family, prior) ? ClosedForm::exp_uniform : ClosedForm::exp_exponential;
    }
    return out;
}

MarginalCdf MarginalCdf::from_curve(MarginalKind kind, std::vector<double> xs, std::vector<double> values) {
    if (xs.size() < 2 || xs.size() != values.size()) {
        throw InvalidParameter("from_curve: need at least two points and matching lengths");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw InvalidParameter("from_curve: x grid must be strictly increasing");
    }
    MarginalCdf out(kind, MarginalMethod::monte_carlo_curve);
    out.curve_x_ = std::make_shared<const std::vector<double>>(std::move(xs));
    out.curve_y_ = std::make_shared<const std::vector<double>>(std::move(values));
    return out;
}

const ConditionalFamily& MarginalCdf::family() const {
    if (!family_) throw InvalidParameter("curve-backed marginal has no conditional family");
    return *family_;
}

const PriorSpec& MarginalCdf::prior() const {
    if (!prior_) throw InvalidParameter("curve-backed marginal has no prior");
    return *prior_;
}

std::optional<double> MarginalCdf::theta() const noexcept {
    return family_ ? family_->theta() : std::nullopt;
}

std::string MarginalCdf::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << '/' << to_string(method_);
    if (family_) {
        os << ' ' << family_->name();
        if (auto t = family_->theta()) os << "(theta=" << *t << ')';
        os << " prior=" << prior_->name();
    }
    return os.str();
}

double MarginalCdf::curve_cdf(double x) const {
    const auto& xs = *curve_x_;
    const auto& ys = *curve_y_;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + w * (ys[j] - ys[j - 1]);
}

double MarginalCdf::cdf(double x) const {
    switch (method_) {
        case MarginalMethod::closed_form: {
            if (x <= 0.0) return 0.0;
            const bool median = kind_ == MarginalKind::median_based;
            if (closed_form_ == ClosedForm::exp_uniform) {
                return median ? -std::expm1(-0.5 * x) : 1.0 + std::expm1(-x) / x;
            }
            return median ? -std::expm1(-std::numbers::ln2 * x) : 1.0 - 1.0 / (x + 1.0);
        }
        case MarginalMethod::monotone_fast_path:
            return family_->cdf(x, nu_median_);
        case MarginalMethod::quadrature:
            return mean_marginal_cdf(*family_, *prior_, x, cfg_);
        case MarginalMethod::quantile_solve:
            return median_marginal_cdf_solve(*family_, *prior_, x, cfg_);
        case MarginalMethod::monte_carlo_curve:
            return curve_cdf(x);
    }
    return 0.0;
}

double MarginalCdf::difference_pdf(double x) const {
    const double h = std::max(1e-5, 1e-5 * std::abs(x));
    double d;
    if (family_ && x - h <= family_->support().first) {
        d = (cdf(x + h) - cdf(x)) / h;
    } else {
        d = (cdf(x + h) - cdf(x - h)) / (2.0 * h);
    }
    if (d < 0.0) {
        clamped_->fetch_add(1);
        return 0.0;
    }
    return d;
}

double MarginalCdf::pdf(double x) const {
    if (family_) {
        const auto [lo, hi] = family_->support();
        if (x == lo || x == hi) throw DomainError("marginal_pdf: x is on the support boundary");
        if (x < lo || x > hi) return 0.0;
    }
    switch (method_) {
        case MarginalMethod::closed_form: {
            const bool median = kind_ == MarginalKind::median_based;
            if (closed_form_ == ClosedForm::exp_uniform) {
                if (median) return 0.5 * std::exp(-0.5 * x);
                // d/dx [1 + (e^{-x} - 1)/x] = (1 - (1 + x) e^{-x}) / x^2
                if (x < 1e-3) return 0.5 - x / 3.0 + x * x / 8.0;
                return (1.0 - (1.0 + x) * std::exp(-x)) / (x * x);
            }
            if (median) return std::numbers::ln2 * std::exp(-std::numbers::ln2 * x);
            return 1.0 / ((x + 1.0) * (x + 1.0));
        }
        case MarginalMethod::monotone_fast_path:
            return family_->pdf(x, nu_median_);
        case MarginalMethod::quadrature:
            return mean_marginal_pdf(*family_, *prior_, x, cfg_);
        case MarginalMethod::quantile_solve:
        case MarginalMethod::monte_carlo_curve:
            return difference_pdf(x);
    }
    return 0.0;
}

double MarginalCdf::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("marginal quantile: p must lie in (0,1)");
    if (method_ == MarginalMethod::monotone_fast_path ||
        (method_ == MarginalMethod::closed_form && kind_ == MarginalKind::median_based)) {
        return family_->quantile(p, nu_median_);
    }
    if (method_ == MarginalMethod::closed_form && closed_form_ == ClosedForm::exp_exponential) {
        return p / (1.0 - p);
    }

    double lo, hi;
    if (method_ == MarginalMethod::monte_carlo_curve) {
        lo = curve_x_->front();
        hi = curve_x_->back();
        if (cdf(lo) >= p) return lo;
        if (cdf(hi) < p) return hi;
    } else {
        std::tie(lo, hi) = family_->support();
        if (std::isinf(lo)) {
            lo = -1.0;
            while (cdf(lo) >= p) {
                lo = 2.0 * lo - 1.0;
                if (lo < -1e300) throw ConvergenceError("marginal quantile", "cannot bracket lower end");
            }
        }
        if (std::isinf(hi)) {
            hi = std::max(lo, 0.0) + 1.0;
            while (cdf(hi) < p) {
                hi = 2.0 * hi + 1.0;
                if (hi > 1e300) throw ConvergenceError("marginal quantile", "cannot bracket upper end");
            }
        }
    }
    // Invariant: cdf(lo) < p <= cdf(hi).
    for (int it = 0; it < 300 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= p) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

double MarginalCdf::sample(Rng& rng) const {
    switch (method_) {
        case MarginalMethod::quadrature:
            return family_->sample(rng, prior_->sample(rng));
        case MarginalMethod::closed_form:
            if (kind_ == MarginalKind::mean_based) return family_->sample(rng, prior_->sample(rng));
            return family_->sample(rng, nu_median_);
        case MarginalMethod::monotone_fast_path:
            return family_->sample(rng, nu_median_);
        case MarginalMethod::quantile_solve:
        case MarginalMethod::monte_carlo_curve:
            break;
    }
    return quantile(uniform_open(rng));
}

MarginalCdf MarginalCdf::at_location(double theta) const {
    if (!family_) throw InvalidParameter("curve-backed marginal cannot be relocated");
    MarginalCdf out = *this;
    out.family_ = family_->with_theta(theta);
    out.clamped_ = std::make_shared<std::atomic<std::size_t>>(0);
    return out;
}

// ---------------------------------------------------------------------------
// Verification

VerificationReport verify_distribution_function(const std::function<double(double)>& cdf,
                                                std::span<const double> probe_grid,
                                                std::pair<double, double> far_probes, double tol) {
    if (!std::is_sorted(probe_grid.begin(), probe_grid.end())) {
        throw InvalidParameter("verify_distribution_function: probe grid must be sorted");
    }
    if (!(far_probes.first < far_probes.second)) {
        throw InvalidParameter("verify_distribution_function: far probes must be ordered (low, high)");
    }
    VerificationReport report;
    double previous = -kInf;
    for (double x : probe_grid) {
        const double v = cdf(x);
        if (v < -tol || v > 1.0 + tol || !std::isfinite(v)) {
            report.bounded = false;
            const double excess = std::isfinite(v) ? std::max(-v, v - 1.0) : kInf;
            report.worst_violation = std::max(report.worst_violation, excess);
        }
        if (previous - v > tol) {
            report.monotone = false;
            report.worst_violation = std::max(report.worst_violation, previous - v);
        }
        previous = v;
    }
    report.value_at_low_probe = cdf(far_probes.first);
    report.value_at_high_probe = cdf(far_probes.second);
    const double low_gap = std::abs(report.value_at_low_probe);
    const double high_gap = std::abs(1.0 - report.value_at_high_probe);
    if (low_gap > tol || high_gap > tol) {
        report.limits = false;
        report.worst_violation = std::max(report.worst_violation, std::max(low_gap, high_gap));
    }
    return report;
}

VerificationReport verify_distribution_function(const MarginalCdf& marginal, std::span<const double> probe_grid,
                                                std::pair<double, double> far_probes, double tol) {
    return verify_distribution_function([&](double x) { return marginal.cdf(x); }, probe_grid, far_probes, tol);
}

}  // namespace medmarg
