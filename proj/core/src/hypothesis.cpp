#include "medmarg/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "medmarg/error.hpp"
#include "medmarg/normal.hpp"
#include "medmarg/parallel.hpp"
#include "medmarg/random.hpp"

namespace medmarg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kRatioProbes = 400;
constexpr double kProbeTail = 1e-6;
constexpr double kSizeTolerance = 1e-6;
// Log-ratio wiggle tolerated by the monotonicity check; quadrature-evaluated
// tail densities carry relative errors near 1e-6.
constexpr double kRatioSlack = 1e-5;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
}

TestVariant variant_of(const MarginalCdf& model) {
    return model.kind() == MarginalKind::median_based ? TestVariant::median_marginal : TestVariant::mean_marginal;
}

double log_ratio(const Density& f0, const Density& f1, double x) {
    const double a = f1(x);
    const double b = f0(x);
    if (b <= 0.0) return a > 0.0 ? kInf : 0.0;
    if (a <= 0.0) return -kInf;
    return std::log(a) - std::log(b);
}

// Region {x : log_ratio(x) > level} traced on the probe grid, with each
// crossing refined by bisection. Ends reaching the first/last probe extend
// to the corresponding infinity.
RejectRegion level_set(const Density& f0, const Density& f1, const std::vector<double>& xs,
                       const std::vector<double>& r, double level) {
    std::vector<Interval> out;
    auto refine = [&](double a, double b, bool a_inside) {
        for (int it = 0; it < 100 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
            const double m = 0.5 * (a + b);
            if ((log_ratio(f0, f1, m) > level) == a_inside) a = m; else b = m;
        }
        return 0.5 * (a + b);
    };
    bool inside = r.front() > level;
    double start = -kInf;
    for (std::size_t j = 1; j < xs.size(); ++j) {
        const bool now = r[j] > level;
        if (now == inside) continue;
        const double edge = refine(xs[j - 1], xs[j], inside);
        if (inside) out.push_back({start, edge}); else start = edge;
        inside = now;
    }
    if (inside) out.push_back({start, kInf});
    return RejectRegion(std::move(out));
}

}  // namespace

std::string to_string(TestVariant variant) {
    switch (variant) {
        case TestVariant::median_marginal: return "median_marginal";
        case TestVariant::mean_marginal: return "mean_marginal";
        case TestVariant::known_sigma: return "known_sigma";
    }
    return "?";
}

std::string to_string(DominanceVerdict verdict) {
    switch (verdict) {
        case DominanceVerdict::a_dominates: return "a_dominates";
        case DominanceVerdict::b_dominates: return "b_dominates";
        case DominanceVerdict::crossing: return "crossing";
        case DominanceVerdict::tie: return "tie";
    }
    return "?";
}

RejectRegion::RejectRegion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (!(intervals_[i].lo < intervals_[i].hi)) throw InvalidParameter("RejectRegion: empty interval");
        if (i > 0 && intervals_[i].lo < intervals_[i - 1].hi) {
            throw InvalidParameter("RejectRegion: intervals must be disjoint and ascending");
        }
    }
}

RejectRegion RejectRegion::left_half_line(double c) { return RejectRegion({{-kInf, c}}); }

RejectRegion RejectRegion::right_half_line(double c) { return RejectRegion({{c, kInf}}); }

bool RejectRegion::contains(double x) const noexcept {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [x](const Interval& iv) { return x > iv.lo && x < iv.hi; });
}

std::optional<double> RejectRegion::left_threshold() const noexcept {
    if (intervals_.size() == 1 && std::isinf(intervals_[0].lo) && intervals_[0].lo < 0.0 &&
        std::isfinite(intervals_[0].hi)) {
        return intervals_[0].hi;
    }
    return std::nullopt;
}

double RejectRegion::probability(const std::function<double(double)>& cdf) const {
    double total = 0.0;
    for (const auto& iv : intervals_) {
        const double upper = std::isinf(iv.hi) ? 1.0 : cdf(iv.hi);
        const double lower = std::isinf(iv.lo) ? 0.0 : cdf(iv.lo);
        total += upper - lower;
    }
    return std::clamp(total, 0.0, 1.0);
}

std::string RejectRegion::describe() const {
    std::ostringstream os;
    os.precision(9);
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (i) os << " U ";
        os << '(' << intervals_[i].lo << ", " << intervals_[i].hi << ')';
    }
    return intervals_.empty() ? "(empty)" : os.str();
}

double SimpleHypothesisTest::threshold() const {
    if (auto c = region.left_threshold()) return *c;
    throw InvalidParameter("test region is not a left half-line: " + region.describe());
}

SimpleHypothesisTest mp_test(const Density& f0, const Density& f1, double alpha, const MarginalCdf& null_model,
                             std::optional<double> theta1) {
    check_alpha(alpha);
    SimpleHypothesisTest test;
    test.theta0 = null_model.theta().value_or(0.0);
    test.theta1 = theta1;
    test.alpha = alpha;
    test.variant = variant_of(null_model);
    test.model = null_model;

    const double lo = null_model.quantile(kProbeTail);
    const double hi = null_model.quantile(1.0 - kProbeTail);
    std::vector<double> xs(kRatioProbes);
    std::vector<double> r(kRatioProbes);
    for (std::size_t j = 0; j < kRatioProbes; ++j) {
        xs[j] = lo + (hi - lo) * static_cast<double>(j) / (kRatioProbes - 1);
        r[j] = log_ratio(f0, f1, xs[j]);
    }

    bool non_increasing = true;
    bool non_decreasing = true;
    for (std::size_t j = 1; j < kRatioProbes; ++j) {
        const double slack = kRatioSlack * std::max({1.0, std::abs(r[j]), std::abs(r[j - 1])});
        if (r[j] > r[j - 1] + slack) non_increasing = false;
        if (r[j] < r[j - 1] - slack) non_decreasing = false;
    }
    const bool prefer_left = !theta1 || *theta1 <= test.theta0;
    if (non_increasing && (prefer_left || !non_decreasing)) {
        test.region = RejectRegion::left_half_line(null_model.quantile(alpha));
        return test;
    }
    if (non_decreasing) {
        test.region = RejectRegion::right_half_line(null_model.quantile(1.0 - alpha));
        return test;
    }

    // Non-monotone ratio: bisect on the level of log(f1/f0).
    auto null_cdf = [&](double x) { return null_model.cdf(x); };
    double level_lo = *std::min_element(r.begin(), r.end());
    double level_hi = *std::max_element(r.begin(), r.end());
    if (!std::isfinite(level_lo) || !std::isfinite(level_hi)) {
        throw CalibrationError("mp_test", "likelihood ratio is not finite on the null support");
    }
    level_lo -= 1.0;
    RejectRegion region;
    double size = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (level_lo + level_hi);
        region = level_set(f0, f1, xs, r, mid);
        size = region.probability(null_cdf);
        if (std::abs(size - alpha) <= kSizeTolerance) {
            test.region = region;
            test.ratio_threshold = std::exp(mid);
            return test;
        }
        if (size > alpha) level_lo = mid; else level_hi = mid;
        if (level_hi - level_lo < 1e-14 * std::max(1.0, std::abs(level_hi))) break;
    }
    throw CalibrationError("mp_test", "no non-randomized ratio threshold attains size " + std::to_string(alpha) +
                                          " (closest " + std::to_string(size) + ")");
}

SimpleHypothesisTest mp_test(const MarginalCdf& null_model, double theta1, double alpha) {
    const MarginalCdf alternative = null_model.at_location(theta1);
    return mp_test([&](double x) { return null_model.pdf(x); }, [&](double x) { return alternative.pdf(x); },
                   alpha, null_model, theta1);
}

SimpleHypothesisTest one_sided_test(const MarginalCdf& null_model, double alpha) {
    check_alpha(alpha);
    SimpleHypothesisTest test;
    test.theta0 = null_model.theta().value_or(0.0);
    test.alpha = alpha;
    test.variant = variant_of(null_model);
    test.model = null_model;
    test.region = RejectRegion::left_half_line(null_model.quantile(alpha));
    return test;
}

SimpleHypothesisTest ump_known_sigma(double sigma, double alpha, double theta0) {
    if (!(sigma > 0.0)) throw InvalidParameter("ump_known_sigma: sigma must be positive");
    check_alpha(alpha);
    SimpleHypothesisTest test;
    test.theta0 = theta0;
    test.alpha = alpha;
    test.variant = TestVariant::known_sigma;
    test.sigma = sigma;
    test.region = RejectRegion::left_half_line(theta0 + sigma * normal_quantile(alpha));
    return test;
}

PowerCurve power_curve(const SimpleHypothesisTest& test, std::span<const double> mu_grid, PowerMode mode,
                       std::size_t mc_samples, std::uint64_t seed) {
    if (mu_grid.empty()) throw InvalidParameter("power_curve: empty grid");
    if (mode == PowerMode::monte_carlo && mc_samples == 0) {
        throw InvalidParameter("power_curve: Monte Carlo mode needs mc_samples > 0");
    }
    if (test.variant != TestVariant::known_sigma && !test.model) {
        throw InvalidParameter("power_curve: marginal test without a model");
    }
    PowerCurve curve;
    curve.mu_grid.assign(mu_grid.begin(), mu_grid.end());
    curve.power.resize(mu_grid.size());
    curve.std_error.assign(mu_grid.size(), 0.0);
    curve.label = to_string(test.variant);
    curve.mode = mode;
    curve.mc_samples = mode == PowerMode::monte_carlo ? mc_samples : 0;

    parallel_for(mu_grid.size(), [&](std::size_t i) {
        const double mu = mu_grid[i];
        if (test.variant == TestVariant::known_sigma) {
            const double sigma = *test.sigma;
            if (mode == PowerMode::exact) {
                curve.power[i] = test.region.probability([&](double x) { return normal_cdf((x - mu) / sigma); });
                return;
            }
            Rng rng = make_rng(seed, i + 1);
            std::size_t hits = 0;
            for (std::size_t s = 0; s < mc_samples; ++s) hits += test.rejects(mu + sigma * standard_normal(rng));
            curve.power[i] = static_cast<double>(hits) / static_cast<double>(mc_samples);
        } else {
            const MarginalCdf shifted = test.model->at_location(mu);
            if (mode == PowerMode::exact) {
                curve.power[i] = test.region.probability([&](double x) { return shifted.cdf(x); });
                return;
            }
            Rng rng = make_rng(seed, i + 1);
            std::size_t hits = 0;
            for (std::size_t s = 0; s < mc_samples; ++s) hits += test.rejects(shifted.sample(rng));
            curve.power[i] = static_cast<double>(hits) / static_cast<double>(mc_samples);
        }
        const double p = curve.power[i];
        curve.std_error[i] = std::sqrt(p * (1.0 - p) / static_cast<double>(mc_samples));
    });
    return curve;
}

DominanceReport compare_power(const PowerCurve& a, const PowerCurve& b, double z) {
    if (a.mu_grid != b.mu_grid) throw InvalidParameter("compare_power: curves use different grids");
    const std::size_t n = a.mu_grid.size();
    DominanceReport report;
    report.difference.resize(n);
    report.noise_margin.resize(n);
    report.a_better.resize(n);
    report.b_better.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.power[i] - b.power[i];
        const double se = std::hypot(a.std_error[i], b.std_error[i]);
        const double margin = std::max(z * se, 1e-12);
        report.difference[i] = d;
        report.noise_margin[i] = margin;
        report.a_better[i] = d > margin;
        report.b_better[i] = d < -margin;
        report.a_better_count += report.a_better[i];
        report.b_better_count += report.b_better[i];
    }
    if (report.a_better_count == 0 && report.b_better_count == 0) {
        report.verdict = DominanceVerdict::tie;
    } else if (report.b_better_count == 0) {
        report.verdict = DominanceVerdict::a_dominates;
    } else if (report.a_better_count == 0) {
        report.verdict = DominanceVerdict::b_dominates;
    } else {
        report.verdict = DominanceVerdict::crossing;
    }
    return report;
}

}  // namespace medmarg
