#include "medmarg/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#include "medmarg/error.hpp"
#include "medmarg/parallel.hpp"
#include "medmarg/random.hpp"

namespace medmarg {

namespace {

// Prior draws for grid point `index` (or the shared set when not resampling).
std::vector<double> prior_draws(const PriorSpec& prior, const McConfig& cfg, std::size_t index) {
    Rng rng = cfg.resample_per_x ? Rng(substream_seed(substream_seed(cfg.seed, 0), index + 1))
                                 : make_rng(cfg.seed, 0);
    std::vector<double> nu(cfg.K);
    for (auto& v : nu) v = prior.sample(rng);
    return nu;
}

using Reducer = double (*)(std::span<const double>);

ApproxCurve analytic_curve(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg,
                           McAlgorithm algorithm, Reducer reduce) {
    cfg.validate(false);
    ApproxCurve curve{cfg.x_grid, std::vector<double>(cfg.x_grid.size()), algorithm, cfg};
    std::vector<double> nu = prior_draws(prior, cfg, 0);
    std::vector<double> y(cfg.K);
    for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) {
        if (cfg.resample_per_x && i > 0) nu = prior_draws(prior, cfg, i);
        for (std::size_t k = 0; k < cfg.K; ++k) y[k] = family.cdf(cfg.x_grid[i], nu[k]);
        curve.values[i] = reduce(y);
    }
    if (cfg.isotonic) curve.values = isotonic_projection(curve.values);
    return curve;
}

// Empirical CDF of L conditional draws at every grid point, for one nu.
void ecdf_row(const ConditionalFamily& family, double nu, std::size_t L, Rng& rng, std::span<const double> grid,
              std::span<double> out) {
    std::vector<double> xs(L);
    for (auto& v : xs) v = family.sample(rng, nu);
    const EmpiricalCdf ecdf(std::move(xs));
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = ecdf(grid[i]);
}

ApproxCurve empirical_curve(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg,
                            McAlgorithm algorithm, Reducer reduce) {
    cfg.validate(true);
    const std::size_t G = cfg.x_grid.size();
    const std::size_t K = cfg.K;
    const std::size_t L = cfg.conditional_draws();
    ApproxCurve curve{cfg.x_grid, std::vector<double>(G), algorithm, cfg};

    if (!cfg.resample_per_x) {
        const std::vector<double> nu = prior_draws(prior, cfg, 0);
        // table[k * G + i] = ECDF_k(x_i); conditional stream k+1 for draw k.
        std::vector<double> table(K * G);
        parallel_for(K, [&](std::size_t k) {
            Rng rng = make_rng(cfg.seed, k + 1);
            ecdf_row(family, nu[k], L, rng, cfg.x_grid, std::span<double>(table).subspan(k * G, G));
        });
        std::vector<double> column(K);
        for (std::size_t i = 0; i < G; ++i) {
            for (std::size_t k = 0; k < K; ++k) column[k] = table[k * G + i];
            curve.values[i] = reduce(column);
        }
    } else {
        parallel_for(G, [&](std::size_t i) {
            const std::vector<double> nu = prior_draws(prior, cfg, i);
            const std::uint64_t point_seed = substream_seed(cfg.seed, K + 1 + i);
            std::vector<double> column(K);
            double value = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                Rng rng = make_rng(point_seed, k + 1);
                ecdf_row(family, nu[k], L, rng, std::span<const double>(&cfg.x_grid[i], 1),
                         std::span<double>(&value, 1));
                column[k] = value;
            }
            curve.values[i] = reduce(column);
        });
    }
    if (cfg.isotonic) curve.values = isotonic_projection(curve.values);
    return curve;
}

double median_reducer(std::span<const double> v) { return sample_median(v); }
double mean_reducer(std::span<const double> v) { return sample_mean(v); }

}  // namespace

void McConfig::validate(bool needs_conditional) const {
    if (K < 2) throw InvalidParameter("McConfig: K must be >= 2");
    if (needs_conditional && conditional_draws() < 2) throw InvalidParameter("McConfig: L must be >= 2");
    if (x_grid.empty()) throw InvalidParameter("McConfig: x_grid must not be empty");
    for (std::size_t i = 1; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > x_grid[i - 1])) throw InvalidParameter("McConfig: x_grid must be strictly increasing");
    }
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw InvalidParameter("EmpiricalCdf: no samples");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const noexcept {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::string to_string(McAlgorithm algorithm) {
    switch (algorithm) {
        case McAlgorithm::M1: return "M1";
        case McAlgorithm::M2: return "M2";
        case McAlgorithm::B1: return "B1";
        case McAlgorithm::B2: return "B2";
    }
    return "?";
}

double sample_median(std::span<const double> values) {
    if (values.empty()) throw InvalidParameter("sample_median: empty input");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t n = v.size();
    const auto upper = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), upper, v.end());
    if (n % 2 == 1) return *upper;
    const double hi = *upper;
    const double lo = *std::max_element(v.begin(), upper);
    return 0.5 * (lo + hi);
}

double sample_mean(std::span<const double> values) {
    if (values.empty()) throw InvalidParameter("sample_mean: empty input");
    // Running mean; exact when all values coincide.
    double mean = 0.0;
    std::size_t n = 0;
    for (double v : values) mean += (v - mean) / static_cast<double>(++n);
    return mean;
}

std::vector<double> isotonic_projection(std::span<const double> values) {
    struct Block {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (double v : values) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            Block last = blocks.back();
            blocks.pop_back();
            blocks.back().sum += last.sum;
            blocks.back().count += last.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
    return out;
}

ApproxCurve algorithm_m1(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg) {
    return analytic_curve(family, prior, cfg, McAlgorithm::M1, median_reducer);
}

ApproxCurve algorithm_m2(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg) {
    return empirical_curve(family, prior, cfg, McAlgorithm::M2, median_reducer);
}

ApproxCurve algorithm_b1(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg) {
    return analytic_curve(family, prior, cfg, McAlgorithm::B1, mean_reducer);
}

ApproxCurve algorithm_b2(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg) {
    return empirical_curve(family, prior, cfg, McAlgorithm::B2, mean_reducer);
}

ApproxCurve approximate(McAlgorithm algorithm, const ConditionalFamily& family, const PriorSpec& prior,
                        const McConfig& cfg) {
    switch (algorithm) {
        case McAlgorithm::M1: return algorithm_m1(family, prior, cfg);
        case McAlgorithm::M2: return algorithm_m2(family, prior, cfg);
        case McAlgorithm::B1: return algorithm_b1(family, prior, cfg);
        case McAlgorithm::B2: return algorithm_b2(family, prior, cfg);
    }
    throw InvalidParameter("unknown Monte Carlo algorithm");
}

double sup_distance(const ApproxCurve& curve, const std::function<double(double)>& reference) {
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.x_grid.size(); ++i) {
        worst = std::max(worst, std::abs(curve.values[i] - reference(curve.x_grid[i])));
    }
    return worst;
}

}  // namespace medmarg
