#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "medmarg/distributions.hpp"

namespace medmarg {

struct McConfig {
    // Prior draws.
    std::size_t K = 1000;
    // Conditional draws per prior draw (M2/B2). 0 means "same as K".
    std::size_t L = 0;
    std::uint64_t seed = 0;
    std::vector<double> x_grid;
    // Draw a fresh prior sample at every grid point instead of sharing one.
    bool resample_per_x = false;
    // Project the finished curve onto non-decreasing sequences.
    bool isotonic = false;

    std::size_t conditional_draws() const noexcept { return L == 0 ? K : L; }
    void validate(bool needs_conditional) const;
};

// Right-continuous step function (#samples <= x) / n.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double operator()(double x) const noexcept;
    std::size_t size() const noexcept { return sorted_.size(); }
    std::span<const double> sorted_samples() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

enum class McAlgorithm { M1, M2, B1, B2 };

std::string to_string(McAlgorithm algorithm);

struct ApproxCurve {
    std::vector<double> x_grid;
    std::vector<double> values;
    McAlgorithm algorithm = McAlgorithm::M1;
    McConfig config;
};

// Middle order statistic; mean of the two middle ones for even counts.
// Throws InvalidParameter on empty input.
double sample_median(std::span<const double> values);
double sample_mean(std::span<const double> values);

// Least-squares projection onto non-decreasing sequences (pool adjacent violators).
std::vector<double> isotonic_projection(std::span<const double> values);

// Median of F(x|nu_k) over K prior draws, using the analytic conditional CDF.
ApproxCurve algorithm_m1(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg);
// Median over K prior draws of the empirical CDF built from L conditional draws.
ApproxCurve algorithm_m2(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg);
// Mean-based counterparts of M1 and M2.
ApproxCurve algorithm_b1(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg);
ApproxCurve algorithm_b2(const ConditionalFamily& family, const PriorSpec& prior, const McConfig& cfg);

ApproxCurve approximate(McAlgorithm algorithm, const ConditionalFamily& family, const PriorSpec& prior,
                        const McConfig& cfg);

// max_i |curve.values[i] - reference(curve.x_grid[i])|
double sup_distance(const ApproxCurve& curve, const std::function<double(double)>& reference);

}  // namespace medmarg
