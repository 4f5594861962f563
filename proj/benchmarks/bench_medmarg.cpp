#include <benchmark/benchmark.h>

#include <vector>

#include "medmarg/medmarg.hpp"

using namespace medmarg;

namespace {

std::vector<double> grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

void BM_MedianFastPath(benchmark::State& state) {
    const auto m = MarginalCdf::median_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit());
    double x = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.cdf(x));
        x = x > 2.0 ? -2.0 : x + 0.01;
    }
}
BENCHMARK(BM_MedianFastPath);

void BM_MedianQuantileSolve(benchmark::State& state) {
    const auto m = MarginalCdf::median_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit(), {},
                                             MarginalMethod::quantile_solve);
    double x = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.cdf(x));
        x = x > 2.0 ? -2.0 : x + 0.01;
    }
}
BENCHMARK(BM_MedianQuantileSolve)->Unit(benchmark::kMicrosecond);

void BM_MeanQuadratureCdf(benchmark::State& state) {
    const auto m = MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit());
    double x = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.cdf(x));
        x = x > 2.0 ? -2.0 : x + 0.01;
    }
}
BENCHMARK(BM_MeanQuadratureCdf)->Unit(benchmark::kMicrosecond);

void BM_MeanQuadraturePdf(benchmark::State& state) {
    const auto m = MarginalCdf::mean_based(ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit());
    double x = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.pdf(x));
        x = x > 2.0 ? -2.0 : x + 0.01;
    }
}
BENCHMARK(BM_MeanQuadraturePdf)->Unit(benchmark::kMicrosecond);

void BM_Approximation(benchmark::State& state) {
    const auto alg = static_cast<McAlgorithm>(state.range(0));
    McConfig cfg;
    cfg.K = static_cast<std::size_t>(state.range(1));
    cfg.x_grid = grid(0.0, 10.0, 201);
    for (auto _ : state) {
        benchmark::DoNotOptimize(approximate(alg, ConditionalFamily::exponential_rate(), PriorSpec::uniform_unit(), cfg));
        ++cfg.seed;
    }
    state.SetLabel(to_string(alg));
}
BENCHMARK(BM_Approximation)
    ->Args({static_cast<int>(McAlgorithm::M1), 1000})
    ->Args({static_cast<int>(McAlgorithm::M1), 100000})
    ->Args({static_cast<int>(McAlgorithm::M2), 1000})
    ->Args({static_cast<int>(McAlgorithm::B1), 100000})
    ->Args({static_cast<int>(McAlgorithm::B2), 1000})
    ->Unit(benchmark::kMillisecond);

void BM_PowerCurveExact(benchmark::State& state) {
    const auto test = one_sided_test(
        MarginalCdf::mean_based(ConditionalFamily::normal_mean_sd(0.0), PriorSpec::exponential_unit()), 0.05);
    const auto mu = grid(-3.0, 0.0, 61);
    for (auto _ : state) benchmark::DoNotOptimize(power_curve(test, mu, PowerMode::exact));
}
BENCHMARK(BM_PowerCurveExact)->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State& state) {
    const auto kind = static_cast<ObjectiveKind>(state.range(0));
    const auto data = PriorSpec::uniform_unit().sample_n(1, 50);
    const EstimationProblem problem{data, ConditionalFamily::normal_mean_var(0.0), PriorSpec::exponential_unit(),
                                    {-2.0, 3.0}, kind, {}};
    for (auto _ : state) benchmark::DoNotOptimize(estimate(problem, 1e-6));
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_Estimate)
    ->Arg(static_cast<int>(ObjectiveKind::median_marginal))
    ->Arg(static_cast<int>(ObjectiveKind::mean_marginal))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
