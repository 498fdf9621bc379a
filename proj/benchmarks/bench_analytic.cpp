#include "nct/analytic.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

nct::Model benchmark_model(double mu) {
    const double radius = std::sqrt(mu / (50.0 * M_PI));
    return nct::Model::homogeneous(2, radius, 50.0,
                                   nct::RetentionRule::geometric_soft_core(0.9, 0.5));
}

void BM_PoissonMixture(benchmark::State& state) {
    const nct::RetentionRule rule = nct::RetentionRule::logistic(0.5, 2.0);
    const double mu = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(nct::poisson_mixture(rule, mu));
}
BENCHMARK(BM_PoissonMixture)->Arg(1)->Arg(10)->Arg(100);

void BM_GExactPoint(benchmark::State& state) {
    const nct::Model model = benchmark_model(static_cast<double>(state.range(0)));
    double t = 0.05;
    for (auto _ : state) {
        t += 1e-3;
        if (t > 1.95) t = 0.05;
        benchmark::DoNotOptimize(nct::g_exact(model, t));
    }
}
BENCHMARK(BM_GExactPoint)->Arg(1)->Arg(3)->Arg(8);

void BM_GOracleTripleSum(benchmark::State& state) {
    const nct::Model model = benchmark_model(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(nct::g_oracle_triple_sum(model, 0.7));
}
BENCHMARK(BM_GOracleTripleSum)->Arg(1)->Arg(3);

void BM_GCurveDefaultGrid(benchmark::State& state) {
    const nct::Model model = benchmark_model(1.0);
    const std::vector<double> grid = nct::default_t_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(nct::g_curve(model, grid, 1e-12, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GCurveDefaultGrid)->Arg(1)->Arg(2);

} // namespace
