#include "nct/estim.hpp"
#include "nct/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_SamplePPP(benchmark::State& state) {
    const nct::Window window = nct::Window::unit_cube(2);
    const double lambda = static_cast<double>(state.range(0));
    std::uint64_t replicate = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(nct::sample_ppp(lambda, window, 2, {42, replicate++}));
}
BENCHMARK(BM_SamplePPP)->Arg(100)->Arg(1000)->Arg(10000);

void BM_NeighbourCountsGrid(benchmark::State& state) {
    const nct::PointPattern pattern =
        nct::sample_ppp(static_cast<double>(state.range(0)), nct::Window::unit_cube(2), 2,
                        {11, 0});
    for (auto _ : state) benchmark::DoNotOptimize(nct::neighbour_counts(pattern, 0.05));
}
BENCHMARK(BM_NeighbourCountsGrid)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_NeighbourCountsBruteForce(benchmark::State& state) {
    const nct::PointPattern pattern =
        nct::sample_ppp(static_cast<double>(state.range(0)), nct::Window::unit_cube(2), 2,
                        {11, 0});
    for (auto _ : state)
        benchmark::DoNotOptimize(nct::neighbour_counts_brute_force(pattern, 0.05));
}
BENCHMARK(BM_NeighbourCountsBruteForce)->Arg(1000)->Arg(4000);

void BM_SimulateThinned(benchmark::State& state) {
    const nct::Model model = nct::Model::homogeneous(
        2, 0.05, static_cast<double>(state.range(0)), nct::RetentionRule::matern_i());
    const nct::Window window = nct::Window::unit_cube(2);
    std::uint64_t replicate = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(nct::simulate_thinned(model, window, {7, replicate++}));
}
BENCHMARK(BM_SimulateThinned)->Arg(50)->Arg(500)->Arg(5000);

void BM_EstimateG(benchmark::State& state) {
    const nct::Model model =
        nct::Model::homogeneous(2, 0.05, 50.0, nct::RetentionRule::matern_i());
    const nct::Window window = nct::Window::unit_cube(2);
    const std::vector<nct::PointPattern> replicates = nct::run_thinned_replicates(
        model, window, static_cast<int>(state.range(0)), 123, 0);
    const nct::RadialBins bins = nct::RadialBins::regular(model.radius());
    for (auto _ : state)
        benchmark::DoNotOptimize(nct::estimate_g(replicates, model, bins));
}
BENCHMARK(BM_EstimateG)->Arg(50)->Arg(200);

} // namespace
