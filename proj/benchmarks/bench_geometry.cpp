#include "nct/geometry.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_OverlapClosedForm(benchmark::State& state) {
    const nct::OverlapKernel omega(static_cast<int>(state.range(0)));
    double t = 0.0;
    for (auto _ : state) {
        t += 1e-4;
        if (t > 2.0) t = 0.0;
        benchmark::DoNotOptimize(omega(t));
    }
}
BENCHMARK(BM_OverlapClosedForm)->Arg(2)->Arg(3);

void BM_OverlapQuadrature(benchmark::State& state) {
    const nct::OverlapKernel omega(static_cast<int>(state.range(0)));
    double t = 0.1;
    for (auto _ : state) {
        t += 1e-3;
        if (t > 1.9) t = 0.1;
        benchmark::DoNotOptimize(omega.via_quadrature(t));
    }
}
BENCHMARK(BM_OverlapQuadrature)->Arg(2)->Arg(4)->Arg(6);

void BM_RadialIntegrals(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(nct::radial_integrals(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RadialIntegrals)->Arg(2)->Arg(5);

void BM_ShiftOverlap(benchmark::State& state) {
    const nct::Window window = nct::Window::unit_cube(3);
    const std::vector<double> h{0.2, -0.1, 0.05};
    for (auto _ : state) benchmark::DoNotOptimize(window.shift_overlap(h));
}
BENCHMARK(BM_ShiftOverlap);

} // namespace

BENCHMARK_MAIN();
