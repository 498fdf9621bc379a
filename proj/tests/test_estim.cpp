#include "nct/estim.hpp"

#include "nct/errors.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <vector>

using namespace nct;

namespace {

const Window kSquare = Window::unit_cube(2);

Model model_with(RetentionRule rule, double lambda = 50.0, double r = 0.05) {
    return Model::homogeneous(2, r, lambda, std::move(rule));
}

} // namespace

TEST_CASE("intensity estimation against analytic targets") {
    SUBCASE("independent thinning") {
        const Model model = model_with(RetentionRule::constant(0.7));
        const auto replicates = run_thinned_replicates(model, kSquare, 400, 31, 0);
        const MeanWithError estimate = estimate_intensity(replicates, kSquare);
        CHECK(std::fabs(estimate.mean - 0.7 * 50.0) < 3.0 * estimate.std_error);
    }
    SUBCASE("Matern I") {
        const Model model = model_with(RetentionRule::matern_i());
        const auto replicates = run_thinned_replicates(model, kSquare, 400, 32, 0);
        const MeanWithError estimate = estimate_intensity(replicates, kSquare);
        const double target = 50.0 * std::exp(-model.mean_neighbours());
        CHECK(std::fabs(estimate.mean - target) < 3.0 * estimate.std_error);
    }
    SUBCASE("no replicates is an error") {
        CHECK_THROWS_AS(estimate_intensity({}, kSquare), config_error);
    }
}

TEST_CASE("bin layout places boundaries on the structural radii") {
    const RadialBins bins = RadialBins::regular(0.05);
    CHECK(bins.count() == 30);
    CHECK(bins.edges.front() == 0.0);
    // Exact boundaries at r and 2r so no bin straddles the jump or the
    // dependence horizon.
    CHECK(bins.edges[10] == 0.05);
    CHECK(bins.edges[20] == 0.05 * 2.0);
    CHECK(bins.edges.back() == doctest::Approx(0.15).epsilon(1e-15));
    CHECK_THROWS_AS(RadialBins::regular(0.0), config_error);
}

TEST_CASE("pair-correlation estimator") {
    SUBCASE("independent thinning stays flat at one") {
        const Model model = model_with(RetentionRule::constant(0.8));
        const auto replicates = run_thinned_replicates(model, kSquare, 300, 77, 0);
        const GEstimate estimate = estimate_g(replicates, model, RadialBins::regular(0.05));
        for (std::size_t b = 0; b < estimate.g_hat.size(); ++b) {
            CHECK(std::fabs(estimate.g_hat[b] - 1.0) < 3.0 * estimate.std_error[b]);
            CHECK(estimate.g_reference[b] == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("Matern I: empty core, Poisson tail") {
        const Model model = model_with(RetentionRule::matern_i());
        const auto replicates = run_thinned_replicates(model, kSquare, 300, 78, 0);
        const GEstimate estimate = estimate_g(replicates, model, RadialBins::regular(0.05));
        for (std::size_t b = 0; b < estimate.g_hat.size(); ++b) {
            if (estimate.bin_hi[b] <= 0.05) {
                CHECK(estimate.g_hat[b] == doctest::Approx(0.0));
                CHECK(estimate.g_reference[b] == doctest::Approx(0.0));
            } else if (estimate.bin_lo[b] >= 0.1) {
                CHECK(std::fabs(estimate.g_hat[b] - 1.0) < 3.0 * estimate.std_error[b]);
            }
        }
    }
    SUBCASE("raw Poisson input self-calibrates to one") {
        const Model unthinned = model_with(RetentionRule::constant(1.0));
        const auto replicates = run_ppp_replicates(50.0, kSquare, 2, 300, 79, 0);
        const GEstimate estimate =
            estimate_g(replicates, unthinned, RadialBins::regular(0.05));
        for (std::size_t b = 0; b < estimate.g_hat.size(); ++b)
            CHECK(std::fabs(estimate.g_hat[b] - 1.0) < 3.0 * estimate.std_error[b]);
    }
    SUBCASE("plug-in intensity mode stays consistent with the analytic mode") {
        const Model model = model_with(RetentionRule::constant(0.8));
        const auto replicates = run_thinned_replicates(model, kSquare, 200, 81, 0);
        const GEstimate analytic =
            estimate_g(replicates, model, RadialBins::regular(0.05), false);
        const GEstimate plug_in =
            estimate_g(replicates, model, RadialBins::regular(0.05), true);
        // Same data, different normalizations: ratio is a constant across bins.
        for (std::size_t b = 0; b < analytic.g_hat.size(); ++b) {
            if (analytic.g_hat[b] == 0.0) continue;
            const double ratio = plug_in.g_hat[b] / analytic.g_hat[b];
            CHECK(ratio == doctest::Approx(plug_in.g_hat[0] / analytic.g_hat[0])
                               .epsilon(1e-10));
            CHECK(std::fabs(plug_in.g_hat[b] - 1.0) < 4.0 * plug_in.std_error[b]);
        }
    }
    SUBCASE("degenerate bins are rejected") {
        RadialBins broken;
        broken.edges = {0.0, 0.05, 0.05};
        const Model model = model_with(RetentionRule::constant(1.0));
        const auto replicates = run_thinned_replicates(model, kSquare, 3, 80, 0);
        CHECK_THROWS_AS(estimate_g(replicates, model, broken), config_error);
    }
}

TEST_CASE("empirical Laplace functional") {
    const Model model = model_with(RetentionRule::constant(0.6));
    const auto replicates = run_thinned_replicates(model, kSquare, 400, 55, 0);
    SUBCASE("zero test function gives exactly one") {
        const MeanWithError value =
            empirical_laplace(replicates, [](std::span<const double>) { return 0.0; });
        CHECK(value.mean == 1.0);
        CHECK(value.std_error == 0.0);
    }
    SUBCASE("independent thinning matches the Poisson closed form") {
        const double beta = 0.8;
        const TestFunction g_test = [beta](std::span<const double> x) {
            return (x[0] >= 0.25 && x[0] <= 0.75 && x[1] >= 0.25 && x[1] <= 0.75) ? beta : 0.0;
        };
        const MeanWithError value = empirical_laplace(replicates, g_test);
        const double expected =
            std::exp(-0.6 * 50.0 * 0.25 * (1.0 - std::exp(-beta)));
        CHECK(std::fabs(value.mean - expected) < 3.0 * value.std_error);
    }
    SUBCASE("negative test functions are rejected") {
        CHECK_THROWS_AS(
            empirical_laplace(replicates, [](std::span<const double>) { return -1.0; }),
            config_error);
    }
}

TEST_CASE("coupled total-variation probe") {
    SUBCASE("constant rule never differs") {
        const Model model = model_with(RetentionRule::constant(0.5));
        const TvDiscrepancy tv = tv_discrepancy_mc(model, kSquare, 100, {91, 0});
        CHECK(tv.p_differ.mean == 0.0);
        CHECK(tv.mean_differ_count.mean == 0.0);
    }
    SUBCASE("Matern I matches the analytic coupling mean and the Markov relation") {
        const Model model = model_with(RetentionRule::matern_i());
        const TvDiscrepancy tv = tv_discrepancy_mc(model, kSquare, 600, {92, 0});
        const double expected =
            50.0 * mean_abs_dev(RetentionRule::matern_i(), model.mean_neighbours());
        CHECK(std::fabs(tv.mean_differ_count.mean - expected) <
              3.0 * tv.mean_differ_count.std_error);
        CHECK(tv.p_differ.mean <=
              tv.mean_differ_count.mean + 3.0 * tv.mean_differ_count.std_error);
    }
}

TEST_CASE("inhomogeneous thinned intensity matches the analytic density") {
    // Step density: the probe box sits deep inside the high region, more
    // than r away from the interface, where the local ball mass is flat.
    const auto density = [](std::span<const double> y) { return y[0] >= 0.5 ? 80.0 : 20.0; };
    const Model model =
        Model::inhomogeneous(2, 0.05, density, 80.0,
                             RetentionRule::geometric_soft_core(0.9, 0.5));
    const Window probe({0.7, 0.1}, {0.9, 0.9});
    const int replicates = 400;
    std::vector<double> counts(replicates);
    for (int i = 0; i < replicates; ++i) {
        const PointPattern thinned =
            simulate_thinned(model, kSquare, {424243, (std::uint64_t)i});
        counts[i] = static_cast<double>(thinned.restricted_to(probe).size()) / probe.volume();
    }
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= replicates;
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    const double se = std::sqrt(var / (replicates - 1) / replicates);
    const std::vector<double> x{0.8, 0.5};
    CHECK(std::fabs(mean - intensity_at(model, x)) < 3.0 * se);
}

TEST_CASE("standard errors shrink like the square root of the replicate count") {
    const Model model = model_with(RetentionRule::matern_i());
    const auto few = run_thinned_replicates(model, kSquare, 400, 123, 0);
    const auto many = run_thinned_replicates(model, kSquare, 800, 123, 0);
    const double ratio = estimate_intensity(many, kSquare).std_error /
                         estimate_intensity(few, kSquare).std_error;
    CHECK(ratio > (1.0 / std::sqrt(2.0)) * 0.85);
    CHECK(ratio < (1.0 / std::sqrt(2.0)) * 1.15);
}

TEST_CASE("estimators are translation invariant") {
    const Model model = model_with(RetentionRule::matern_i());
    const auto replicates = run_thinned_replicates(model, kSquare, 100, 7, 0);
    const std::vector<double> shift{13.25, -4.5};
    std::vector<PointPattern> moved = replicates;
    for (PointPattern& pattern : moved) {
        pattern.window = pattern.window.translated(shift);
        for (std::size_t i = 0; i < pattern.size(); ++i)
            for (int k = 0; k < 2; ++k) pattern.coords[i * 2 + k] += shift[k];
    }
    const Window moved_window = kSquare.translated(shift);

    const MeanWithError base = estimate_intensity(replicates, kSquare);
    const MeanWithError shifted = estimate_intensity(moved, moved_window);
    CHECK(base.mean == doctest::Approx(shifted.mean).epsilon(1e-12));

    const GEstimate g_base = estimate_g(replicates, model, RadialBins::regular(0.05));
    const GEstimate g_shifted = estimate_g(moved, model, RadialBins::regular(0.05));
    for (std::size_t b = 0; b < g_base.g_hat.size(); ++b)
        CHECK(g_base.g_hat[b] == doctest::Approx(g_shifted.g_hat[b]).epsilon(1e-9));
}
