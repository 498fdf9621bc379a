#include "nct/sim.hpp"

#include "nct/errors.hpp"
#include "nct/estim.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace nct;

namespace {

Model matern_model(double lambda = 50.0, double r = 0.05) {
    return Model::homogeneous(2, r, lambda, RetentionRule::matern_i());
}

std::vector<double> attach_marks(PointPattern& pattern, SeedSpec seed) {
    Rng rng(seed, stream_role::marks);
    pattern.marks.resize(pattern.size());
    for (double& m : pattern.marks) m = rng.uniform01();
    return pattern.marks;
}

} // namespace

TEST_CASE("homogeneous sampling has the right mean count") {
    const Window window = Window::unit_cube(2);
    const int replicates = 1000;
    double total = 0.0;
    for (int i = 0; i < replicates; ++i)
        total += static_cast<double>(sample_ppp(100.0, window, 2, {901, (std::uint64_t)i}).size());
    const double mean = total / replicates;
    const double se = std::sqrt(100.0 / replicates);
    CHECK(std::fabs(mean - 100.0) < 3.0 * se);
}

TEST_CASE("zero intensity gives an empty pattern") {
    CHECK(sample_ppp(0.0, Window::unit_cube(2), 2, {1, 1}).size() == 0);
}

TEST_CASE("inhomogeneous sampling") {
    const Window window = Window::unit_cube(2);
    SUBCASE("indicator density covers half the expected mass") {
        const double lambda0 = 80.0;
        const Model model = Model::inhomogeneous(
            2, 0.05, [](std::span<const double> y) { return y[0] < 0.5 ? 80.0 : 0.0; },
            lambda0, RetentionRule::constant(1.0));
        const int replicates = 600;
        double total = 0.0;
        for (int i = 0; i < replicates; ++i)
            total += static_cast<double>(sample_ppp(model, window, {77, (std::uint64_t)i}).size());
        const double mean = total / replicates;
        const double se = std::sqrt(lambda0 / 2.0 / replicates);
        CHECK(std::fabs(mean - lambda0 / 2.0) < 3.0 * se);
    }
    SUBCASE("an undershooting bound is detected") {
        const Model lying = Model::inhomogeneous(
            2, 0.05, [](std::span<const double>) { return 10.0; }, 5.0,
            RetentionRule::constant(1.0));
        CHECK_THROWS_AS(sample_ppp(lying, window, {3, 0}), config_error);
    }
    SUBCASE("points respect the sampling window") {
        const PointPattern pattern = sample_ppp(60.0, window.dilated(0.1), 2, {5, 2});
        for (std::size_t i = 0; i < pattern.size(); ++i)
            CHECK(window.dilated(0.1).contains(pattern.point(i)));
    }
}

TEST_CASE("neighbour counts") {
    SUBCASE("closed-ball convention counts ties at distance exactly r") {
        PointPattern pattern;
        pattern.dimension = 2;
        pattern.window = Window::cube(2, -1.0, 1.0);
        pattern.coords = {0.0, 0.0, 0.05, 0.0};
        const std::vector<int> counts = neighbour_counts(pattern, 0.05);
        CHECK(counts == std::vector<int>{1, 1});
    }
    SUBCASE("single point has no neighbours") {
        PointPattern pattern;
        pattern.dimension = 2;
        pattern.window = Window::unit_cube(2);
        pattern.coords = {0.5, 0.5};
        CHECK(neighbour_counts(pattern, 0.1) == std::vector<int>{0});
    }
    SUBCASE("grid index equals the brute-force oracle") {
        for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
            const PointPattern pattern =
                sample_ppp(200.0, Window::unit_cube(2), 2, {404, seed});
            CHECK(neighbour_counts(pattern, 0.08) ==
                  neighbour_counts_brute_force(pattern, 0.08));
        }
        // Also in three dimensions with a coarser radius.
        const PointPattern pattern = sample_ppp(300.0, Window::unit_cube(3), 3, {405, 0});
        CHECK(neighbour_counts(pattern, 0.2) == neighbour_counts_brute_force(pattern, 0.2));
    }
}

TEST_CASE("thinning basics") {
    const Window core = Window::unit_cube(2);
    const Model model = matern_model();
    const Window buffered = core.dilated(model.radius());
    const PointPattern input = sample_ppp(50.0, buffered, 2, {11, 4});

    SUBCASE("constant rule one keeps everything inside the core") {
        const Model keep = model.with_rule(RetentionRule::constant(1.0));
        const PointPattern out = thin(input, core, keep, {11, 4});
        const PointPattern expected = input.restricted_to(core);
        CHECK(out.coords == expected.coords);
        CHECK(out.retained.size() == out.size());
    }
    SUBCASE("constant rule zero removes everything") {
        const Model drop = model.with_rule(RetentionRule::constant(0.0));
        CHECK(thin(input, core, drop, {11, 4}).size() == 0);
    }
    SUBCASE("Matern I output is isolated in the input pattern") {
        for (std::uint64_t replicate = 0; replicate < 20; ++replicate) {
            const PointPattern buffered_input =
                sample_ppp(50.0, buffered, 2, {500, replicate});
            const PointPattern out = thin(buffered_input, core, model, {500, replicate});
            const std::vector<int> input_counts =
                neighbour_counts_brute_force(buffered_input, model.radius());
            for (std::size_t i = 0; i < out.size(); ++i) {
                // Locate the retained point in the input and check isolation.
                bool found_isolated = false;
                for (std::size_t j = 0; j < buffered_input.size(); ++j) {
                    if (buffered_input.point(j)[0] == out.point(i)[0] &&
                        buffered_input.point(j)[1] == out.point(i)[1]) {
                        found_isolated = input_counts[j] == 0;
                        break;
                    }
                }
                CHECK(found_isolated);
            }
        }
    }
    SUBCASE("a too-small buffer is rejected") {
        const PointPattern tight = sample_ppp(50.0, core, 2, {6, 6});
        CHECK_THROWS_AS(thin(tight, core, model, {6, 6}), config_error);
    }
}

TEST_CASE("determinism and mark reuse") {
    const Window core = Window::unit_cube(2);
    const Model model = matern_model();
    SUBCASE("identical seeds give bit-identical thinned patterns") {
        const PointPattern a = simulate_thinned(model, core, {42, 3});
        const PointPattern b = simulate_thinned(model, core, {42, 3});
        CHECK(a.coords == b.coords);
        CHECK(a.marks == b.marks);
    }
    SUBCASE("replicate runner output is independent of the thread count") {
        const std::vector<PointPattern> serial = run_thinned_replicates(model, core, 16, 99, 1);
        const std::vector<PointPattern> parallel =
            run_thinned_replicates(model, core, 16, 99, 4);
        REQUIRE(serial.size() == parallel.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(serial[i].coords == parallel[i].coords);
            CHECK(serial[i].marks == parallel[i].marks);
        }
    }
    SUBCASE("enlarging the buffer does not change retention inside the core") {
        // Draw once on the 2r-buffer with marks attached to points, then
        // thin both the wide pattern and its r-buffer restriction.
        const double r = model.radius();
        PointPattern wide = sample_ppp(50.0, core.dilated(2.0 * r), 2, {314, 0});
        attach_marks(wide, {314, 0});
        PointPattern narrow = wide.restricted_to(core.dilated(r));
        const PointPattern from_wide = thin(wide, core, model, {314, 0});
        const PointPattern from_narrow = thin(narrow, core, model, {314, 0});
        CHECK(from_wide.coords == from_narrow.coords);
        CHECK(from_wide.marks == from_narrow.marks);
    }
}

TEST_CASE("coupled thinning") {
    const Window core = Window::unit_cube(2);
    SUBCASE("constant rules never disagree") {
        const Model model = matern_model().with_rule(RetentionRule::constant(0.6));
        for (std::uint64_t i = 0; i < 50; ++i)
            CHECK(simulate_coupled(model, core, {21, i}).differ_count == 0);
    }
    SUBCASE("the dependent margin coincides with plain thinning") {
        const Model model = matern_model();
        for (std::uint64_t i = 0; i < 10; ++i) {
            const CoupledThinning coupled = simulate_coupled(model, core, {77, i});
            const PointPattern plain = simulate_thinned(model, core, {77, i});
            CHECK(coupled.dependent.coords == plain.coords);
        }
    }
    SUBCASE("mean disagreement matches the coupling identity within 3 SE") {
        const Model model = matern_model(50.0, 0.05);
        const double mu = model.mean_neighbours();
        const int replicates = 500;
        std::vector<double> counts(replicates);
        for (int i = 0; i < replicates; ++i)
            counts[i] = static_cast<double>(
                simulate_coupled(model, core, {1234, (std::uint64_t)i}).differ_count);
        const double mean =
            std::accumulate(counts.begin(), counts.end(), 0.0) / replicates;
        double var = 0.0;
        for (double c : counts) var += (c - mean) * (c - mean);
        var /= (replicates - 1);
        const double se = std::sqrt(var / replicates);
        const double expected = 50.0 * 1.0 * 2.0 * std::exp(-mu) * (1.0 - std::exp(-mu));
        CHECK(std::fabs(mean - expected) < 3.0 * se);
    }
    SUBCASE("independent margin passes a Poisson goodness-of-fit at level 0.01") {
        const Model model = matern_model(50.0, 0.05);
        const double thinned_rate =
            50.0 * poisson_mixture(RetentionRule::matern_i(), model.mean_neighbours());
        const int replicates = 500;
        std::vector<std::size_t> counts(replicates);
        for (int i = 0; i < replicates; ++i)
            counts[i] = simulate_coupled(model, core, {8888, (std::uint64_t)i}).independent.size();
        CHECK(testsupport::poisson_gof_p_value(counts, thinned_rate) > 0.01);
    }
}

TEST_CASE("coupling identity also holds in three dimensions") {
    const Model model = Model::homogeneous(3, 0.1, 40.0, RetentionRule::matern_i());
    const Window core = Window::unit_cube(3);
    const int replicates = 300;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < replicates; ++i) {
        const double d = static_cast<double>(
            simulate_coupled(model, core, {333, (std::uint64_t)i}).differ_count);
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / replicates;
    const double se = std::sqrt((sum_sq / replicates - mean * mean) / (replicates - 1));
    const double expected = 40.0 * mean_abs_dev(RetentionRule::matern_i(),
                                                model.mean_neighbours());
    CHECK(std::fabs(mean - expected) < 3.0 * se);
}

TEST_CASE("finite-range independence of counts in distant boxes") {
    const Model model = matern_model(50.0, 0.05);
    const Window core = Window::unit_cube(2);
    const Window box_a({0.1, 0.1}, {0.3, 0.3});
    const Window box_b({0.7, 0.7}, {0.9, 0.9});
    const int replicates = 2000;
    std::vector<double> in_a(replicates), in_b(replicates);
    const std::vector<PointPattern> patterns =
        run_thinned_replicates(model, core, replicates, 2718, 0);
    for (int i = 0; i < replicates; ++i) {
        in_a[i] = static_cast<double>(patterns[i].restricted_to(box_a).size());
        in_b[i] = static_cast<double>(patterns[i].restricted_to(box_b).size());
    }
    const auto mean = [&](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    };
    const double ma = mean(in_a), mb = mean(in_b);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (int i = 0; i < replicates; ++i) {
        cov += (in_a[i] - ma) * (in_b[i] - mb);
        va += (in_a[i] - ma) * (in_a[i] - ma);
        vb += (in_b[i] - mb) * (in_b[i] - mb);
    }
    const double correlation = cov / std::sqrt(va * vb);
    CHECK(std::fabs(correlation) < 3.0 / std::sqrt(static_cast<double>(replicates)));
}

TEST_CASE("pattern validation and restriction") {
    PointPattern pattern;
    pattern.dimension = 2;
    pattern.window = Window::unit_cube(2);
    pattern.coords = {0.5, 0.5, 2.0, 0.1};
    CHECK_THROWS_AS(pattern.validate(), config_error);
    pattern.coords = {0.5, 0.5, 0.9, 0.1};
    pattern.marks = {0.2};
    CHECK_THROWS_AS(pattern.validate(), config_error);
    pattern.marks = {0.2, 0.8};
    CHECK_NOTHROW(pattern.validate());
    const PointPattern half = pattern.restricted_to(Window({0.0, 0.0}, {0.6, 1.0}));
    CHECK(half.size() == 1);
    CHECK(half.marks == std::vector<double>{0.2});
}
