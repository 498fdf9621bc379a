#include "nct/estim.hpp"

#include "nct/errors.hpp"
#include "nct/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace nct {

namespace {

/// Kahan-compensated accumulator; reduction order then only matters at
/// the level of the compensation term itself.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

MeanWithError summarize(std::span<const double> values) {
    MeanWithError out;
    out.n = values.size();
    if (values.empty()) return out;
    KahanSum sum;
    for (double v : values) sum.add(v);
    out.mean = sum.sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        KahanSum sq;
        for (double v : values) sq.add((v - out.mean) * (v - out.mean));
        const double variance = sq.sum / static_cast<double>(values.size() - 1);
        out.std_error = std::sqrt(variance / static_cast<double>(values.size()));
    }
    return out;
}

} // namespace

RadialBins RadialBins::regular(double r, double relative_width, double max_relative_distance) {
    if (!(r > 0.0) || !(relative_width > 0.0) || !(max_relative_distance > relative_width))
        throw config_error("RadialBins: invalid bin layout");
    RadialBins bins;
    const int n = static_cast<int>(std::round(max_relative_distance / relative_width));
    bins.edges.reserve(n + 1);
    // Edges as r * (k * width) so that multiples of r (the jump at r and
    // the dependence horizon 2r) land on exact bin boundaries.
    for (int k = 0; k <= n; ++k) bins.edges.push_back(r * (k * relative_width));
    return bins;
}

MeanWithError estimate_intensity(std::span<const PointPattern> replicates, const Window& window) {
    if (replicates.empty()) throw config_error("estimate_intensity: no replicates");
    const double volume = window.volume();
    std::vector<double> values;
    values.reserve(replicates.size());
    for (const PointPattern& pattern : replicates)
        values.push_back(static_cast<double>(pattern.size()) / volume);
    return summarize(values);
}

GEstimate estimate_g(std::span<const PointPattern> replicates, const Model& model,
                     const RadialBins& bins, bool plug_in_intensity, double tol) {
    if (replicates.empty()) throw config_error("estimate_g: no replicates");
    if (bins.count() == 0) throw config_error("estimate_g: no bins");
    const int d = model.dimension();
    const Window& window = replicates.front().window;
    for (const PointPattern& pattern : replicates)
        if (pattern.window.lower_bounds() != window.lower_bounds() ||
            pattern.window.upper_bounds() != window.upper_bounds())
            throw config_error("estimate_g: replicates live on different windows");
    const double v_d = unit_ball_volume(d);

    std::vector<double> shell(bins.count());
    for (std::size_t b = 0; b < bins.count(); ++b) {
        const double lo = bins.edges[b], hi = bins.edges[b + 1];
        shell[b] = v_d * (std::pow(hi, d) - std::pow(lo, d));
        if (!(shell[b] > 0.0)) throw config_error("estimate_g: bin with zero shell volume");
    }

    double intensity = intensity_homogeneous(model, tol);
    if (plug_in_intensity) intensity = estimate_intensity(replicates, window).mean;
    const double intensity_sq = intensity * intensity;

    const double max_dist = bins.edges.back();
    const double max_dist_sq = max_dist * max_dist;

    // Per-replicate bin values; replicates are independent, so the spread
    // across them gives the standard errors.
    std::vector<std::vector<double>> per_replicate(bins.count(),
                                                   std::vector<double>(replicates.size(), 0.0));
    std::vector<double> h(d);
    for (std::size_t rep = 0; rep < replicates.size(); ++rep) {
        const PointPattern& pattern = replicates[rep];
        std::vector<KahanSum> acc(bins.count());
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            const auto pi = pattern.point(i);
            for (std::size_t j = i + 1; j < pattern.size(); ++j) {
                const auto pj = pattern.point(j);
                double dist_sq = 0.0;
                for (int k = 0; k < d; ++k) {
                    h[k] = pj[k] - pi[k];
                    dist_sq += h[k] * h[k];
                }
                if (dist_sq > max_dist_sq || dist_sq == 0.0) continue;
                const double dist = std::sqrt(dist_sq);
                const auto it =
                    std::upper_bound(bins.edges.begin(), bins.edges.end(), dist);
                if (it == bins.edges.begin() || it == bins.edges.end()) continue;
                const std::size_t b = static_cast<std::size_t>(it - bins.edges.begin()) - 1;
                const double overlap = window.shift_overlap(h);
                if (!(overlap > 0.0)) continue;
                // Both ordered pairs at once; the overlap is symmetric in h.
                acc[b].add(2.0 / overlap);
            }
        }
        for (std::size_t b = 0; b < bins.count(); ++b)
            per_replicate[b][rep] = acc[b].sum / (intensity_sq * shell[b]);
    }

    GEstimate out;
    out.bin_lo.resize(bins.count());
    out.bin_hi.resize(bins.count());
    out.g_hat.resize(bins.count());
    out.std_error.resize(bins.count());
    out.g_reference.resize(bins.count());
    for (std::size_t b = 0; b < bins.count(); ++b) {
        out.bin_lo[b] = bins.edges[b];
        out.bin_hi[b] = bins.edges[b + 1];
        const MeanWithError s = summarize(per_replicate[b]);
        out.g_hat[b] = s.mean;
        out.std_error[b] = s.std_error;
        const double t_mid = 0.5 * (out.bin_lo[b] + out.bin_hi[b]) / model.radius();
        out.g_reference[b] = g_exact(model, t_mid, tol);
    }
    return out;
}

MeanWithError empirical_laplace(std::span<const PointPattern> replicates,
                                const TestFunction& g_test) {
    if (replicates.empty()) throw config_error("empirical_laplace: no replicates");
    if (!g_test) throw config_error("empirical_laplace: missing test function");
    std::vector<double> values;
    values.reserve(replicates.size());
    for (const PointPattern& pattern : replicates) {
        KahanSum exponent;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            const double value = g_test(pattern.point(i));
            if (value < 0.0) throw config_error("empirical_laplace: test function must be >= 0");
            exponent.add(value);
        }
        values.push_back(std::exp(-exponent.sum));
    }
    return summarize(values);
}

TvDiscrepancy tv_discrepancy_mc(const Model& model, const Window& window, int n_replicates,
                                SeedSpec seed, int threads) {
    if (n_replicates < 1) throw config_error("tv_discrepancy_mc: need at least one replicate");
    std::vector<double> differ(n_replicates), indicator(n_replicates);
    parallel_for(static_cast<std::size_t>(n_replicates), threads, [&](std::size_t i) {
        const CoupledThinning coupled =
            simulate_coupled(model, window, seed.with_replicate(seed.replicate_index + i));
        differ[i] = static_cast<double>(coupled.differ_count);
        indicator[i] = coupled.differ_count > 0 ? 1.0 : 0.0;
    });
    TvDiscrepancy out;
    out.p_differ = summarize(indicator);
    out.mean_differ_count = summarize(differ);
    return out;
}

std::vector<PointPattern> run_thinned_replicates(const Model& model, const Window& core,
                                                 int n_replicates, std::uint64_t master_seed,
                                                 int threads) {
    if (n_replicates < 1) throw config_error("run_thinned_replicates: need >= 1 replicate");
    std::vector<PointPattern> out(n_replicates);
    parallel_for(static_cast<std::size_t>(n_replicates), threads, [&](std::size_t i) {
        out[i] = simulate_thinned(model, core, SeedSpec{master_seed, i});
    });
    return out;
}

std::vector<PointPattern> run_ppp_replicates(double lambda, const Window& window, int dimension,
                                             int n_replicates, std::uint64_t master_seed,
                                             int threads) {
    if (n_replicates < 1) throw config_error("run_ppp_replicates: need >= 1 replicate");
    std::vector<PointPattern> out(n_replicates);
    parallel_for(static_cast<std::size_t>(n_replicates), threads, [&](std::size_t i) {
        out[i] = sample_ppp(lambda, window, dimension, SeedSpec{master_seed, i});
    });
    return out;
}

} // namespace nct
