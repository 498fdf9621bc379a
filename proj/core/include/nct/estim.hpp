#pragma once

#include "nct/analytic.hpp"
#include "nct/sim.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nct {

struct MeanWithError {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Per-replicate record emitted by the simulation commands.
struct ReplicateSummary {
    std::uint64_t replicate_index = 0;
    std::uint64_t count_in_window = 0;
    std::optional<std::uint64_t> differ_count;
    std::vector<double> laplace_values;
};

/// Radial bin edges (absolute distances, strictly increasing, first > 0
/// boundary at 0 implicit). Default layout: width r/10 over (0, 3r] with
/// an edge exactly at r and at 2r.
struct RadialBins {
    std::vector<double> edges;

    static RadialBins regular(double r, double relative_width = 0.1,
                              double max_relative_distance = 3.0);
    std::size_t count() const { return edges.empty() ? 0 : edges.size() - 1; }
};

struct GEstimate {
    std::vector<double> bin_lo;
    std::vector<double> bin_hi;
    std::vector<double> g_hat;
    std::vector<double> std_error;
    std::vector<double> g_reference; // analytic overlay at bin midpoints
};

/// Mean and standard error of count / |W| across replicates.
MeanWithError estimate_intensity(std::span<const PointPattern> replicates, const Window& window);

/// Translation-corrected binned pair-correlation estimator: each ordered
/// pair at vector difference h contributes 1 / |W intersect (W-h)|; bins
/// are normalized by the squared intensity and the shell volume. The
/// intensity in the denominator is the analytic lambda * m_p unless
/// plug_in_intensity is set.
GEstimate estimate_g(std::span<const PointPattern> replicates, const Model& model,
                     const RadialBins& bins, bool plug_in_intensity = false, double tol = 1e-12);

using TestFunction = std::function<double(std::span<const double>)>;

/// Replicate average of exp(-sum_{y in pattern} g_test(y)).
MeanWithError empirical_laplace(std::span<const PointPattern> replicates,
                                const TestFunction& g_test);

struct TvDiscrepancy {
    MeanWithError p_differ;          // empirical P{coupled configurations differ}
    MeanWithError mean_differ_count; // empirical E[D_W]
};

/// Runs the shared-mark coupling n_replicates times and reports how often
/// and by how much the dependent and independent thinnings disagree on W.
TvDiscrepancy tv_discrepancy_mc(const Model& model, const Window& window, int n_replicates,
                                SeedSpec seed, int threads = 0);

/// n independent thinned replicates on `core`, replicate i seeded with
/// (master_seed, i). Parallel; output in replicate order.
std::vector<PointPattern> run_thinned_replicates(const Model& model, const Window& core,
                                                 int n_replicates, std::uint64_t master_seed,
                                                 int threads = 0);

/// Plain Poisson replicates (no thinning), for estimator self-checks.
std::vector<PointPattern> run_ppp_replicates(double lambda, const Window& window, int dimension,
                                             int n_replicates, std::uint64_t master_seed,
                                             int threads = 0);

} // namespace nct
