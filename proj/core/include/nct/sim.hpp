#pragma once

#include "nct/analytic.hpp"
#include "nct/geometry.hpp"
#include "nct/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nct {

/// A finite point configuration on a window, stored row-major
/// (point i occupies coords[i*d .. i*d+d)). Patterns produced by
/// thinning carry the uniform retention marks and keep/drop flags.
struct PointPattern {
    int dimension = 0;
    Window window = Window::unit_cube(1);
    std::vector<double> coords;
    std::vector<double> marks;   // empty or one mark per point, in [0, 1]
    std::vector<char> retained;  // empty or one flag per point

    std::size_t size() const { return dimension == 0 ? 0 : coords.size() / dimension; }
    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * dimension, static_cast<std::size_t>(dimension)};
    }

    bool has_marks() const { return !marks.empty(); }

    /// Points inside `sub` (marks follow their points). Used to shrink a
    /// buffered pattern while keeping per-point marks attached.
    PointPattern restricted_to(const Window& sub) const;

    void validate() const;
};

/// Poisson sampling on a window. Homogeneous when the model carries a
/// constant intensity; otherwise sampled at the declared bound and
/// accepted with probability density/bound. An observed acceptance
/// ratio above 1 means the declared bound was wrong and throws.
PointPattern sample_ppp(const Model& model, const Window& window, SeedSpec seed);

/// Convenience overload for plain homogeneous sampling at rate lambda.
PointPattern sample_ppp(double lambda, const Window& window, int dimension, SeedSpec seed);

/// Exact neighbour counts within the closed ball of radius r, point
/// itself excluded. Grid-bucket index with cell edge r.
std::vector<int> neighbour_counts(const PointPattern& pattern, double r);

/// O(n^2) reference implementation, retained as the test oracle.
std::vector<int> neighbour_counts_brute_force(const PointPattern& pattern, double r);

/// Neighbour-count dependent thinning. The input must live on (at least)
/// the r-dilation of `core`; neighbour counts are taken against the full
/// buffered pattern and the retained points are reported on `core`.
/// Marks come from the input pattern when present, else from the seed's
/// mark stream. A point is retained when its mark is <= p(count).
PointPattern thin(const PointPattern& input, const Window& core, const Model& model,
                  SeedSpec seed);

struct CoupledThinning {
    PointPattern dependent;   // neighbour-count thinning restricted to core
    PointPattern independent; // same marks thresholded at m_p (so PPP(lambda m_p))
    std::uint64_t differ_count = 0; // points of input in core whose decisions differ
};

/// The shared-mark coupling between the dependent thinning and the
/// independent thinning at level m_p. Homogeneous models only.
CoupledThinning thin_coupled(const PointPattern& input, const Window& core, const Model& model,
                             SeedSpec seed);

/// Sample input on the r-dilated window and thin back to `core`.
PointPattern simulate_thinned(const Model& model, const Window& core, SeedSpec seed);

CoupledThinning simulate_coupled(const Model& model, const Window& core, SeedSpec seed);

} // namespace nct
