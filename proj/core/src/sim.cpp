#include "nct/sim.hpp"

#include "nct/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace nct {

namespace {

bool window_covers(const Window& outer, const Window& inner) {
    if (outer.dimension() != inner.dimension()) return false;
    for (int i = 0; i < outer.dimension(); ++i) {
        // Tolerate representation noise from repeated dilation arithmetic.
        const double slack = 1e-12 * std::max(1.0, std::fabs(inner.side(i)));
        if (outer.lower(i) > inner.lower(i) + slack) return false;
        if (outer.upper(i) < inner.upper(i) - slack) return false;
    }
    return true;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Cell key for the uniform grid: FNV-1a over the integer cell coordinates.
struct CellHasher {
    std::size_t operator()(const std::vector<std::int64_t>& cell) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t c : cell) {
            for (int byte = 0; byte < 8; ++byte) {
                h ^= static_cast<std::uint64_t>(c >> (8 * byte)) & 0xffULL;
                h *= 1099511628211ULL;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

std::vector<double> draw_marks(std::size_t n, SeedSpec seed) {
    Rng rng(seed, stream_role::marks);
    std::vector<double> marks(n);
    for (double& m : marks) m = rng.uniform01();
    return marks;
}

} // namespace

PointPattern PointPattern::restricted_to(const Window& sub) const {
    PointPattern out;
    out.dimension = dimension;
    out.window = sub;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!sub.contains(point(i))) continue;
        const auto p = point(i);
        out.coords.insert(out.coords.end(), p.begin(), p.end());
        if (has_marks()) out.marks.push_back(marks[i]);
        if (!retained.empty()) out.retained.push_back(retained[i]);
    }
    return out;
}

void PointPattern::validate() const {
    if (dimension < 1) throw config_error("PointPattern: dimension must be >= 1");
    if (coords.size() % dimension != 0)
        throw config_error("PointPattern: coordinate buffer not a multiple of dimension");
    if (!marks.empty() && marks.size() != size())
        throw config_error("PointPattern: marks must align with points");
    if (!retained.empty() && retained.size() != size())
        throw config_error("PointPattern: retained flags must align with points");
    for (std::size_t i = 0; i < size(); ++i)
        if (!window.contains(point(i))) throw config_error("PointPattern: point outside window");
    for (double m : marks)
        if (!(m >= 0.0 && m <= 1.0)) throw config_error("PointPattern: mark outside [0, 1]");
}

PointPattern sample_ppp(const Model& model, const Window& window, SeedSpec seed) {
    if (model.dimension() != window.dimension())
        throw config_error("sample_ppp: model/window dimension mismatch");
    const int d = model.dimension();
    const double bound = model.is_homogeneous() ? model.lambda() : model.density_bound();

    Rng rng(seed, stream_role::points);
    PointPattern out;
    out.dimension = d;
    out.window = window;
    const std::uint64_t proposals = rng.poisson(bound * window.volume());
    out.coords.reserve(proposals * d);

    if (model.is_homogeneous()) {
        for (std::uint64_t i = 0; i < proposals; ++i)
            for (int k = 0; k < d; ++k)
                out.coords.push_back(rng.uniform(window.lower(k), window.upper(k)));
        return out;
    }

    Rng accept_rng(seed, stream_role::acceptance);
    std::vector<double> candidate(d);
    for (std::uint64_t i = 0; i < proposals; ++i) {
        for (int k = 0; k < d; ++k) candidate[k] = rng.uniform(window.lower(k), window.upper(k));
        const double ratio = model.density()(candidate) / bound;
        if (ratio > 1.0 + 1e-12)
            throw config_error("sample_ppp: density exceeds its declared bound "
                               "(acceptance ratio > 1)");
        if (accept_rng.uniform01() < ratio)
            out.coords.insert(out.coords.end(), candidate.begin(), candidate.end());
    }
    return out;
}

PointPattern sample_ppp(double lambda, const Window& window, int dimension, SeedSpec seed) {
    if (lambda < 0.0) throw config_error("sample_ppp: lambda must be >= 0");
    if (lambda == 0.0) {
        PointPattern out;
        out.dimension = dimension;
        out.window = window;
        return out;
    }
    return sample_ppp(
        Model::homogeneous(dimension, 1.0, lambda, RetentionRule::constant(1.0)), window, seed);
}

namespace {

// Dense counting-sort index over the occupied bounding box; used whenever
// the cell lattice stays proportional to the point count.
std::vector<int> neighbour_counts_dense(const PointPattern& pattern, double r,
                                        std::span<const double> origin,
                                        std::span<const std::int64_t> dims) {
    const int d = pattern.dimension;
    const std::size_t n = pattern.size();
    std::vector<int> counts(n, 0);

    std::vector<std::int64_t> strides(d, 1);
    for (int k = 1; k < d; ++k) strides[k] = strides[k - 1] * dims[k - 1];
    const std::int64_t total_cells = strides[d - 1] * dims[d - 1];

    const auto cell_coord = [&](std::span<const double> p, int k) {
        const auto c = static_cast<std::int64_t>(std::floor((p[k] - origin[k]) / r));
        return std::clamp<std::int64_t>(c, 0, dims[k] - 1);
    };

    std::vector<std::int64_t> cell_of(n);
    std::vector<std::uint32_t> cell_count(total_cells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t id = 0;
        const auto p = pattern.point(i);
        for (int k = 0; k < d; ++k) id += cell_coord(p, k) * strides[k];
        cell_of[i] = id;
        ++cell_count[id + 1];
    }
    for (std::int64_t c = 0; c < total_cells; ++c) cell_count[c + 1] += cell_count[c];
    std::vector<std::uint32_t> order(n);
    {
        std::vector<std::uint32_t> cursor(cell_count.begin(), cell_count.end() - 1);
        for (std::size_t i = 0; i < n; ++i) order[cursor[cell_of[i]]++] = i;
    }

    const double r2 = r * r;
    std::vector<std::int64_t> home(d);
    std::vector<int> offset(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = pattern.point(i);
        for (int k = 0; k < d; ++k) home[k] = cell_coord(p, k);
        offset.assign(d, -1);
        while (true) {
            std::int64_t id = 0;
            bool in_range = true;
            for (int k = 0; k < d && in_range; ++k) {
                const std::int64_t c = home[k] + offset[k];
                in_range = c >= 0 && c < dims[k];
                id += c * strides[k];
            }
            if (in_range) {
                for (std::uint32_t slot = cell_count[id]; slot < cell_count[id + 1]; ++slot) {
                    const std::uint32_t j = order[slot];
                    if (j == i) continue;
                    if (squared_distance(p, pattern.point(j)) <= r2) ++counts[i];
                }
            }
            int k = 0;
            while (k < d && offset[k] == 1) offset[k++] = -1;
            if (k == d) break;
            ++offset[k];
        }
    }
    return counts;
}

std::vector<int> neighbour_counts_hashed(const PointPattern& pattern, double r) {
    const int d = pattern.dimension;
    const std::size_t n = pattern.size();
    std::vector<int> counts(n, 0);

    std::unordered_map<std::vector<std::int64_t>, std::vector<std::uint32_t>, CellHasher> grid;
    grid.reserve(n * 2);
    std::vector<std::int64_t> cell(d);
    const auto cell_of = [&](std::span<const double> p) {
        for (int k = 0; k < d; ++k)
            cell[k] = static_cast<std::int64_t>(std::floor(p[k] / r));
    };
    for (std::size_t i = 0; i < n; ++i) {
        cell_of(pattern.point(i));
        grid[cell].push_back(static_cast<std::uint32_t>(i));
    }

    const double r2 = r * r;
    std::vector<std::int64_t> probe(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = pattern.point(i);
        cell_of(p);
        const std::vector<std::int64_t> home = cell;
        std::vector<int> offset(d, -1);
        while (true) {
            for (int k = 0; k < d; ++k) probe[k] = home[k] + offset[k];
            if (const auto it = grid.find(probe); it != grid.end()) {
                for (const std::uint32_t j : it->second) {
                    if (j == i) continue;
                    if (squared_distance(p, pattern.point(j)) <= r2) ++counts[i];
                }
            }
            int k = 0;
            while (k < d && offset[k] == 1) offset[k++] = -1;
            if (k == d) break;
            ++offset[k];
        }
    }
    return counts;
}

} // namespace

std::vector<int> neighbour_counts(const PointPattern& pattern, double r) {
    if (!(r > 0.0)) throw config_error("neighbour_counts: radius must be > 0");
    const int d = pattern.dimension;
    const std::size_t n = pattern.size();
    if (n == 0) return {};

    // Bounding box of the occupied region decides the lattice size.
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = pattern.point(i);
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    std::vector<std::int64_t> dims(d);
    std::int64_t total_cells = 1;
    const std::int64_t cell_budget =
        std::max<std::int64_t>(static_cast<std::int64_t>(8 * n), 1 << 14);
    bool dense_fits = true;
    for (int k = 0; k < d && dense_fits; ++k) {
        dims[k] = static_cast<std::int64_t>(std::floor((hi[k] - lo[k]) / r)) + 1;
        dense_fits = dims[k] <= cell_budget / std::max<std::int64_t>(total_cells, 1);
        if (dense_fits) total_cells *= dims[k];
    }
    if (dense_fits && total_cells <= cell_budget)
        return neighbour_counts_dense(pattern, r, lo, dims);
    return neighbour_counts_hashed(pattern, r);
}

std::vector<int> neighbour_counts_brute_force(const PointPattern& pattern, double r) {
    const std::size_t n = pattern.size();
    const double r2 = r * r;
    std::vector<int> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (squared_distance(pattern.point(i), pattern.point(j)) <= r2) {
                ++counts[i];
                ++counts[j];
            }
    return counts;
}

namespace {

struct ThinningDecisions {
    std::vector<double> marks;
    std::vector<int> counts;
};

ThinningDecisions prepare_decisions(const PointPattern& input, const Window& core,
                                    const Model& model, SeedSpec seed) {
    if (input.dimension != model.dimension())
        throw config_error("thin: pattern/model dimension mismatch");
    if (input.has_marks() && input.marks.size() != input.size())
        throw config_error("thin: marks do not align with points");
    if (!window_covers(input.window, core.dilated(model.radius())))
        throw config_error("thin: input window is smaller than the r-dilation of the core "
                           "window (buffer violation)");
    ThinningDecisions d;
    d.marks = input.has_marks() ? input.marks : draw_marks(input.size(), seed);
    d.counts = neighbour_counts(input, model.radius());
    return d;
}

} // namespace

PointPattern thin(const PointPattern& input, const Window& core, const Model& model,
                  SeedSpec seed) {
    const ThinningDecisions d = prepare_decisions(input, core, model, seed);
    const RetentionRule& rule = model.rule();

    PointPattern out;
    out.dimension = input.dimension;
    out.window = core;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (!core.contains(input.point(i))) continue;
        if (d.marks[i] <= rule(d.counts[i])) {
            const auto p = input.point(i);
            out.coords.insert(out.coords.end(), p.begin(), p.end());
            out.marks.push_back(d.marks[i]);
            out.retained.push_back(1);
        }
    }
    return out;
}

CoupledThinning thin_coupled(const PointPattern& input, const Window& core, const Model& model,
                             SeedSpec seed) {
    const ThinningDecisions d = prepare_decisions(input, core, model, seed);
    const RetentionRule& rule = model.rule();
    const double m_p = poisson_mixture(rule, model.mean_neighbours(), 1e-12);

    CoupledThinning out;
    out.dependent.dimension = out.independent.dimension = input.dimension;
    out.dependent.window = out.independent.window = core;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (!core.contains(input.point(i))) continue;
        const bool keep_dependent = d.marks[i] <= rule(d.counts[i]);
        const bool keep_independent = d.marks[i] <= m_p;
        if (keep_dependent != keep_independent) ++out.differ_count;
        const auto p = input.point(i);
        if (keep_dependent) {
            out.dependent.coords.insert(out.dependent.coords.end(), p.begin(), p.end());
            out.dependent.marks.push_back(d.marks[i]);
            out.dependent.retained.push_back(1);
        }
        if (keep_independent) {
            out.independent.coords.insert(out.independent.coords.end(), p.begin(), p.end());
            out.independent.marks.push_back(d.marks[i]);
            out.independent.retained.push_back(1);
        }
    }
    return out;
}

PointPattern simulate_thinned(const Model& model, const Window& core, SeedSpec seed) {
    const PointPattern input = sample_ppp(model, core.dilated(model.radius()), seed);
    return thin(input, core, model, seed);
}

CoupledThinning simulate_coupled(const Model& model, const Window& core, SeedSpec seed) {
    const PointPattern input = sample_ppp(model, core.dilated(model.radius()), seed);
    return thin_coupled(input, core, model, seed);
}

} // namespace nct
