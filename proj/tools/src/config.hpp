#pragma once

#include "nct/analytic.hpp"
#include "nct/bounds.hpp"
#include "nct/geometry.hpp"
#include "nct/rules.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nct::cli {

/// Intensity specification: a constant rate or a two-level step density
/// split by a coordinate threshold (bound = max of the two levels).
struct IntensitySpec {
    std::string kind = "constant"; // "constant" | "step"
    double lambda = 50.0;          // constant kind
    int axis = 0;                  // step kind
    double threshold = 0.5;
    double low = 0.0;
    double high = 50.0;
};

struct AnalyzeOptions {
    double t_max = 2.2;
    int grid_points = 400;
    double tol = 1e-12;
    std::vector<int> expansion_orders = {0, 1, 2, 3};
};

struct SimulateOptions {
    int replicates = 100;
    bool coupled = false;
    bool write_patterns = true;
    std::string pattern_format = "csv"; // "csv" | "bin"
};

struct EstimateOptions {
    int replicates = 500;
    double bin_relative_width = 0.1;
    double max_relative_distance = 3.0;
    bool plug_in_intensity = false;
    double laplace_amplitude = 0.0; // 0 disables the Laplace estimator
    std::vector<double> laplace_lower;
    std::vector<double> laplace_upper;
};

struct BoundsOptions {
    double quad_tol = 1e-8;
    double g_sup = 1.0;
    BoundConstants constants;
};

/// Fully materialized run configuration. Parsing fills defaults, so the
/// canonical JSON form round-trips identically.
struct RunConfig {
    int dimension = 2;
    double radius = 0.05;
    IntensitySpec intensity;
    std::string rule_json = R"({"kind":"matern1"})";
    std::vector<double> window_lower = {0.0, 0.0};
    std::vector<double> window_upper = {1.0, 1.0};
    std::uint64_t master_seed = 1;
    int threads = 0;
    std::string out_dir = "out";
    std::string format = "csv"; // "csv" | "json"

    AnalyzeOptions analyze;
    SimulateOptions simulate;
    EstimateOptions estimate;
    BoundsOptions bounds;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::string& path);

    std::string canonical_json() const;
    std::string config_hash() const;

    RetentionRule make_rule() const;
    Model make_model() const;
    Window make_window() const;
};

} // namespace nct::cli
