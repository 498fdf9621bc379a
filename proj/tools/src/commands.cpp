#include "commands.hpp"

#include "nct/bounds.hpp"
#include "nct/errors.hpp"
#include "nct/estim.hpp"
#include "nct/io.hpp"
#include "nct/parallel.hpp"
#include "nct/sim.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nct::cli {

namespace {

using nlohmann::json;

std::string provenance_of(const RunConfig& config) {
    return "config_hash=" + config.config_hash();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path.string());
    out << content;
}

std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
    return std::filesystem::path(config.out_dir) / name;
}

void write_manifest(const RunConfig& config, const std::string& command,
                    std::int64_t wall_time_ms, json extra = json::object()) {
    json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = config.config_hash();
    manifest["config"] = json::parse(config.canonical_json());
    manifest["wall_time_ms"] = wall_time_ms;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    manifest["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    write_file(out_path(config, command + "_manifest.json"), manifest.dump(2) + "\n");
}

class Stopwatch {
public:
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace

int cmd_analyze(const RunConfig& config) {
    const Stopwatch watch;
    const Model model = config.make_model();
    if (!model.is_homogeneous())
        throw config_error("analyze needs a constant intensity (pair correlation and the "
                           "closed-form intensity are homogeneous-input results)");
    const std::string provenance = provenance_of(config);
    const double mu = model.mean_neighbours();
    const double m_p = poisson_mixture(model.rule(), mu, config.analyze.tol);

    // Intensity summary with the finite-difference expansions.
    if (config.format == "json") {
        json out;
        out["provenance"] = provenance;
        out["mu"] = mu;
        out["m_p"] = m_p;
        out["thinned_intensity"] = model.lambda() * m_p;
        for (int order : config.analyze.expansion_orders) {
            const IntensityExpansion e = intensity_expansion(model, order);
            out["expansions"].push_back({{"order", order},
                                         {"partial_sum", e.partial_sum},
                                         {"remainder_bound", e.remainder_bound}});
        }
        write_file(out_path(config, "intensity.json"), out.dump(2) + "\n");
    } else {
        std::ostringstream out;
        out << "# " << provenance << "\nquantity,value\n";
        out << "mu," << format_double(mu) << '\n';
        out << "m_p," << format_double(m_p) << '\n';
        out << "thinned_intensity," << format_double(model.lambda() * m_p) << '\n';
        for (int order : config.analyze.expansion_orders) {
            const IntensityExpansion e = intensity_expansion(model, order);
            out << "expansion_order_" << order << ',' << format_double(e.partial_sum) << '\n';
            out << "expansion_remainder_" << order << ',' << format_double(e.remainder_bound)
                << '\n';
        }
        write_file(out_path(config, "intensity.csv"), out.str());
    }

    // Pair-correlation curve over the requested grid plus the jump probes.
    std::vector<double> grid;
    grid.reserve(config.analyze.grid_points + 2);
    for (int k = 1; k <= config.analyze.grid_points; ++k)
        grid.push_back(config.analyze.t_max * (static_cast<double>(k) / config.analyze.grid_points));
    if (config.analyze.t_max > 1.0) {
        grid.push_back(1.0);
        grid.push_back(1.0 + 1e-9);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const GCurve curve = g_curve(model, grid, config.analyze.tol, config.threads);
    write_file(out_path(config, config.format == "json" ? "g_curve.json" : "g_curve.csv"),
               config.format == "json" ? gcurve_to_json(curve, provenance)
                                       : gcurve_to_csv(curve, provenance));

    // Contact-scale expansion against the exact curve, when defined.
    const RetentionRule rule = config.make_rule();
    const bool generic = rule(0) > 0.0 && rule(1) > 0.0;
    const bool p0zero = rule(0) == 0.0 && rule(1) > 0.0;
    if (generic || p0zero) {
        std::ostringstream out;
        out << "# " << provenance << "\nt,g_exact,g_expansion,expansion_valid\n";
        for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
            const double t = curve.t_grid[i];
            if (t > 2.0) continue;
            double expansion = 0.0;
            bool valid = true;
            if (generic) {
                const GExpansion e = g_expansion_generic(model, t);
                expansion = e.value;
                valid = e.valid;
            } else {
                expansion = g_expansion_p0zero(model, t);
            }
            out << format_double(t) << ',' << format_double(curve.values[i]) << ','
                << format_double(expansion) << ',' << (valid ? 1 : 0) << '\n';
        }
        write_file(out_path(config, "expansion_comparison.csv"), out.str());
    }

    write_manifest(config, "analyze", watch.elapsed_ms());
    return 0;
}

int cmd_simulate(const RunConfig& config) {
    const Stopwatch watch;
    const Model model = config.make_model();
    const Window window = config.make_window();
    const std::string provenance = provenance_of(config);
    const int n = config.simulate.replicates;

    std::vector<PointPattern> patterns(n);
    std::vector<ReplicateSummary> summaries(n);
    parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t i) {
        const SeedSpec seed{config.master_seed, i};
        ReplicateSummary& summary = summaries[i];
        summary.replicate_index = i;
        if (config.simulate.coupled) {
            CoupledThinning coupled = simulate_coupled(model, window, seed);
            patterns[i] = std::move(coupled.dependent);
            summary.differ_count = coupled.differ_count;
        } else {
            patterns[i] = simulate_thinned(model, window, seed);
        }
        summary.count_in_window = patterns[i].size();
    });

    std::ostringstream summary_csv;
    summary_csv << "# " << provenance << "\nreplicate_index,count_in_window";
    if (config.simulate.coupled) summary_csv << ",differ_count";
    summary_csv << '\n';
    for (const ReplicateSummary& summary : summaries) {
        summary_csv << summary.replicate_index << ',' << summary.count_in_window;
        if (summary.differ_count) summary_csv << ',' << *summary.differ_count;
        summary_csv << '\n';
    }
    write_file(out_path(config, "summaries.csv"), summary_csv.str());

    if (config.simulate.write_patterns) {
        if (config.simulate.pattern_format == "bin") {
            std::ostringstream out(std::ios::binary);
            // Header: config hash for provenance, then the pattern count,
            // then each pattern length-prefixed.
            const auto put_u64 = [&out](std::uint64_t value) {
                for (int b = 0; b < 8; ++b)
                    out.put(static_cast<char>((value >> (8 * b)) & 0xff));
            };
            put_u64(fnv1a64(config.canonical_json()));
            put_u64(static_cast<std::uint64_t>(n));
            for (const PointPattern& pattern : patterns) pattern_to_binary(out, pattern);
            write_file(out_path(config, "patterns.bin"), out.str());
        } else {
            std::ostringstream out;
            out << "# " << provenance << "\nreplicate";
            for (int k = 0; k < model.dimension(); ++k) out << ",x" << (k + 1);
            out << ",mark,retained\n";
            for (int i = 0; i < n; ++i) {
                const PointPattern& pattern = patterns[i];
                for (std::size_t j = 0; j < pattern.size(); ++j) {
                    out << i;
                    const auto p = pattern.point(j);
                    for (int k = 0; k < pattern.dimension; ++k)
                        out << ',' << format_double(p[k]);
                    out << ',' << format_double(pattern.marks[j]) << ','
                        << static_cast<int>(pattern.retained[j]) << '\n';
                }
            }
            write_file(out_path(config, "patterns.csv"), out.str());
        }
    }

    json extra;
    extra["replicates"] = n;
    extra["coupled"] = config.simulate.coupled;
    write_manifest(config, "simulate", watch.elapsed_ms(), extra);
    return 0;
}

int cmd_estimate(const RunConfig& config) {
    const Stopwatch watch;
    const Model model = config.make_model();
    if (!model.is_homogeneous())
        throw config_error("estimate needs a constant intensity for the analytic overlays");
    const Window window = config.make_window();
    const std::string provenance = provenance_of(config);

    const std::vector<PointPattern> replicates = run_thinned_replicates(
        model, window, config.estimate.replicates, config.master_seed, config.threads);

    const MeanWithError intensity = estimate_intensity(replicates, window);
    const double analytic = intensity_homogeneous(model);
    {
        std::ostringstream out;
        out << "# " << provenance << "\nquantity,value\n";
        out << "intensity_hat," << format_double(intensity.mean) << '\n';
        out << "intensity_se," << format_double(intensity.std_error) << '\n';
        out << "intensity_analytic," << format_double(analytic) << '\n';
        out << "replicates," << replicates.size() << '\n';
        write_file(out_path(config, "intensity_estimate.csv"), out.str());
    }

    const RadialBins bins = RadialBins::regular(model.radius(), config.estimate.bin_relative_width,
                                                config.estimate.max_relative_distance);
    const GEstimate g_hat =
        estimate_g(replicates, model, bins, config.estimate.plug_in_intensity);
    write_file(out_path(config, "g_estimate.csv"), gestimate_to_csv(g_hat, provenance));

    if (config.estimate.laplace_amplitude > 0.0) {
        const std::vector<double>& lower = config.estimate.laplace_lower;
        const std::vector<double>& upper = config.estimate.laplace_upper;
        if (static_cast<int>(lower.size()) != model.dimension() ||
            static_cast<int>(upper.size()) != model.dimension())
            throw config_error("estimate.laplace_lower/upper must match the model dimension");
        const double amplitude = config.estimate.laplace_amplitude;
        const TestFunction g_test = [&lower, &upper, amplitude](std::span<const double> x) {
            for (std::size_t k = 0; k < lower.size(); ++k)
                if (x[k] < lower[k] || x[k] > upper[k]) return 0.0;
            return amplitude;
        };
        const MeanWithError laplace = empirical_laplace(replicates, g_test);
        // Poisson reference: log L = -lambda' (1 - e^{-a}) |box n W|.
        double box_volume = 1.0;
        for (int k = 0; k < model.dimension(); ++k) {
            const double lo = std::max(lower[k], window.lower(k));
            const double hi = std::min(upper[k], window.upper(k));
            box_volume *= std::max(0.0, hi - lo);
        }
        const double log_reference = -analytic * (1.0 - std::exp(-amplitude)) * box_volume;
        std::ostringstream out;
        out << "# " << provenance << "\nquantity,value\n";
        out << "laplace_hat," << format_double(laplace.mean) << '\n';
        out << "laplace_se," << format_double(laplace.std_error) << '\n';
        out << "log_laplace_hat," << format_double(std::log(laplace.mean)) << '\n';
        out << "log_laplace_poisson," << format_double(log_reference) << '\n';
        write_file(out_path(config, "laplace_estimate.csv"), out.str());
    }

    json extra;
    extra["replicates"] = config.estimate.replicates;
    write_manifest(config, "estimate", watch.elapsed_ms(), extra);
    return 0;
}

int cmd_bounds(const RunConfig& config) {
    const Stopwatch watch;
    const Model model = config.make_model();
    if (!model.is_homogeneous())
        throw config_error("bounds needs a constant intensity (use the library API for the "
                           "inhomogeneous coupling bound)");
    const Window window = config.make_window();
    const std::string provenance = provenance_of(config);

    const RouteComparison table =
        compare_routes(model, window, config.bounds.constants, config.bounds.g_sup,
                       config.bounds.quad_tol, config.threads);
    write_file(out_path(config, "bounds_comparison.csv"), comparison_to_csv(table, provenance));
    write_file(out_path(config, "bounds_comparison.md"),
               comparison_to_markdown(table, provenance));

    // Individual reports for the configured rule (first row of the table).
    for (std::size_t j = 0; j < table.routes.size(); ++j) {
        const BoundReport& report = table.reports.front()[j];
        write_file(out_path(config,
                            std::string("bound_") + route_name(table.routes[j]) + ".json"),
                   bound_report_to_json(report, provenance) + "\n");
    }

    write_manifest(config, "bounds", watch.elapsed_ms());
    return 0;
}

int cmd_selftest(const RunConfig& config) {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        std::cout << "selftest: " << name << (ok ? " ... ok" : " ... FAIL") << '\n';
        if (!ok) ++failures;
    };

    // Reduced-scale invariant sweep; each block mirrors a full test-suite
    // property at a size that runs in well under a second.
    {
        const OverlapKernel omega(2);
        bool monotone = true, matches = true;
        double previous = 1.0;
        for (int i = 1; i <= 100; ++i) {
            const double t = 2.0 * i / 100.0;
            const double value = omega(t);
            monotone = monotone && value <= previous + 1e-12;
            matches = matches && std::fabs(value - omega.via_quadrature(t)) < 1e-9;
            previous = value;
        }
        check("overlap kernel monotone", monotone);
        check("overlap closed form vs quadrature", matches);
    }
    {
        const RetentionRule rule = RetentionRule::geometric_soft_core(0.9, 0.5);
        bool ok = true;
        for (int n = 0; n <= 8; ++n) {
            double reconstructed = 0.0, binom = 1.0;
            for (int k = 0; k <= n; ++k) {
                reconstructed += binom * rule.finite_difference(k);
                binom = binom * (n - k) / (k + 1.0);
            }
            ok = ok && std::fabs(reconstructed - rule(n)) < 1e-10;
        }
        check("finite-difference inversion", ok);
    }
    {
        bool ok = true;
        for (const RetentionRule& rule :
             {RetentionRule::matern_i(), RetentionRule::geometric_soft_core(0.9, 0.5)}) {
            const Model model = Model::homogeneous(2, 0.05638, 50.0, rule); // mu ~ 0.5
            for (double t : {0.9, 1.5}) {
                ok = ok &&
                     std::fabs(g_exact(model, t) - g_oracle_triple_sum(model, t)) <= 1e-9;
            }
            ok = ok && g_exact(model, 2.5) == 1.0;
        }
        check("pair-correlation oracle agreement and finite range", ok);
    }
    {
        const Model model = Model::homogeneous(2, 0.0252, 50.0, RetentionRule::matern_i());
        const IntensityExpansion e = intensity_expansion(model, 2);
        check("intensity expansion remainder",
              std::fabs(intensity_homogeneous(model) - e.partial_sum) <= e.remainder_bound);
    }
    {
        const Model model = Model::homogeneous(2, 0.05, 30.0, RetentionRule::matern_i());
        const Window window = Window::unit_cube(2);
        const TvDiscrepancy tv =
            tv_discrepancy_mc(model, window, 200, {config.master_seed, 0}, config.threads);
        const double expected =
            30.0 * mean_abs_dev(RetentionRule::matern_i(), model.mean_neighbours());
        const bool ok = std::fabs(tv.mean_differ_count.mean - expected) <=
                        4.0 * tv.mean_differ_count.std_error;
        check("coupling identity (4 SE)", ok);
    }
    {
        const Model model = Model::homogeneous(2, 0.05, 50.0, RetentionRule::parity());
        const Window window = Window::unit_cube(2);
        const PointPattern a = simulate_thinned(model, window, {config.master_seed, 7});
        const PointPattern b = simulate_thinned(model, window, {config.master_seed, 7});
        check("replicate determinism",
              a.coords == b.coords && a.marks == b.marks && a.retained == b.retained);
    }
    {
        const Model model = Model::homogeneous(2, 0.0797, 50.0,
                                               RetentionRule::geometric_soft_core(0.9, 0.5));
        const BoundReport moderate = bound_stein_moderate(model, Window::unit_cube(2));
        const CorrelationIntegral integral = correlation_integral(model, 1e-6);
        check("moderate-r surrogate dominates the correlation integral",
              moderate.terms.at("surrogate_integral") >= integral.total - 1e-12);
    }

    if (failures > 0) {
        std::cout << "selftest: " << failures << " check(s) FAILED\n";
        return 4;
    }
    std::cout << "selftest: all checks passed\n";
    return 0;
}

} // namespace nct::cli
