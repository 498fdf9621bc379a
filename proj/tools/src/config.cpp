#include "config.hpp"

#include "nct/errors.hpp"
#include "nct/io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace nct::cli {

namespace {

using nlohmann::json;

/// Field access that reports the JSON path of the offending entry.
class Cursor {
public:
    Cursor(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    bool has(const char* field) const { return node_.contains(field); }

    Cursor child(const char* field) const {
        return Cursor(node_.at(field), path_ + "." + field);
    }

    template <typename T>
    T get(const char* field, T fallback) const {
        if (!node_.contains(field)) return fallback;
        try {
            return node_.at(field).get<T>();
        } catch (const json::exception& e) {
            throw config_error("config error at " + path_ + "." + field + ": " + e.what());
        }
    }

    const json& raw() const { return node_; }
    const std::string& path() const { return path_; }

    void fail(const std::string& message) const {
        throw config_error("config error at " + path_ + ": " + message);
    }

private:
    const json& node_;
    std::string path_;
};

void require(bool condition, const Cursor& where, const std::string& message) {
    if (!condition) where.fail(message);
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw config_error("config error at $: expected a JSON object");
    const Cursor top(root, "$");

    RunConfig cfg;
    if (top.has("model")) {
        const Cursor model = top.child("model");
        cfg.dimension = model.get<int>("dimension", cfg.dimension);
        require(cfg.dimension >= 1, model, "dimension must be >= 1");
        cfg.radius = model.get<double>("radius", cfg.radius);
        require(cfg.radius > 0.0, model, "radius must be > 0");
        if (model.has("intensity")) {
            const Cursor intensity = model.child("intensity");
            cfg.intensity.kind = intensity.get<std::string>("kind", cfg.intensity.kind);
            if (cfg.intensity.kind == "constant") {
                cfg.intensity.lambda = intensity.get<double>("lambda", cfg.intensity.lambda);
                require(cfg.intensity.lambda > 0.0, intensity, "lambda must be > 0");
            } else if (cfg.intensity.kind == "step") {
                cfg.intensity.axis = intensity.get<int>("axis", cfg.intensity.axis);
                cfg.intensity.threshold =
                    intensity.get<double>("threshold", cfg.intensity.threshold);
                cfg.intensity.low = intensity.get<double>("low", cfg.intensity.low);
                cfg.intensity.high = intensity.get<double>("high", cfg.intensity.high);
                require(cfg.intensity.axis >= 0 && cfg.intensity.axis < cfg.dimension,
                        intensity, "axis must index a coordinate");
                require(cfg.intensity.low >= 0.0 && cfg.intensity.high >= 0.0, intensity,
                        "step levels must be >= 0");
                require(std::max(cfg.intensity.low, cfg.intensity.high) > 0.0, intensity,
                        "step density must be positive somewhere");
            } else {
                intensity.fail("unknown intensity kind \"" + cfg.intensity.kind + "\"");
            }
        }
        if (model.has("rule")) {
            cfg.rule_json = model.child("rule").raw().dump();
            try {
                rule_from_json_string(cfg.rule_json);
            } catch (const config_error& e) {
                throw config_error("config error at " + model.path() + ".rule: " + e.what());
            }
        }
    }

    if (top.has("window")) {
        const Cursor window = top.child("window");
        cfg.window_lower = window.get<std::vector<double>>("lower", cfg.window_lower);
        cfg.window_upper = window.get<std::vector<double>>("upper", cfg.window_upper);
    } else {
        cfg.window_lower.assign(cfg.dimension, 0.0);
        cfg.window_upper.assign(cfg.dimension, 1.0);
    }
    if (static_cast<int>(cfg.window_lower.size()) != cfg.dimension ||
        static_cast<int>(cfg.window_upper.size()) != cfg.dimension)
        throw config_error("config error at $.window: bounds must have model dimension " +
                           std::to_string(cfg.dimension));

    cfg.master_seed = top.get<std::uint64_t>("seed", cfg.master_seed);
    cfg.threads = top.get<int>("threads", cfg.threads);
    if (top.has("output")) {
        const Cursor output = top.child("output");
        cfg.out_dir = output.get<std::string>("dir", cfg.out_dir);
        cfg.format = output.get<std::string>("format", cfg.format);
        require(cfg.format == "csv" || cfg.format == "json", output,
                "format must be \"csv\" or \"json\"");
    }

    if (top.has("analyze")) {
        const Cursor analyze = top.child("analyze");
        cfg.analyze.t_max = analyze.get<double>("t_max", cfg.analyze.t_max);
        cfg.analyze.grid_points = analyze.get<int>("grid_points", cfg.analyze.grid_points);
        cfg.analyze.tol = analyze.get<double>("tol", cfg.analyze.tol);
        cfg.analyze.expansion_orders =
            analyze.get<std::vector<int>>("expansion_orders", cfg.analyze.expansion_orders);
        require(cfg.analyze.t_max > 0.0, analyze, "t_max must be > 0");
        require(cfg.analyze.grid_points >= 2, analyze, "grid_points must be >= 2");
        require(cfg.analyze.tol > 0.0 && cfg.analyze.tol <= 1e-6, analyze,
                "tol must lie in (0, 1e-6]");
    }

    if (top.has("simulate")) {
        const Cursor simulate = top.child("simulate");
        cfg.simulate.replicates = simulate.get<int>("replicates", cfg.simulate.replicates);
        cfg.simulate.coupled = simulate.get<bool>("coupled", cfg.simulate.coupled);
        cfg.simulate.write_patterns =
            simulate.get<bool>("write_patterns", cfg.simulate.write_patterns);
        cfg.simulate.pattern_format =
            simulate.get<std::string>("pattern_format", cfg.simulate.pattern_format);
        require(cfg.simulate.replicates >= 1, simulate, "replicates must be >= 1");
        require(cfg.simulate.pattern_format == "csv" || cfg.simulate.pattern_format == "bin",
                simulate, "pattern_format must be \"csv\" or \"bin\"");
    }

    if (top.has("estimate")) {
        const Cursor estimate = top.child("estimate");
        cfg.estimate.replicates = estimate.get<int>("replicates", cfg.estimate.replicates);
        cfg.estimate.bin_relative_width =
            estimate.get<double>("bin_relative_width", cfg.estimate.bin_relative_width);
        cfg.estimate.max_relative_distance = estimate.get<double>(
            "max_relative_distance", cfg.estimate.max_relative_distance);
        cfg.estimate.plug_in_intensity =
            estimate.get<bool>("plug_in_intensity", cfg.estimate.plug_in_intensity);
        cfg.estimate.laplace_amplitude =
            estimate.get<double>("laplace_amplitude", cfg.estimate.laplace_amplitude);
        cfg.estimate.laplace_lower =
            estimate.get<std::vector<double>>("laplace_lower", cfg.estimate.laplace_lower);
        cfg.estimate.laplace_upper =
            estimate.get<std::vector<double>>("laplace_upper", cfg.estimate.laplace_upper);
        require(cfg.estimate.replicates >= 1, estimate, "replicates must be >= 1");
        require(cfg.estimate.bin_relative_width > 0.0, estimate,
                "bin_relative_width must be > 0");
        require(cfg.estimate.laplace_amplitude >= 0.0, estimate,
                "laplace_amplitude must be >= 0");
    }

    if (top.has("bounds")) {
        const Cursor bounds = top.child("bounds");
        cfg.bounds.quad_tol = bounds.get<double>("quad_tol", cfg.bounds.quad_tol);
        cfg.bounds.g_sup = bounds.get<double>("g_sup", cfg.bounds.g_sup);
        require(cfg.bounds.quad_tol > 0.0, bounds, "quad_tol must be > 0");
        require(cfg.bounds.g_sup >= 0.0, bounds, "g_sup must be >= 0");
        if (bounds.has("constants")) {
            const Cursor constants = bounds.child("constants");
            cfg.bounds.constants.stein_C_d =
                constants.get<double>("stein_C_d", cfg.bounds.constants.stein_C_d);
            cfg.bounds.constants.laplace_C_d =
                constants.get<double>("laplace_C_d", cfg.bounds.constants.laplace_C_d);
            cfg.bounds.constants.laplace_c_d =
                constants.get<double>("laplace_c_d", cfg.bounds.constants.laplace_c_d);
            cfg.bounds.constants.lower_c_d =
                constants.get<double>("lower_c_d", cfg.bounds.constants.lower_c_d);
            cfg.bounds.constants.lower_Cprime_d =
                constants.get<double>("lower_Cprime_d", cfg.bounds.constants.lower_Cprime_d);
        }
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string RunConfig::canonical_json() const {
    json root;
    root["model"]["dimension"] = dimension;
    root["model"]["radius"] = radius;
    root["model"]["intensity"]["kind"] = intensity.kind;
    if (intensity.kind == "constant") {
        root["model"]["intensity"]["lambda"] = intensity.lambda;
    } else {
        root["model"]["intensity"]["axis"] = intensity.axis;
        root["model"]["intensity"]["threshold"] = intensity.threshold;
        root["model"]["intensity"]["low"] = intensity.low;
        root["model"]["intensity"]["high"] = intensity.high;
    }
    root["model"]["rule"] = json::parse(rule_json);
    root["window"]["lower"] = window_lower;
    root["window"]["upper"] = window_upper;
    root["seed"] = master_seed;
    // Execution details (threads, output directory) are deliberately not
    // part of the canonical form: they cannot change any emitted value,
    // so they must not change the provenance hash either.
    root["output"]["format"] = format;
    root["analyze"] = {{"t_max", analyze.t_max},
                       {"grid_points", analyze.grid_points},
                       {"tol", analyze.tol},
                       {"expansion_orders", analyze.expansion_orders}};
    root["simulate"] = {{"replicates", simulate.replicates},
                        {"coupled", simulate.coupled},
                        {"write_patterns", simulate.write_patterns},
                        {"pattern_format", simulate.pattern_format}};
    root["estimate"] = {{"replicates", estimate.replicates},
                        {"bin_relative_width", estimate.bin_relative_width},
                        {"max_relative_distance", estimate.max_relative_distance},
                        {"plug_in_intensity", estimate.plug_in_intensity},
                        {"laplace_amplitude", estimate.laplace_amplitude},
                        {"laplace_lower", estimate.laplace_lower},
                        {"laplace_upper", estimate.laplace_upper}};
    root["bounds"] = {{"quad_tol", bounds.quad_tol},
                      {"g_sup", bounds.g_sup},
                      {"constants",
                       {{"stein_C_d", bounds.constants.stein_C_d},
                        {"laplace_C_d", bounds.constants.laplace_C_d},
                        {"laplace_c_d", bounds.constants.laplace_c_d},
                        {"lower_c_d", bounds.constants.lower_c_d},
                        {"lower_Cprime_d", bounds.constants.lower_Cprime_d}}}};
    return root.dump();
}

std::string RunConfig::config_hash() const { return hash_hex(fnv1a64(canonical_json())); }

RetentionRule RunConfig::make_rule() const { return rule_from_json_string(rule_json); }

Model RunConfig::make_model() const {
    if (intensity.kind == "constant")
        return Model::homogeneous(dimension, radius, intensity.lambda, make_rule());
    const int axis = intensity.axis;
    const double threshold = intensity.threshold;
    const double low = intensity.low, high = intensity.high;
    return Model::inhomogeneous(
        dimension, radius,
        [axis, threshold, low, high](std::span<const double> x) {
            return x[axis] >= threshold ? high : low;
        },
        std::max(low, high), make_rule());
}

Window RunConfig::make_window() const { return Window(window_lower, window_upper); }

} // namespace nct::cli
