#include "nct/io.hpp"

#include "nct/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace nct {

namespace {

using nlohmann::json;

void write_u64_le(std::ostream& out, std::uint64_t value) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw config_error("binary pattern: truncated stream");
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return value;
}

void write_f64_le(std::ostream& out, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, 8);
    write_u64_le(out, bits);
}

double read_f64_le(std::istream& in) {
    const std::uint64_t bits = read_u64_le(in);
    double value;
    std::memcpy(&value, &bits, 8);
    return value;
}

std::string provenance_comment(const std::string& provenance) {
    return provenance.empty() ? std::string() : "# " + provenance + "\n";
}

} // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t hash) {
    char buffer[20];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

std::string gcurve_to_csv(const GCurve& curve, const std::string& provenance) {
    std::ostringstream out;
    out << provenance_comment(provenance) << "t,g\n";
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
        out << format_double(curve.t_grid[i]) << ',' << format_double(curve.values[i]) << '\n';
    return out.str();
}

std::string gcurve_to_json(const GCurve& curve, const std::string& provenance) {
    std::ostringstream out;
    out << "{";
    if (!provenance.empty()) out << "\"provenance\":\"" << provenance << "\",";
    out << "\"t\":[";
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
        out << (i ? "," : "") << format_double(curve.t_grid[i]);
    out << "],\"g\":[";
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        out << (i ? "," : "") << format_double(curve.values[i]);
    out << "]}";
    return out.str();
}

std::string gestimate_to_csv(const GEstimate& estimate, const std::string& provenance) {
    std::ostringstream out;
    out << provenance_comment(provenance) << "bin_lo,bin_hi,g_hat,se,g_exact\n";
    for (std::size_t b = 0; b < estimate.g_hat.size(); ++b) {
        out << format_double(estimate.bin_lo[b]) << ',' << format_double(estimate.bin_hi[b])
            << ',' << format_double(estimate.g_hat[b]) << ','
            << format_double(estimate.std_error[b]) << ','
            << format_double(estimate.g_reference[b]) << '\n';
    }
    return out.str();
}

std::string pattern_to_csv(const PointPattern& pattern, const std::string& provenance) {
    std::ostringstream out;
    out << provenance_comment(provenance);
    for (int k = 0; k < pattern.dimension; ++k) out << 'x' << (k + 1) << ',';
    out << "mark,retained\n";
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const auto p = pattern.point(i);
        for (int k = 0; k < pattern.dimension; ++k) out << format_double(p[k]) << ',';
        out << (pattern.has_marks() ? format_double(pattern.marks[i]) : "nan") << ','
            << (pattern.retained.empty() ? 1 : static_cast<int>(pattern.retained[i])) << '\n';
    }
    return out.str();
}

void pattern_to_binary(std::ostream& out, const PointPattern& pattern) {
    write_u64_le(out, pattern.size());
    write_u64_le(out, static_cast<std::uint64_t>(pattern.dimension));
    for (double c : pattern.coords) write_f64_le(out, c);
    write_u64_le(out, pattern.marks.size());
    for (double m : pattern.marks) write_f64_le(out, m);
    write_u64_le(out, pattern.retained.size());
    for (char f : pattern.retained) write_f64_le(out, static_cast<double>(f));
}

PointPattern pattern_from_binary(std::istream& in, const Window& window) {
    PointPattern pattern;
    const std::uint64_t n = read_u64_le(in);
    pattern.dimension = static_cast<int>(read_u64_le(in));
    pattern.window = window;
    pattern.coords.resize(n * pattern.dimension);
    for (double& c : pattern.coords) c = read_f64_le(in);
    pattern.marks.resize(read_u64_le(in));
    for (double& m : pattern.marks) m = read_f64_le(in);
    const std::uint64_t flags = read_u64_le(in);
    pattern.retained.resize(flags);
    for (std::uint64_t i = 0; i < flags; ++i)
        pattern.retained[i] = read_f64_le(in) != 0.0 ? 1 : 0;
    return pattern;
}

std::string bound_report_to_json(const BoundReport& report, const std::string& provenance) {
    std::ostringstream out;
    out << "{";
    if (!provenance.empty()) out << "\"provenance\":\"" << provenance << "\",";
    out << "\"route\":\"" << route_name(report.route) << "\",\"applicable\":"
        << (report.applicable ? "true" : "false") << ",\"total\":"
        << format_double(report.total) << ",\"terms\":{";
    bool first = true;
    for (const auto& [name, value] : report.terms) {
        out << (first ? "" : ",") << '"' << name << "\":" << format_double(value);
        first = false;
    }
    out << "},\"constants_used\":{";
    first = true;
    for (const auto& [name, value] : report.constants_used) {
        out << (first ? "" : ",") << '"' << name << "\":" << format_double(value);
        first = false;
    }
    out << "},\"validity_notes\":[";
    first = true;
    for (const auto& note : report.validity_notes) {
        out << (first ? "" : ",") << "{\"check\":" << json(note.description).dump()
            << ",\"satisfied\":" << (note.satisfied ? "true" : "false") << '}';
        first = false;
    }
    out << "]}";
    return out.str();
}

std::string comparison_to_csv(const RouteComparison& table, const std::string& provenance) {
    std::ostringstream out;
    out << provenance_comment(provenance) << "rule";
    for (const BoundRoute route : table.routes) out << ',' << route_name(route);
    out << '\n';
    for (std::size_t i = 0; i < table.rule_names.size(); ++i) {
        out << '"' << table.rule_names[i] << '"';
        for (const BoundReport& report : table.reports[i])
            out << ',' << format_double(report.total);
        out << '\n';
    }
    return out.str();
}

std::string comparison_to_markdown(const RouteComparison& table,
                                   const std::string& provenance) {
    std::ostringstream out;
    if (!provenance.empty()) out << "<!-- " << provenance << " -->\n";
    out << "| rule |";
    for (const BoundRoute route : table.routes) out << ' ' << route_name(route) << " |";
    out << "\n|---|";
    for (std::size_t j = 0; j < table.routes.size(); ++j) out << "---|";
    out << '\n';
    for (std::size_t i = 0; i < table.rule_names.size(); ++i) {
        out << "| `" << table.rule_names[i] << "` |";
        for (const BoundReport& report : table.reports[i]) {
            if (!report.applicable)
                out << " n/a |";
            else {
                char buffer[32];
                std::snprintf(buffer, sizeof(buffer), "%.4g", report.total);
                out << ' ' << buffer << " |";
            }
        }
        out << '\n';
    }
    return out.str();
}

RetentionRule rule_from_json_string(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("rule JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind"))
        throw config_error("rule JSON must be an object with a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    const auto number = [&](const char* field) -> double {
        if (!j.contains(field))
            throw config_error("rule \"" + kind + "\" missing field \"" + field + "\"");
        return j.at(field).get<double>();
    };
    if (kind == "matern1") return RetentionRule::matern_i();
    if (kind == "parity") return RetentionRule::parity();
    if (kind == "geometric")
        return RetentionRule::geometric_soft_core(number("q"), number("s"));
    if (kind == "cluster") return RetentionRule::cluster_favouring(number("alpha"));
    if (kind == "logistic") return RetentionRule::logistic(number("beta"), number("n0"));
    if (kind == "constant") return RetentionRule::constant(number("c"));
    if (kind == "table" || kind == "count_favouring") {
        if (!j.contains("values") || !j.at("values").is_array())
            throw config_error("rule \"" + kind + "\" needs an array field \"values\"");
        std::vector<double> values = j.at("values").get<std::vector<double>>();
        const double tail = number("tail");
        return kind == "table" ? RetentionRule::table(std::move(values), tail)
                               : RetentionRule::count_favouring(std::move(values), tail);
    }
    throw config_error("unknown rule kind \"" + kind + "\"");
}

std::string rule_to_json_string(const RetentionRule& rule) {
    json j;
    switch (rule.kind()) {
        case RetentionRule::Kind::MaternI:
            j["kind"] = "matern1";
            break;
        case RetentionRule::Kind::Parity:
            j["kind"] = "parity";
            break;
        case RetentionRule::Kind::GeometricSoftCore:
            j["kind"] = "geometric";
            j["q"] = rule.param_a();
            j["s"] = rule.param_b();
            break;
        case RetentionRule::Kind::ClusterFavouring:
            j["kind"] = "cluster";
            j["alpha"] = rule.param_a();
            break;
        case RetentionRule::Kind::Logistic:
            j["kind"] = "logistic";
            j["beta"] = rule.param_a();
            j["n0"] = rule.param_b();
            break;
        case RetentionRule::Kind::Constant:
            j["kind"] = "constant";
            j["c"] = rule.param_a();
            break;
        case RetentionRule::Kind::CountFavouring:
        case RetentionRule::Kind::Table:
            j["kind"] = rule.kind() == RetentionRule::Kind::Table ? "table" : "count_favouring";
            j["values"] = rule.table_values();
            j["tail"] = rule.tail_value();
            break;
    }
    return j.dump();
}

} // namespace nct
