#pragma once

#include "nct/analytic.hpp"
#include "nct/bounds.hpp"
#include "nct/estim.hpp"
#include "nct/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace nct {

/// Doubles are emitted with 17 significant digits so another
/// implementation can reproduce them bit for bit.
std::string format_double(double value);

/// FNV-1a 64-bit hash; used for config provenance stamps.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t hash);

/// CSV with header "t,g". A non-empty provenance string is embedded as a
/// leading "# key=value" comment line.
std::string gcurve_to_csv(const GCurve& curve, const std::string& provenance = {});
std::string gcurve_to_json(const GCurve& curve, const std::string& provenance = {});

/// CSV with header "bin_lo,bin_hi,g_hat,se,g_exact".
std::string gestimate_to_csv(const GEstimate& estimate, const std::string& provenance = {});

/// CSV with header "x1,...,xd,mark,retained".
std::string pattern_to_csv(const PointPattern& pattern, const std::string& provenance = {});

/// Length-prefixed little-endian binary form: u64 point count, u64
/// dimension, coordinates row-major, then marks and retained flags as
/// 64-bit floats (count-prefixed, count 0 when absent).
void pattern_to_binary(std::ostream& out, const PointPattern& pattern);
PointPattern pattern_from_binary(std::istream& in, const Window& window);

std::string bound_report_to_json(const BoundReport& report, const std::string& provenance = {});

/// CSV matrix rule x route -> total.
std::string comparison_to_csv(const RouteComparison& table, const std::string& provenance = {});
std::string comparison_to_markdown(const RouteComparison& table,
                                   const std::string& provenance = {});

/// Retention rules as JSON objects, e.g. {"kind":"geometric","q":0.9,"s":0.5}
/// or {"kind":"table","values":[1.0,0.5],"tail":0.0}.
RetentionRule rule_from_json_string(const std::string& json_text);
std::string rule_to_json_string(const RetentionRule& rule);

} // namespace nct
