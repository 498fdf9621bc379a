#pragma once

#include <stdexcept>
#include <string>

namespace nct {

/// Malformed user input: bad dimensions, invalid rule tables, bad configs.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A numeric routine failed to converge. Carries the last estimate so callers
/// can decide whether a degraded value is still usable.
class numeric_failure : public std::runtime_error {
public:
    numeric_failure(const std::string& what, double last_estimate)
        : std::runtime_error(what), last_estimate_(last_estimate) {}

    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

/// Denominator collapsed below representable range (e.g. retention mean
/// underflowing in a pair-correlation ratio).
class degenerate_denominator : public std::runtime_error {
public:
    explicit degenerate_denominator(const std::string& what) : std::runtime_error(what) {}
};

/// Requested operation is not defined for the given retention rule.
class unsupported_rule : public std::invalid_argument {
public:
    explicit unsupported_rule(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace nct
