#pragma once

#include "config.hpp"

namespace nct::cli {

int cmd_analyze(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_estimate(const RunConfig& config);
int cmd_bounds(const RunConfig& config);
int cmd_selftest(const RunConfig& config);

} // namespace nct::cli
