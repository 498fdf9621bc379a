#include "config.hpp"

#include <string>

// Exposes the config canonicalization to the CLI integration test without
// spawning a process.
std::string nct_test_canonical_roundtrip(const std::string& text) {
    return nct::cli::RunConfig::from_json_text(text).canonical_json();
}
