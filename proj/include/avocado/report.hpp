// report.hpp - structured-text run reports (key = value lines, arrays as
// space-separated values) so downstream tooling can parse results without a
// display layer.
#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "avocado/config.hpp"
#include "avocado/pipeline.hpp"

namespace avocado {

// Full registration report. Deterministic except the single `timestamp` line.
void write_report(std::ostream& os, const RegistrationResult& result, const RunConfig& config);

// Standalone metrics block, shared by the `metrics` subcommand.
void write_metrics_block(std::ostream& os, const MetricsReport& metrics);

// Parses a report back into a key -> raw-value map (arrays stay unsplit).
std::map<std::string, std::string> parse_report(const std::string& path);

std::string format_double(double v);

}  // namespace avocado
