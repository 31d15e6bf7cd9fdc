// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "oed/bnb.hpp"

namespace oed {

// JSON object with the full report: identity, status, termination, objective
// and bound, gaps, node/work counters, and the echoed configuration.
std::string report_to_json(const SolveReport& report, int indent = 2);

// Per-run CSV schema shared by the solve and bench commands.
std::string report_csv_header();
std::string report_csv_row(const SolveReport& report);

// Shortest round-trip decimal form of a double ("inf"/"-inf"/"nan" for
// non-finite values).
std::string format_double(double value);

}  // namespace oed
