#pragma once

#include "chalk/io.hpp"

namespace chalk {

// Exit codes: 0 success, 1 numerical failure, 2 input error.
constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitInput = 2;

// Runs one scenario object {"kind": ..., "seed": ..., "output": {...}, ...},
// writes its output file deterministically, and returns the report (also
// embedded in JSON-format outputs). Throws InputError / NumericError.
json run_scenario(const json& scenario);

// Loads and runs a scenario file; the report goes to stdout. Returns the
// exit code instead of throwing.
int run_scenario_file(const std::string& path, const json& overrides = json::object());

// Scenario list file {"scenarios": ["a.json", ...]} executed by `jobs`
// workers; outputs are isolated per scenario. Returns the worst exit code.
int run_scenario_list(const std::string& path, int jobs);

}  // namespace chalk
