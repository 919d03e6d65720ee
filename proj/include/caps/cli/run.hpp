#pragma once

#include "caps/cli/config.hpp"
#include "caps/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace caps::cli {

// Exit codes of the tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;

int exit_code_for(const Error& e);

// Runs one command and writes its result file. Never throws; a summary goes
// to `out` and diagnostics to `err`.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_config + run_command with the same error handling as `main`.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace caps::cli
