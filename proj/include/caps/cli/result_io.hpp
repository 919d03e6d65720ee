#pragma once

// Result files written by the `caps` tool.
//
// Single runs are JSON. Density matrices are 16 [re, im] pairs in row-major
// order over the basis |11>, |12>, |21>, |22>. Envelopes are decimated to at
// most ~2000 samples and share one "t" array. Non-finite scalars (C with
// Gamma3 = 0) are written as null.
//
// Sweeps are CSV: `# key: value` metadata lines, one header row, then data.
// Every number carries 17 significant digits.

#include "caps/protocols.hpp"
#include "caps/sweep.hpp"
#include "caps/validate.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace caps::cli {

inline constexpr const char* kResultSchema = "caps.result/1";
inline constexpr std::size_t kMaxEnvelopeSamples = 2001;

std::string outcome_to_json(const ProtocolOutcome& outcome);
std::string cloud_to_json(const CloudOutcome& outcome);
std::string validation_to_json(const std::vector<CheckResult>& checks);
std::string sweep_to_csv(const SweepTable& table);
std::string sweep_to_json(const SweepTable& table);

// Writes to a sibling temp file and renames it into place. Throws Error(Io).
void write_atomic(const std::filesystem::path& path, const std::string& text);

// Scalars of a single-run result flattened to dotted keys:
// "total_probability", "params.C", "branches.D1.probability",
// "branches.D1.rho.5.im", "branches.D1.amplitudes.3.re", ...
struct ResultScalars {
    std::string schema;
    std::string protocol;
    std::map<std::string, double> values;

    double at(const std::string& key) const;
};

ResultScalars read_result(const std::filesystem::path& path);
SweepTable read_sweep_csv(const std::filesystem::path& path);

} // namespace caps::cli
