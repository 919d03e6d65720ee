#pragma once

// Command-line and config-file options for the `caps` tool.
//
// Config files are flat `key=value` lines using the long flag names without
// the leading dashes (`C=3`, `tau-p=50`); `#` starts a comment. Command-line
// flags override file values, which override the defaults.

#include "caps/protocols.hpp"
#include "caps/sweep.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace caps::cli {

enum class Command { Sim, Sweep, Validate };
enum class OutputFormat { Json, Csv };

struct RunConfig {
    Command command = Command::Sim;
    Protocol protocol = Protocol::SameCavity;

    // Exactly one of C or g is given by the user; the other is derived with
    // kappa = 1.
    double cooperativity = 0.0;
    CavityParams cavity;

    double tau_p = 50.0;
    double t0 = 0.0;
    std::optional<double> dt;
    std::optional<double> span;
    AtomWeights weights = AtomWeights::balanced();
    CloudSpec cloud;

    SweepAxis axis = SweepAxis::Cooperativity;
    std::vector<double> sweep_grid;
    std::vector<double> cooperativities{0.5, 1.0, 3.0, 10.0};
    unsigned threads = 0;

    std::optional<std::filesystem::path> out;
    OutputFormat format = OutputFormat::Json;

    // Resolved output path: --out, else $CAPS_OUT_DIR (or the working
    // directory) joined with a name derived from the command.
    std::filesystem::path output_path() const;
};

// Thrown for --help; carries the formatted usage text.
struct HelpRequested {
    std::string text;
};

// args excludes the program name. Throws Error(Usage) naming the offending
// key on any invalid or over-constrained input.
RunConfig parse_config(const std::vector<std::string>& args);
RunConfig parse_config(int argc, const char* const* argv);

// Flat key=value parser used for --config files.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// "balanced", four amplitudes "w11,w12,w21,w22", or two single-atom states
// "u1,u2/v1,v2"; each amplitude is "re" or "re:im".
AtomWeights parse_weights(const std::string& text);

} // namespace caps::cli
