#pragma once

// Protocol evaluation over parameter grids.

#include "caps/protocols.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace caps {

enum class SweepAxis { Cooperativity, PulseDuration };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepSpec {
    Protocol protocol = Protocol::SameCavity;
    SweepAxis axis = SweepAxis::Cooperativity;
    std::vector<double> grid;

    // Held fixed on the cooperativity axis.
    double tau_p = 50.0;
    // One E column per value on the pulse-duration axis.
    std::vector<double> cooperativities{0.5, 1.0, 3.0, 10.0};

    double gamma3 = 1.0;
    double t0 = 0.0;
    double detector_efficiency = 1.0;
    AtomWeights weights = AtomWeights::balanced();
    std::optional<double> dt;
    std::optional<double> span;

    // Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    bool operator==(const SweepTable&) const = default;
};

std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

// Columns: same-cavity C,E,P_s,P_s_11,P_s_12,P_s_22; remote C,E_D1,P_D1,P_D2,E_D2.
SweepTable sweep_cooperativity(const SweepSpec& spec);

// Columns: tau_p followed by E_C<value> for each cooperativity (E_D1_C<value>
// for the remote protocol).
SweepTable sweep_pulse_duration(const SweepSpec& spec);

SweepTable run_sweep(const SweepSpec& spec);

// 17 significant digits, so every double reads back bit-exactly.
std::string format_number(double value);

} // namespace caps
