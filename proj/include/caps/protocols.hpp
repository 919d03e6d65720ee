#pragma once

// End-to-end heralded entanglement protocols.
//
//  * same-cavity: both atoms share one cavity; a single detector heralds the
//    reflected photon.
//  * remote: each atom sits in its own cavity; the photon is split by a 50:50
//    beam splitter, scattered by both cavities, recombined on the same beam
//    splitter and detected at D1 (port I) or D2 (port II).
//  * ghz-cloud: the remote scheme with each cavity holding an atomic cloud in
//    a GHZ state, restricted to the span of |1...1> and |2...2> per cloud.

#include "caps/dynamics.hpp"
#include "caps/quantum.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace caps {

enum class Protocol { SameCavity, Remote, GhzCloud };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view name);

// ---------------------------------------------------------------- beam splitter

enum class BsDirection { Forward, Backward };

// forward maps input ports (I, II) to the cavity arms (III, IV); backward
// maps the returning arms (III, IV) back onto (I, II). D1 watches port I and
// D2 watches port II.
struct BeamSplitterConvention {
    Matrix2c forward;
    Matrix2c backward;

    // forward = ((1, i), (i, 1)) / sqrt(2), backward = its inverse.
    static BeamSplitterConvention balanced();

    // Throws InvalidArgument unless both matrices are unitary and
    // backward * forward = 1, all within 1e-12.
    void validate() const;
};

std::array<cplx, 2> beam_splitter_transform(BsDirection direction, std::array<cplx, 2> amps,
                                            const BeamSplitterConvention& conv);

// -------------------------------------------------------------------- outcomes

struct HeraldBranch {
    std::string herald;
    // Includes the detector efficiency.
    double probability = 0.0;
    double concurrence = 0.0;
    double purity = 0.0;
    // Empty when the branch never fires (probability <= 1e-12).
    std::optional<TwoQubitState> state;
    // Photon envelopes A_kl reaching the detector, in basis order.
    std::array<PulseEnvelope, 4> envelopes;
};

struct RunParams {
    CavityParams cavity;
    // Set only when the two remote cavities differ.
    std::optional<CavityParams> cavity_b;
    double tau_p = 0.0;
    double t0 = 0.0;
    TimeGrid grid;
};

struct ProtocolOutcome {
    Protocol protocol = Protocol::SameCavity;
    RunParams params;
    AtomWeights weights;
    std::vector<HeraldBranch> branches;
    double total_probability = 0.0;
    PulseEnvelope input;
    // Output envelopes of the single-sector responses to the unit input,
    // labelled by cavity and sector ("M0", "M1", "A_M1", ...).
    std::vector<std::pair<std::string, PulseEnvelope>> responses;

    const HeraldBranch& branch(std::string_view herald) const;
};

// Output envelopes of sectors M = 0, 1, 2 for the given input.
std::array<PulseEnvelope, 3> same_cavity_responses(const CavityParams& params, const PulseEnvelope& pulse);

ProtocolOutcome run_same_cavity(const CavityParams& params, const PulseEnvelope& pulse,
                                const AtomWeights& weights = AtomWeights::balanced());

// Requires product-form weights.
ProtocolOutcome run_remote(const CavityParams& params, const PulseEnvelope& pulse,
                           const AtomWeights& weights = AtomWeights::balanced(),
                           const BeamSplitterConvention& conv = BeamSplitterConvention::balanced());

// Remote protocol with distinct cavities A and B. The detector efficiency of
// cavity A's parameters applies.
ProtocolOutcome run_remote(const CavityParams& params_a, const CavityParams& params_b,
                           const PulseEnvelope& pulse, const AtomWeights& weights,
                           const BeamSplitterConvention& conv = BeamSplitterConvention::balanced());

// ------------------------------------------------------------------ GHZ clouds

enum class CloudMode { IdealCpf, FiniteC };

std::string_view to_string(CloudMode mode);
CloudMode parse_cloud_mode(std::string_view name);

struct CloudSpec {
    int n_a = 1;
    int n_b = 1;
    double phi_a = 0.0;
    double phi_b = 0.0;
    CloudMode mode = CloudMode::IdealCpf;

    void validate() const;
};

struct CloudBranch {
    std::string herald;
    double probability = 0.0;
    // Effective two-qubit state on {|1..1>, |2..2>} of cloud A (x) cloud B.
    std::optional<TwoQubitState> state;
    // Coefficients of the dominant pure component, rows cloud A, columns cloud B.
    Matrix2c amplitudes = Matrix2c::Zero();
    double schmidt_entropy = 0.0;
    double concurrence = 0.0;
    double purity = 0.0;
};

struct CloudOutcome {
    CloudSpec spec;
    RunParams params;
    std::vector<CloudBranch> branches;
    double total_probability = 0.0;

    const CloudBranch& branch(std::string_view herald) const;
};

// GHZ cloud state (|1>^N + e^{i phi} |2>^N)/sqrt(2) in the effective basis.
std::array<cplx, 2> ghz_cloud_state(double phi);

// Ideal mode scatters |1..1> with reflection -1 and |2..2> with +1. Finite-C
// mode uses the sector responses M = N_j and M = 0 of the given pulse.
CloudOutcome run_ghz_cloud(const CloudSpec& spec, const CavityParams& params, const PulseEnvelope& pulse);

} // namespace caps
