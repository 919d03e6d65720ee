#include "caps/protocols.hpp"

#include "caps/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace caps {

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
    case Protocol::SameCavity: return "same-cavity";
    case Protocol::Remote: return "remote";
    case Protocol::GhzCloud: return "ghz-cloud";
    }
    return "unknown";
}

Protocol parse_protocol(std::string_view name) {
    if (name == "same-cavity") return Protocol::SameCavity;
    if (name == "remote") return Protocol::Remote;
    if (name == "ghz-cloud") return Protocol::GhzCloud;
    throw Error(ErrorCode::InvalidArgument, "unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(CloudMode mode) {
    return mode == CloudMode::IdealCpf ? "ideal" : "finite-c";
}

CloudMode parse_cloud_mode(std::string_view name) {
    if (name == "ideal") return CloudMode::IdealCpf;
    if (name == "finite-c") return CloudMode::FiniteC;
    throw Error(ErrorCode::InvalidArgument, "unknown cloud mode '" + std::string(name) + "'");
}

BeamSplitterConvention BeamSplitterConvention::balanced() {
    const double s = std::numbers::sqrt2 / 2.0;
    const cplx i{0.0, 1.0};
    BeamSplitterConvention conv;
    conv.forward << s, i * s, i * s, s;
    conv.backward << s, -i * s, -i * s, s;
    return conv;
}

void BeamSplitterConvention::validate() const {
    const Matrix2c id = Matrix2c::Identity();
    const double err = std::max({(forward.adjoint() * forward - id).cwiseAbs().maxCoeff(),
                                 (backward.adjoint() * backward - id).cwiseAbs().maxCoeff(),
                                 (backward * forward - id).cwiseAbs().maxCoeff()});
    if (err > 1e-12) {
        std::ostringstream msg;
        msg << "beam splitter is not a unitary round trip (deviation " << err << ")";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
}

std::array<cplx, 2> beam_splitter_transform(BsDirection direction, std::array<cplx, 2> amps,
                                            const BeamSplitterConvention& conv) {
    const Matrix2c& m = direction == BsDirection::Forward ? conv.forward : conv.backward;
    return {m(0, 0) * amps[0] + m(0, 1) * amps[1], m(1, 0) * amps[0] + m(1, 1) * amps[1]};
}

const HeraldBranch& ProtocolOutcome::branch(std::string_view herald) const {
    for (const auto& b : branches) {
        if (b.herald == herald) return b;
    }
    throw Error(ErrorCode::InvalidArgument, "no herald branch '" + std::string(herald) + "'");
}

const CloudBranch& CloudOutcome::branch(std::string_view herald) const {
    for (const auto& b : branches) {
        if (b.herald == herald) return b;
    }
    throw Error(ErrorCode::InvalidArgument, "no herald branch '" + std::string(herald) + "'");
}

namespace {

constexpr double kDarkBranch = 1e-12;

RunParams echo(const CavityParams& params, const PulseEnvelope& pulse) {
    return RunParams{params, std::nullopt, pulse.tau_p().value_or(0.0), pulse.t0().value_or(0.0), pulse.grid()};
}

HeraldBranch make_branch(std::string herald, std::array<PulseEnvelope, 4> envelopes, double efficiency) {
    HeraldBranch branch;
    branch.herald = std::move(herald);
    double p = 0.0;
    for (const auto& e : envelopes) p += envelope_norm(e);
    if (p > kDarkBranch) {
        auto heralded = assemble_heralded_state(envelopes);
        branch.concurrence = concurrence(heralded.state);
        branch.purity = purity(heralded.state);
        branch.state = std::move(heralded.state);
        p = heralded.probability;
    }
    branch.probability = efficiency * p;
    branch.envelopes = std::move(envelopes);
    return branch;
}

// Sends the photon in port I, lets arm III scatter off cavity A (atom state k)
// and arm IV off cavity B (atom state l), and recombines. Returns the D1 and
// D2 envelopes for every two-atom basis state.
std::pair<std::array<PulseEnvelope, 4>, std::array<PulseEnvelope, 4>>
interfere(const std::array<PulseEnvelope, 2>& response_a, const std::array<PulseEnvelope, 2>& response_b,
          const AtomWeights& weights, const BeamSplitterConvention& conv) {
    const auto arms = beam_splitter_transform(BsDirection::Forward, {cplx{1.0}, cplx{}}, conv);
    const TimeGrid& grid = response_a[0].grid();

    std::array<PulseEnvelope, 4> d1;
    std::array<PulseEnvelope, 4> d2;
    for (int k = 1; k <= 2; ++k) {
        for (int l = 1; l <= 2; ++l) {
            const cplx w = weights(k, l);
            const auto& ra = response_a[static_cast<std::size_t>(k - 1)];
            const auto& rb = response_b[static_cast<std::size_t>(l - 1)];
            std::vector<cplx> port1(grid.n_points);
            std::vector<cplx> port2(grid.n_points);
            for (std::size_t i = 0; i < grid.n_points; ++i) {
                const auto ports = beam_splitter_transform(
                    BsDirection::Backward, {w * arms[0] * ra[i], w * arms[1] * rb[i]}, conv);
                port1[i] = ports[0];
                port2[i] = ports[1];
            }
            d1[basis_index(k, l)] = PulseEnvelope(grid, std::move(port1));
            d2[basis_index(k, l)] = PulseEnvelope(grid, std::move(port2));
        }
    }
    return {std::move(d1), std::move(d2)};
}

void require_some_click(double total, std::string_view protocol) {
    if (!(total > kDarkBranch)) {
        std::ostringstream msg;
        msg << protocol << ": no detector fires (total probability " << total << ")";
        throw Error(ErrorCode::VanishingProbability, msg.str());
    }
}

} // namespace

std::array<PulseEnvelope, 3> same_cavity_responses(const CavityParams& params, const PulseEnvelope& pulse) {
    return {evolve_sector(0, params, pulse).alpha_out, evolve_sector(1, params, pulse).alpha_out,
            evolve_sector(2, params, pulse).alpha_out};
}

ProtocolOutcome run_same_cavity(const CavityParams& params, const PulseEnvelope& pulse,
                                const AtomWeights& weights) {
    weights.validate();
    const auto responses = same_cavity_responses(params, pulse);

    std::array<PulseEnvelope, 4> envelopes;
    for (int k = 1; k <= 2; ++k) {
        for (int l = 1; l <= 2; ++l) {
            const int coupled = (k == 1) + (l == 1);
            envelopes[basis_index(k, l)] = responses[static_cast<std::size_t>(coupled)].scaled(weights(k, l));
        }
    }

    ProtocolOutcome out;
    out.protocol = Protocol::SameCavity;
    out.params = echo(params, pulse);
    out.weights = weights;
    out.input = pulse;
    out.responses = {{"M0", responses[0]}, {"M1", responses[1]}, {"M2", responses[2]}};

    // A single herald: surface a vanishing probability as an error.
    double total = 0.0;
    for (const auto& e : envelopes) total += envelope_norm(e);
    require_some_click(total, "same-cavity");
    out.branches.push_back(make_branch("photon", std::move(envelopes), params.detector_efficiency));
    out.total_probability = out.branches.front().probability;
    return out;
}

ProtocolOutcome run_remote(const CavityParams& params, const PulseEnvelope& pulse, const AtomWeights& weights,
                           const BeamSplitterConvention& conv) {
    return run_remote(params, params, pulse, weights, conv);
}

ProtocolOutcome run_remote(const CavityParams& params_a, const CavityParams& params_b,
                           const PulseEnvelope& pulse, const AtomWeights& weights,
                           const BeamSplitterConvention& conv) {
    weights.validate();
    if (!weights.is_product()) {
        throw Error(ErrorCode::InvalidArgument, "remote protocol needs independently prepared (product) atoms");
    }
    conv.validate();

    // Atom state |1> couples (M = 1), |2> leaves the cavity empty (M = 0).
    const std::array<PulseEnvelope, 2> response_a{evolve_sector(1, params_a, pulse).alpha_out,
                                                  evolve_sector(0, params_a, pulse).alpha_out};
    const bool identical = params_a.g == params_b.g && params_a.kappa == params_b.kappa &&
                           params_a.gamma3() == params_b.gamma3();
    const std::array<PulseEnvelope, 2> response_b =
        identical ? response_a
                  : std::array<PulseEnvelope, 2>{evolve_sector(1, params_b, pulse).alpha_out,
                                                 evolve_sector(0, params_b, pulse).alpha_out};

    auto [d1, d2] = interfere(response_a, response_b, weights, conv);

    ProtocolOutcome out;
    out.protocol = Protocol::Remote;
    out.params = echo(params_a, pulse);
    if (!identical) out.params.cavity_b = params_b;
    out.weights = weights;
    out.input = pulse;
    out.responses = {{"A_M0", response_a[1]}, {"A_M1", response_a[0]}};
    if (!identical) {
        out.responses.emplace_back("B_M0", response_b[1]);
        out.responses.emplace_back("B_M1", response_b[0]);
    }
    out.branches.push_back(make_branch("D1", std::move(d1), params_a.detector_efficiency));
    out.branches.push_back(make_branch("D2", std::move(d2), params_a.detector_efficiency));
    out.total_probability = out.branches[0].probability + out.branches[1].probability;
    if (params_a.detector_efficiency > 0.0) {
        require_some_click(out.total_probability / params_a.detector_efficiency, "remote");
    }
    return out;
}

void CloudSpec::validate() const {
    if (n_a < 1 || n_b < 1) throw Error(ErrorCode::InvalidArgument, "cloud atom counts must be >= 1");
    if (!std::isfinite(phi_a) || !std::isfinite(phi_b)) {
        throw Error(ErrorCode::InvalidArgument, "cloud phases must be finite");
    }
}

std::array<cplx, 2> ghz_cloud_state(double phi) {
    const double s = std::numbers::sqrt2 / 2.0;
    return {cplx{s}, s * std::polar(1.0, phi)};
}

namespace {

Matrix2c as_matrix(const Vector4c& v) {
    Matrix2c m;
    m << v(0), v(1), v(2), v(3);
    return m;
}

CloudBranch cloud_branch_from(const HeraldBranch& b) {
    CloudBranch out;
    out.herald = b.herald;
    out.probability = b.probability;
    out.state = b.state;
    out.concurrence = b.concurrence;
    out.purity = b.purity;
    if (b.state) {
        out.amplitudes = as_matrix(b.state->dominant_eigenvector());
        out.schmidt_entropy = schmidt_entropy_2d(out.amplitudes);
    }
    return out;
}

} // namespace

CloudOutcome run_ghz_cloud(const CloudSpec& spec, const CavityParams& params, const PulseEnvelope& pulse) {
    spec.validate();
    params.validate();
    const auto weights = AtomWeights::product(ghz_cloud_state(spec.phi_a), ghz_cloud_state(spec.phi_b));
    const auto conv = BeamSplitterConvention::balanced();

    CloudOutcome out;
    out.spec = spec;
    out.params = echo(params, pulse);

    if (spec.mode == CloudMode::FiniteC) {
        const std::array<PulseEnvelope, 2> response_a{evolve_sector(spec.n_a, params, pulse).alpha_out,
                                                      evolve_sector(0, params, pulse).alpha_out};
        const std::array<PulseEnvelope, 2> response_b =
            spec.n_b == spec.n_a ? response_a
                                 : std::array<PulseEnvelope, 2>{evolve_sector(spec.n_b, params, pulse).alpha_out,
                                                                response_a[1]};
        auto [d1, d2] = interfere(response_a, response_b, weights, conv);
        out.branches.push_back(cloud_branch_from(make_branch("D1", std::move(d1), params.detector_efficiency)));
        out.branches.push_back(cloud_branch_from(make_branch("D2", std::move(d2), params.detector_efficiency)));
    } else {
        // Perfect controlled phase flip: |1..1> picks up a sign, |2..2> does not.
        const std::array<cplx, 2> reflection{cplx{-1.0}, cplx{1.0}};
        const auto arms = beam_splitter_transform(BsDirection::Forward, {cplx{1.0}, cplx{}}, conv);
        Vector4c port1;
        Vector4c port2;
        for (int k = 1; k <= 2; ++k) {
            for (int l = 1; l <= 2; ++l) {
                const cplx w = weights(k, l);
                const auto ports = beam_splitter_transform(
                    BsDirection::Backward,
                    {w * arms[0] * reflection[static_cast<std::size_t>(k - 1)],
                     w * arms[1] * reflection[static_cast<std::size_t>(l - 1)]},
                    conv);
                const auto idx = static_cast<Eigen::Index>(basis_index(k, l));
                port1(idx) = ports[0];
                port2(idx) = ports[1];
            }
        }
        for (auto [herald, amps] : {std::pair{"D1", port1}, std::pair{"D2", port2}}) {
            CloudBranch b;
            b.herald = herald;
            const double p = amps.squaredNorm();
            b.probability = params.detector_efficiency * p;
            if (p > kDarkBranch) {
                const Vector4c psi = amps / std::sqrt(p);
                b.state = TwoQubitState::pure(psi);
                b.amplitudes = as_matrix(psi);
                b.schmidt_entropy = schmidt_entropy_2d(b.amplitudes);
                b.concurrence = concurrence(*b.state);
                b.purity = purity(*b.state);
            }
            out.branches.push_back(std::move(b));
        }
    }
    out.total_probability = out.branches[0].probability + out.branches[1].probability;
    return out;
}

} // namespace caps
