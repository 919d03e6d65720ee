#pragma once

// Single-photon scattering off a single-sided cavity holding M atoms in the
// cavity-coupled ground state |1>.
//
// Within a sector of fixed ground configuration the amplitude equations reduce
// to two coupled ODEs: the one-photon intracavity amplitude c_cav and the
// symmetric collective excited amplitude c_exc, coupled with strength g*sqrt(M).
//
//   d c_cav / dt = -kappa c_cav - i g sqrt(M) c_exc + sqrt(2 kappa) alpha_in(t)
//   d c_exc / dt = -Gamma3 c_exc - i g sqrt(M) c_cav
//
// The reflected field follows from alpha_out = sqrt(2 kappa) c_cav - alpha_in.

#include "caps/pulse.hpp"

#include <optional>
#include <vector>

namespace caps {

struct CavityParams {
    double g = 0.0;
    double kappa = 1.0;
    double gamma31 = 0.5;
    double gamma32 = 0.5;
    double detector_efficiency = 1.0;

    // Only the total excited-state decay enters the dynamics.
    double gamma3() const { return gamma31 + gamma32; }

    // g^2 / (2 kappa Gamma3); infinite when Gamma3 = 0 and g > 0.
    double cooperativity() const;

    // Parameters with the given cooperativity and total decay, kappa = 1 and
    // the decay split evenly between the two ground states.
    static CavityParams from_cooperativity(double C, double gamma3 = 1.0);
    static CavityParams from_coupling(double g, double gamma3 = 1.0);

    void validate() const;
};

struct SectorTrajectory {
    int M = 0;
    std::vector<cplx> c_cav;
    std::vector<cplx> c_exc;
    PulseEnvelope alpha_out;
};

// Largest rate the integrator has to resolve in sector M.
double fastest_rate(int M, const CavityParams& params);

// Integrates the sector ODEs with fixed-step RK4 from zero amplitudes. Each
// grid step is split into substeps so that h * fastest_rate <= 1/50. Throws
// NonConvergent if |c_cav| or |c_exc| exceeds 1e-6 at the end of the window.
SectorTrajectory evolve_sector(int M, const CavityParams& params, const PulseEnvelope& input);

// Closed-form response for Gamma3 = kappa:
//   alpha_out(t) = 2 kappa int_{-inf}^{t} cos(g sqrt(M) (t-s)) e^{-kappa (t-s)} alpha_in(s) ds
//                  - alpha_in(t),
// evaluated by product integration against the piecewise-linear input on the
// grid. Throws InvalidRegime unless |Gamma3 - kappa| < 1e-12.
PulseEnvelope semianalytic_output(int M, const CavityParams& params, const PulseEnvelope& input);

// Monochromatic reflection coefficient of sector M at detuning omega:
//   r_M(omega) = 2 kappa / (kappa - i omega + M g^2 / (Gamma3 - i omega)) - 1.
cplx frequency_reflection(int M, const CavityParams& params, double omega);

// Default grid for a Gaussian of duration tau_p: the window of
// default_window() with dt = min(0.01, 1/(50 Gamma3), tau_p/20).
// Fast vacuum-Rabi oscillations are resolved by integrator substeps.
TimeGrid default_grid(double tau_p, double t0, const CavityParams& params);

// default_grid() with optional overrides of the step and of the window length
// (measured from t0 - 4 tau_p). The step is still capped at tau_p/20.
TimeGrid simulation_grid(double tau_p, double t0, const CavityParams& params, std::optional<double> dt,
                         std::optional<double> span);

} // namespace caps
