"""Heralded entanglement via single-photon scattering off single-sided cavities.

Units: kappa = 1. Basis order for two-atom states is |11>, |12>, |21>, |22>.
"""

from ._caps import (
    CapsError,
    CavityParams,
    __version__,
    concurrence,
    evolve_sector,
    frequency_reflection,
    gaussian_pulse,
    linear_grid,
    log_grid,
    overlap,
    run_ghz_cloud,
    run_remote,
    run_same_cavity,
    run_sweep,
    run_validation,
    schmidt_entropy,
    semianalytic_output,
)


def simulate(protocol, C=None, g=None, gamma3=1.0, tau_p=50.0, t0=0.0, **kwargs):
    """One protocol run from a cooperativity or a coupling (not both)."""
    if (C is None) == (g is None):
        raise ValueError("give exactly one of C or g")
    params = CavityParams.from_cooperativity(C, gamma3) if C is not None else CavityParams.from_coupling(g, gamma3)
    if "detector_efficiency" in kwargs:
        params.detector_efficiency = kwargs.pop("detector_efficiency")
    pulse = gaussian_pulse(tau_p, params, t0)
    if protocol == "same-cavity":
        return run_same_cavity(params, pulse, **kwargs)
    if protocol == "remote":
        return run_remote(params, pulse, **kwargs)
    if protocol == "ghz-cloud":
        return run_ghz_cloud(params, pulse, **kwargs)
    raise ValueError(f"unknown protocol {protocol!r}")


__all__ = [
    "CapsError",
    "CavityParams",
    "concurrence",
    "evolve_sector",
    "frequency_reflection",
    "gaussian_pulse",
    "linear_grid",
    "log_grid",
    "overlap",
    "run_ghz_cloud",
    "run_remote",
    "run_same_cavity",
    "run_sweep",
    "run_validation",
    "schmidt_entropy",
    "semianalytic_output",
    "simulate",
]
