#pragma once

// Single-photon temporal envelopes on uniform time grids.
//
// Units: the cavity half-linewidth kappa sets the time unit, so times are in
// 1/kappa and amplitudes in sqrt(kappa). An envelope is the slowly varying
// amplitude at the cavity resonance frequency.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace caps {

using cplx = std::complex<double>;

struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.01;
    std::size_t n_points = 0;

    static constexpr std::size_t kMinPoints = 16;

    double time(std::size_t i) const { return t_start + static_cast<double>(i) * dt; }
    double t_end() const { return time(n_points - 1); }

    // Grid covering [t_begin, t_end] (both inclusive, end rounded up to a step).
    static TimeGrid spanning(double t_begin, double t_end, double dt);

    void validate() const;

    bool operator==(const TimeGrid&) const = default;
};

// Analytic description of a Gaussian envelope, kept alongside the samples so
// integrators can evaluate the input between grid points exactly.
struct GaussianShape {
    double t0 = 0.0;
    double eta = 1.0;
    double tau_p = 1.0;
    cplx scale{1.0, 0.0};

    cplx operator()(double t) const;
};

// eta such that the amplitude full width at half maximum equals tau_p.
double gaussian_eta(double tau_p);

class PulseEnvelope {
public:
    PulseEnvelope() = default;
    PulseEnvelope(TimeGrid grid, std::vector<cplx> amp);

    const TimeGrid& grid() const { return grid_; }
    std::span<const cplx> amp() const { return amp_; }
    cplx operator[](std::size_t i) const { return amp_[i]; }
    std::size_t size() const { return amp_.size(); }

    const std::optional<GaussianShape>& gaussian() const { return shape_; }
    std::optional<double> t0() const;
    std::optional<double> eta() const;
    std::optional<double> tau_p() const;

    // Amplitude at an arbitrary time: analytic for Gaussians, linear
    // interpolation for tabulated envelopes, zero outside the grid.
    cplx value_at(double t) const;

    PulseEnvelope scaled(cplx factor) const;

    double max_abs() const;

    // Throws WindowTooSmall unless the envelope vanishes at both window edges
    // (|amp| < 1e-6 max|amp|). An all-zero envelope passes.
    void check_boundary() const;

private:
    friend PulseEnvelope gaussian_pulse(double, double, const TimeGrid&);

    TimeGrid grid_;
    std::vector<cplx> amp_;
    std::optional<GaussianShape> shape_;
};

PulseEnvelope gaussian_pulse(double tau_p, double t0, const TimeGrid& grid);

// Trapezoidal quadrature of |amp|^2.
double envelope_norm(const PulseEnvelope& p);

// Trapezoidal quadrature of conj(p) q; p and q must share a grid.
cplx overlap(const PulseEnvelope& p, const PulseEnvelope& q);

// Window [t0 - 4 tau_p, t0 + 8 tau_p + 20] that contains the pulse and the
// cavity ring-down, with step dt.
TimeGrid default_window(double tau_p, double t0, double dt);

constexpr double kDefaultStep = 0.01;

} // namespace caps
