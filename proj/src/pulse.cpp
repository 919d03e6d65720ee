#include "caps/pulse.hpp"

#include "caps/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace caps {

TimeGrid TimeGrid::spanning(double t_begin, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > t_begin)) {
        throw Error(ErrorCode::InvalidArgument, "time window must have t_end > t_begin and dt > 0");
    }
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt - 1e-9));
    return TimeGrid{t_begin, dt, steps + 1};
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t_start)) {
        throw Error(ErrorCode::InvalidArgument, "time grid needs a finite step dt > 0");
    }
    if (n_points < kMinPoints) {
        std::ostringstream msg;
        msg << "time grid has " << n_points << " points, at least " << kMinPoints << " required";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
}

double gaussian_eta(double tau_p) { return tau_p / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

cplx GaussianShape::operator()(double t) const {
    const double x = (t - t0) / eta;
    return scale * (std::exp(-0.5 * x * x) / std::sqrt(eta * std::sqrt(std::numbers::pi)));
}

PulseEnvelope::PulseEnvelope(TimeGrid grid, std::vector<cplx> amp)
    : grid_(grid), amp_(std::move(amp)) {
    grid_.validate();
    if (amp_.size() != grid_.n_points) {
        throw Error(ErrorCode::GridMismatch, "envelope sample count differs from grid size");
    }
}

std::optional<double> PulseEnvelope::t0() const {
    return shape_ ? std::optional(shape_->t0) : std::nullopt;
}
std::optional<double> PulseEnvelope::eta() const {
    return shape_ ? std::optional(shape_->eta) : std::nullopt;
}
std::optional<double> PulseEnvelope::tau_p() const {
    return shape_ ? std::optional(shape_->tau_p) : std::nullopt;
}

cplx PulseEnvelope::value_at(double t) const {
    if (shape_) return (*shape_)(t);
    const double x = (t - grid_.t_start) / grid_.dt;
    if (x < 0.0 || x > static_cast<double>(grid_.n_points - 1)) return {};
    const auto i = std::min(static_cast<std::size_t>(x), grid_.n_points - 2);
    const double frac = x - static_cast<double>(i);
    return amp_[i] * (1.0 - frac) + amp_[i + 1] * frac;
}

PulseEnvelope PulseEnvelope::scaled(cplx factor) const {
    PulseEnvelope out = *this;
    for (auto& a : out.amp_) a *= factor;
    if (out.shape_) out.shape_->scale *= factor;
    return out;
}

double PulseEnvelope::max_abs() const {
    double m = 0.0;
    for (const auto& a : amp_) m = std::max(m, std::abs(a));
    return m;
}

void PulseEnvelope::check_boundary() const {
    const double peak = max_abs();
    if (peak == 0.0) return;
    const double edge = std::max(std::abs(amp_.front()), std::abs(amp_.back()));
    if (edge >= 1e-6 * peak) {
        std::ostringstream msg;
        msg << "envelope does not vanish at the window edges (edge/peak = " << edge / peak << ")";
        throw Error(ErrorCode::WindowTooSmall, msg.str());
    }
}

PulseEnvelope gaussian_pulse(double tau_p, double t0, const TimeGrid& grid) {
    grid.validate();
    if (!(tau_p > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_p must be positive");
    if (tau_p < 20.0 * grid.dt) {
        std::ostringstream msg;
        msg << "tau_p = " << tau_p << " needs dt <= " << tau_p / 20.0 << ", got " << grid.dt;
        throw Error(ErrorCode::StepTooCoarse, msg.str());
    }
    if (grid.t_start > t0 - 4.0 * tau_p || grid.t_end() < t0 + 4.0 * tau_p) {
        std::ostringstream msg;
        msg << "window [" << grid.t_start << ", " << grid.t_end() << "] does not contain ["
            << t0 - 4.0 * tau_p << ", " << t0 + 4.0 * tau_p << "]";
        throw Error(ErrorCode::WindowTooSmall, msg.str());
    }

    const GaussianShape shape{t0, gaussian_eta(tau_p), tau_p, {1.0, 0.0}};
    std::vector<cplx> amp(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) amp[i] = shape(grid.time(i));

    PulseEnvelope pulse(grid, std::move(amp));
    pulse.shape_ = shape;
    pulse.check_boundary();
    return pulse;
}

double envelope_norm(const PulseEnvelope& p) {
    const auto a = p.amp();
    if (a.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& x : a) sum += std::norm(x);
    sum -= 0.5 * (std::norm(a.front()) + std::norm(a.back()));
    return sum * p.grid().dt;
}

cplx overlap(const PulseEnvelope& p, const PulseEnvelope& q) {
    if (!(p.grid() == q.grid())) {
        throw Error(ErrorCode::GridMismatch, "overlap of envelopes on different grids");
    }
    const auto a = p.amp();
    const auto b = q.amp();
    if (a.empty()) return {};
    cplx sum{};
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
    sum -= 0.5 * (std::conj(a.front()) * b.front() + std::conj(a.back()) * b.back());
    return sum * p.grid().dt;
}

TimeGrid default_window(double tau_p, double t0, double dt) {
    return TimeGrid::spanning(t0 - 4.0 * tau_p, t0 + 8.0 * tau_p + 20.0, dt);
}

} // namespace caps
