#include "caps/dynamics.hpp"

#include "caps/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace caps {

double CavityParams::cooperativity() const {
    const double g3 = gamma3();
    if (g3 == 0.0) return g == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return g * g / (2.0 * kappa * g3);
}

CavityParams CavityParams::from_cooperativity(double C, double gamma3) {
    if (!(C >= 0.0) || !(gamma3 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "cooperativity needs C >= 0 and Gamma3 > 0");
    }
    CavityParams p;
    p.kappa = 1.0;
    p.gamma31 = 0.5 * gamma3;
    p.gamma32 = 0.5 * gamma3;
    p.g = std::sqrt(2.0 * p.kappa * gamma3 * C);
    return p;
}

CavityParams CavityParams::from_coupling(double g, double gamma3) {
    CavityParams p;
    p.g = g;
    p.kappa = 1.0;
    p.gamma31 = 0.5 * gamma3;
    p.gamma32 = 0.5 * gamma3;
    p.validate();
    return p;
}

void CavityParams::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
    }
    if (!(g >= 0.0) || !std::isfinite(g)) throw Error(ErrorCode::InvalidArgument, "g must be >= 0");
    if (!(gamma31 >= 0.0) || !(gamma32 >= 0.0) || !std::isfinite(gamma3())) {
        throw Error(ErrorCode::InvalidArgument, "decay rates must be >= 0");
    }
    if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "detector efficiency must lie in [0, 1]");
    }
}

double fastest_rate(int M, const CavityParams& params) {
    const double coupling = M > 0 ? params.g * std::sqrt(static_cast<double>(M)) : 0.0;
    return std::max({params.kappa, params.gamma3(), coupling});
}

namespace {

void check_sector_input(int M, const CavityParams& params, const PulseEnvelope& input) {
    if (M < 0) throw Error(ErrorCode::InvalidArgument, "sector index M must be >= 0");
    params.validate();
    input.check_boundary();
    if (envelope_norm(input) > 1.0 + 1e-9) {
        throw Error(ErrorCode::NotNormalized, "input envelope norm exceeds one photon");
    }
}

struct Amplitudes {
    cplx cav;
    cplx exc;
};

} // namespace

SectorTrajectory evolve_sector(int M, const CavityParams& params, const PulseEnvelope& input) {
    check_sector_input(M, params, input);

    const TimeGrid& grid = input.grid();
    const double kappa = params.kappa;
    const double gamma3 = params.gamma3();
    const double drive = std::sqrt(2.0 * kappa);
    const cplx i_coupling{0.0, M > 0 ? params.g * std::sqrt(static_cast<double>(M)) : 0.0};

    auto rhs = [&](const Amplitudes& y, cplx a_in) {
        return Amplitudes{-kappa * y.cav - i_coupling * y.exc + drive * a_in,
                          -gamma3 * y.exc - i_coupling * y.cav};
    };

    const auto substeps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(50.0 * grid.dt * fastest_rate(M, params) - 1e-9)));
    const double h = grid.dt / static_cast<double>(substeps);

    SectorTrajectory traj;
    traj.M = M;
    traj.c_cav.resize(grid.n_points);
    traj.c_exc.resize(grid.n_points);

    Amplitudes y{};
    for (std::size_t i = 0; i + 1 < grid.n_points; ++i) {
        const double t_i = grid.time(i);
        for (std::size_t s = 0; s < substeps; ++s) {
            const double t = t_i + static_cast<double>(s) * h;
            const cplx a0 = input.value_at(t);
            const cplx a_mid = input.value_at(t + 0.5 * h);
            const cplx a1 = input.value_at(t + h);

            const Amplitudes k1 = rhs(y, a0);
            const Amplitudes k2 = rhs({y.cav + 0.5 * h * k1.cav, y.exc + 0.5 * h * k1.exc}, a_mid);
            const Amplitudes k3 = rhs({y.cav + 0.5 * h * k2.cav, y.exc + 0.5 * h * k2.exc}, a_mid);
            const Amplitudes k4 = rhs({y.cav + h * k3.cav, y.exc + h * k3.exc}, a1);
            y.cav += h / 6.0 * (k1.cav + 2.0 * k2.cav + 2.0 * k3.cav + k4.cav);
            y.exc += h / 6.0 * (k1.exc + 2.0 * k2.exc + 2.0 * k3.exc + k4.exc);
        }
        traj.c_cav[i + 1] = y.cav;
        traj.c_exc[i + 1] = y.exc;
    }

    const double residual = std::max(std::abs(y.cav), std::abs(y.exc));
    if (residual >= 1e-6) {
        std::ostringstream msg;
        msg << "sector M=" << M << " still holds amplitude " << residual << " at t = " << grid.t_end()
            << "; extend the time window";
        throw Error(ErrorCode::NonConvergent, msg.str());
    }

    std::vector<cplx> out(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) out[i] = drive * traj.c_cav[i] - input[i];
    traj.alpha_out = PulseEnvelope(grid, std::move(out));
    return traj;
}

PulseEnvelope semianalytic_output(int M, const CavityParams& params, const PulseEnvelope& input) {
    check_sector_input(M, params, input);
    if (std::abs(params.gamma3() - params.kappa) >= 1e-12) {
        throw Error(ErrorCode::InvalidRegime, "closed-form response requires Gamma3 = kappa");
    }

    const TimeGrid& grid = input.grid();
    const double h = grid.dt;
    const double kappa = params.kappa;
    const double freq = M > 0 ? params.g * std::sqrt(static_cast<double>(M)) : 0.0;

    // cos(w t) e^{-kappa t} = (e^{lp t} + e^{lm t}) / 2 with l = -kappa +- i w.
    // Each exponential kernel is convolved recursively; over one step the input
    // is linear, so the step integral has closed-form weights.
    struct Kernel {
        cplx decay;
        cplx w_prev;
        cplx w_next;
        cplx acc{};
    };
    auto make_kernel = [h](cplx lambda) {
        const cplx em1 = std::exp(lambda * h) - 1.0;
        const cplx w_next = em1 / (h * lambda * lambda) - 1.0 / lambda;
        return Kernel{em1 + 1.0, em1 / lambda - w_next, w_next};
    };
    Kernel plus = make_kernel({-kappa, freq});
    Kernel minus = make_kernel({-kappa, -freq});

    std::vector<cplx> out(grid.n_points);
    out[0] = -input[0];
    for (std::size_t i = 0; i + 1 < grid.n_points; ++i) {
        for (Kernel* k : {&plus, &minus}) {
            k->acc = k->decay * k->acc + k->w_prev * input[i] + k->w_next * input[i + 1];
        }
        out[i + 1] = kappa * (plus.acc + minus.acc) - input[i + 1];
    }
    return PulseEnvelope(grid, std::move(out));
}

cplx frequency_reflection(int M, const CavityParams& params, double omega) {
    if (M < 0) throw Error(ErrorCode::InvalidArgument, "sector index M must be >= 0");
    const cplx i_omega{0.0, omega};
    cplx denom = params.kappa - i_omega;
    const double collective = static_cast<double>(M) * params.g * params.g;
    if (collective > 0.0) {
        const cplx atom = params.gamma3() - i_omega;
        if (atom == cplx{}) return {-1.0, 0.0};
        denom += collective / atom;
    }
    return 2.0 * params.kappa / denom - 1.0;
}

TimeGrid default_grid(double tau_p, double t0, const CavityParams& params) {
    double dt = std::min(kDefaultStep, tau_p / 20.0);
    if (params.gamma3() > 0.0) dt = std::min(dt, 1.0 / (50.0 * params.gamma3()));
    return default_window(tau_p, t0, dt);
}

TimeGrid simulation_grid(double tau_p, double t0, const CavityParams& params, std::optional<double> dt,
                         std::optional<double> span) {
    if (!dt && !span) return default_grid(tau_p, t0, params);
    const TimeGrid base = default_grid(tau_p, t0, params);
    const double step = dt ? std::min(*dt, tau_p / 20.0) : base.dt;
    const double begin = t0 - 4.0 * tau_p;
    const double end = span ? begin + *span : base.t_end();
    return TimeGrid::spanning(begin, end, step);
}

} // namespace caps
