#include "caps/sweep.hpp"

#include "caps/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

namespace caps {

std::string_view to_string(SweepAxis axis) {
    return axis == SweepAxis::Cooperativity ? "C" : "tau-p";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "C") return SweepAxis::Cooperativity;
    if (name == "tau-p") return SweepAxis::PulseDuration;
    throw Error(ErrorCode::InvalidArgument, "unknown sweep axis '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    if (protocol == Protocol::GhzCloud) {
        throw Error(ErrorCode::InvalidArgument, "sweeps support the same-cavity and remote protocols");
    }
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "sweep grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
            throw Error(ErrorCode::InvalidArgument, "sweep grid values must be positive");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "sweep grid must be strictly increasing");
        }
    }
    if (axis == SweepAxis::PulseDuration && cooperativities.empty()) {
        throw Error(ErrorCode::InvalidArgument, "pulse-duration sweep needs at least one cooperativity");
    }
    if (!(tau_p > 0.0) || !(gamma3 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "sweep needs tau_p > 0 and Gamma3 > 0");
    }
    weights.validate();
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string short_label(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

// Evaluates rows[i] = eval(i) on a pool of workers. The first failure in
// grid order is rethrown with its index; remaining points are skipped.
template <class Eval>
std::vector<std::vector<double>> evaluate_grid(std::size_t n, unsigned threads, const std::vector<double>& grid,
                                               Eval eval) {
    std::vector<std::vector<double>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                rows[i] = eval(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };

    unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    count = static_cast<unsigned>(std::min<std::size_t>(count, n));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "sweep aborted at grid point " << i << " (value " << grid[i] << "): " << e.what();
            throw Error(e.code(), msg.str());
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep aborted at grid point " << i << " (value " << grid[i] << "): " << e.what();
            throw Error(ErrorCode::InvalidArgument, msg.str());
        }
    }
    return rows;
}

CavityParams point_params(double C, const SweepSpec& spec) {
    auto p = CavityParams::from_cooperativity(C, spec.gamma3);
    p.detector_efficiency = spec.detector_efficiency;
    return p;
}

std::vector<std::pair<std::string, std::string>> base_metadata(const SweepSpec& spec) {
    return {{"generator", "caps " CAPS_VERSION},
            {"protocol", std::string(to_string(spec.protocol))},
            {"axis", std::string(to_string(spec.axis))},
            {"gamma3", format_number(spec.gamma3)},
            {"kappa", "1"},
            {"t0", format_number(spec.t0)},
            {"detector_efficiency", format_number(spec.detector_efficiency)}};
}

// Concurrence of the herald used for the pulse-duration axis.
double headline_concurrence(const SweepSpec& spec, double C, double tau_p) {
    const auto params = point_params(C, spec);
    const auto grid = simulation_grid(tau_p, spec.t0, params, spec.dt, spec.span);
    const auto pulse = gaussian_pulse(tau_p, spec.t0, grid);
    if (spec.protocol == Protocol::Remote) return run_remote(params, pulse, spec.weights).branch("D1").concurrence;
    return run_same_cavity(params, pulse, spec.weights).branch("photon").concurrence;
}

} // namespace

SweepTable sweep_cooperativity(const SweepSpec& spec) {
    spec.validate();
    if (spec.axis != SweepAxis::Cooperativity) {
        throw Error(ErrorCode::InvalidArgument, "sweep_cooperativity needs the C axis");
    }

    SweepTable table;
    table.metadata = base_metadata(spec);
    table.metadata.emplace_back("tau_p", format_number(spec.tau_p));

    const bool remote = spec.protocol == Protocol::Remote;
    table.columns = remote ? std::vector<std::string>{"C", "E_D1", "P_D1", "P_D2", "E_D2"}
                           : std::vector<std::string>{"C", "E", "P_s", "P_s_11", "P_s_12", "P_s_22"};

    table.rows = evaluate_grid(spec.grid.size(), spec.threads, spec.grid, [&](std::size_t i) {
        const double C = spec.grid[i];
        const auto params = point_params(C, spec);
        const auto grid = simulation_grid(spec.tau_p, spec.t0, params, spec.dt, spec.span);
        const auto pulse = gaussian_pulse(spec.tau_p, spec.t0, grid);
        if (remote) {
            const auto out = run_remote(params, pulse, spec.weights);
            const auto& d1 = out.branch("D1");
            const auto& d2 = out.branch("D2");
            return std::vector<double>{C, d1.concurrence, d1.probability, d2.probability, d2.concurrence};
        }
        const auto out = run_same_cavity(params, pulse, spec.weights);
        const auto& photon = out.branch("photon");
        // One-hot initial states reuse the sector responses (M = 2, 1, 0).
        const double eff = spec.detector_efficiency;
        return std::vector<double>{C,
                                   photon.concurrence,
                                   photon.probability,
                                   eff * envelope_norm(out.responses[2].second),
                                   eff * envelope_norm(out.responses[1].second),
                                   eff * envelope_norm(out.responses[0].second)};
    });
    return table;
}

SweepTable sweep_pulse_duration(const SweepSpec& spec) {
    spec.validate();
    if (spec.axis != SweepAxis::PulseDuration) {
        throw Error(ErrorCode::InvalidArgument, "sweep_pulse_duration needs the tau-p axis");
    }

    SweepTable table;
    table.metadata = base_metadata(spec);
    std::string cs;
    for (double C : spec.cooperativities) cs += (cs.empty() ? "" : " ") + format_number(C);
    table.metadata.emplace_back("cooperativities", cs);

    table.columns.push_back("tau_p");
    const std::string prefix = spec.protocol == Protocol::Remote ? "E_D1_C" : "E_C";
    for (double C : spec.cooperativities) table.columns.push_back(prefix + short_label(C));

    table.rows = evaluate_grid(spec.grid.size(), spec.threads, spec.grid, [&](std::size_t i) {
        const double tau_p = spec.grid[i];
        std::vector<double> row{tau_p};
        for (double C : spec.cooperativities) row.push_back(headline_concurrence(spec, C, tau_p));
        return row;
    });
    return table;
}

SweepTable run_sweep(const SweepSpec& spec) {
    return spec.axis == SweepAxis::Cooperativity ? sweep_cooperativity(spec) : sweep_pulse_duration(spec);
}

} // namespace caps
