#include "caps/validate.hpp"

#include "caps/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace caps {

namespace {

template <class Fn>
CheckResult check(std::string name, Fn fn) {
    CheckResult r;
    r.name = std::move(name);
    try {
        std::ostringstream detail;
        r.passed = fn(detail);
        r.detail = detail.str();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = e.what();
    }
    return r;
}

} // namespace

std::vector<CheckResult> run_validation() {
    std::vector<CheckResult> results;

    for (double C : {0.25, 0.5, 1.0, 3.0, 10.0}) {
        for (int M : {0, 1, 2}) {
            std::ostringstream name;
            name << "ode-vs-closed-form M=" << M << " C=" << C;
            results.push_back(check(name.str(), [&](std::ostream& out) {
                const auto params = CavityParams::from_cooperativity(C, 1.0);
                const auto pulse = gaussian_pulse(50.0, 0.0, default_grid(50.0, 0.0, params));
                const auto ode = evolve_sector(M, params, pulse).alpha_out;
                const auto closed = semianalytic_output(M, params, pulse);
                double worst = 0.0;
                for (std::size_t i = 0; i < ode.size(); ++i) worst = std::max(worst, std::abs(ode[i] - closed[i]));
                out << "max |diff| = " << worst << " (tol 1e-5)";
                return worst < 1e-5;
            }));
        }
    }

    for (double C : {1.0, 3.0}) {
        for (int M : {0, 1, 2}) {
            std::ostringstream name;
            name << "long-pulse-reflection M=" << M << " C=" << C;
            results.push_back(check(name.str(), [&](std::ostream& out) {
                const auto params = CavityParams::from_cooperativity(C, 1.0);
                const auto pulse = gaussian_pulse(200.0, 0.0, default_grid(200.0, 0.0, params));
                const auto response = evolve_sector(M, params, pulse).alpha_out;
                const double r_num = (overlap(pulse, response) / envelope_norm(pulse)).real();
                const double r_exact = frequency_reflection(M, params, 0.0).real();
                out << "numeric " << r_num << " vs r_M(0) = " << r_exact << " (tol 5e-3)";
                return std::abs(r_num - r_exact) < 5e-3;
            }));
        }
    }

    for (double g : {1.0, 3.0}) {
        for (int M : {0, 1, 2}) {
            std::ostringstream name;
            name << "lossless-conservation M=" << M << " g=" << g;
            results.push_back(check(name.str(), [&](std::ostream& out) {
                CavityParams params;
                params.g = g;
                params.gamma31 = 0.0;
                params.gamma32 = 0.0;
                const auto pulse = gaussian_pulse(50.0, 0.0, default_grid(50.0, 0.0, params));
                const double n = envelope_norm(evolve_sector(M, params, pulse).alpha_out);
                out << "output norm " << n << " (tol 1e-6)";
                return std::abs(n - 1.0) <= 1e-6;
            }));
        }
    }

    results.push_back(check("beam-splitter-round-trip", [](std::ostream& out) {
        const auto conv = BeamSplitterConvention::balanced();
        conv.validate();
        const auto arms = beam_splitter_transform(BsDirection::Forward, {cplx{1.0}, cplx{}}, conv);
        const auto same = beam_splitter_transform(BsDirection::Backward, arms, conv);
        const auto opposite = beam_splitter_transform(BsDirection::Backward, {arms[0], -arms[1]}, conv);
        const double err = std::max({std::abs(same[0] - 1.0), std::abs(same[1]), std::abs(opposite[0]),
                                     std::abs(std::abs(opposite[1]) - 1.0)});
        out << "deviation " << err;
        return err < 1e-12;
    }));

    return results;
}

} // namespace caps
