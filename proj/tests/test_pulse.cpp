#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caps/error.hpp"
#include "caps/pulse.hpp"

#include <cmath>
#include <numbers>

using namespace caps;

namespace {

bool throws_code(ErrorCode code, auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

} // namespace

TEST_CASE("grid spans the window and rejects bad steps") {
    const auto g = TimeGrid::spanning(-1.0, 1.0, 0.01);
    CHECK(g.n_points == 201);
    CHECK(g.t_end() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(throws_code(ErrorCode::InvalidArgument, [] { TimeGrid{0.0, -1.0, 100}.validate(); }));
    CHECK(throws_code(ErrorCode::InvalidArgument, [] { TimeGrid{0.0, 0.1, 3}.validate(); }));
}

TEST_CASE("gaussian pulse is unit-normalized with the amplitude FWHM equal to tau_p") {
    for (double tau_p : {1.0, 10.0, 50.0}) {
        const auto grid = default_window(tau_p, 0.0, std::min(kDefaultStep, tau_p / 20.0));
        const auto p = gaussian_pulse(tau_p, 0.0, grid);
        CHECK(envelope_norm(p) == doctest::Approx(1.0).epsilon(1e-9));

        const double peak = std::abs(p.value_at(0.0));
        CHECK(std::abs(p.value_at(tau_p / 2.0)) == doctest::Approx(peak / 2.0).epsilon(1e-12));
        CHECK(std::abs(p.value_at(-tau_p / 2.0)) == doctest::Approx(peak / 2.0).epsilon(1e-12));

        // Numeric full width at half maximum of |amp| from the samples.
        double first = 0.0;
        double last = 0.0;
        bool seen = false;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const double a = std::abs(p[i]) - peak / 2.0;
            const double b = std::abs(p[i + 1]) - peak / 2.0;
            if (a * b <= 0.0 && a != b) {
                const double t = grid.time(i) + grid.dt * a / (a - b);
                if (!seen) first = t;
                last = t;
                seen = true;
            }
        }
        CHECK(last - first == doctest::Approx(tau_p).epsilon(1e-4));
    }
}

TEST_CASE("eta follows the FWHM relation") {
    CHECK(gaussian_eta(50.0) == doctest::Approx(50.0 / (2.0 * std::sqrt(2.0 * std::numbers::ln2))));
}

TEST_CASE("pulse construction rejects coarse steps and short windows") {
    CHECK(throws_code(ErrorCode::StepTooCoarse,
                      [] { gaussian_pulse(0.1, 0.0, TimeGrid::spanning(-2.0, 2.0, 0.01)); }));
    CHECK(throws_code(ErrorCode::WindowTooSmall,
                      [] { gaussian_pulse(10.0, 0.0, TimeGrid::spanning(-20.0, 100.0, 0.01)); }));
    CHECK(throws_code(ErrorCode::WindowTooSmall,
                      [] { gaussian_pulse(10.0, 0.0, TimeGrid::spanning(-50.0, 30.0, 0.01)); }));
}

TEST_CASE("envelope with energy at the window edge is rejected") {
    const auto grid = TimeGrid::spanning(0.0, 1.0, 0.01);
    std::vector<cplx> amp(grid.n_points, cplx{1.0});
    const PulseEnvelope flat(grid, amp);
    CHECK(throws_code(ErrorCode::WindowTooSmall, [&] { flat.check_boundary(); }));
    CHECK(throws_code(ErrorCode::GridMismatch, [&] { PulseEnvelope(grid, std::vector<cplx>(5)); }));
}

TEST_CASE("overlap and norm use the trapezoid rule") {
    const auto grid = TimeGrid::spanning(0.0, 1.0, 0.25);
    std::vector<cplx> ones(grid.n_points, cplx{1.0});
    const PulseEnvelope p(TimeGrid{0.0, 0.25, 16}, std::vector<cplx>(16, cplx{0.0, 1.0}));
    CHECK(envelope_norm(p) == doctest::Approx(15 * 0.25));
    const PulseEnvelope q(TimeGrid{0.0, 0.25, 16}, std::vector<cplx>(16, cplx{2.0}));
    // conj(p) q = -2i per sample.
    CHECK(overlap(p, q).imag() == doctest::Approx(-2.0 * 15 * 0.25));
    const PulseEnvelope r(TimeGrid{0.0, 0.5, 16}, std::vector<cplx>(16));
    CHECK(throws_code(ErrorCode::GridMismatch, [&] { overlap(p, r); }));
}

TEST_CASE("value_at interpolates tabulated envelopes and vanishes outside") {
    const TimeGrid grid{0.0, 1.0, 16};
    std::vector<cplx> amp(16);
    for (std::size_t i = 0; i < 16; ++i) amp[i] = cplx{static_cast<double>(i)};
    const PulseEnvelope p(grid, amp);
    CHECK(p.value_at(2.5).real() == doctest::Approx(2.5));
    CHECK(p.value_at(-0.5) == cplx{});
    CHECK(p.value_at(16.0) == cplx{});
    CHECK(p.scaled(cplx{0.0, 2.0})[3] == cplx{0.0, 6.0});
    CHECK(p.max_abs() == doctest::Approx(15.0));
}

TEST_CASE("default window leaves room for the ring-down") {
    const auto g = default_window(50.0, 10.0, 0.01);
    CHECK(g.t_start == doctest::Approx(10.0 - 200.0));
    CHECK(g.t_end() >= 10.0 + 400.0 + 20.0 - 0.01);
}
