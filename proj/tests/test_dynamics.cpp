#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caps/dynamics.hpp"
#include "caps/error.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace caps;

namespace {

double max_diff(const PulseEnvelope& a, const PulseEnvelope& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

PulseEnvelope pulse_for(const CavityParams& params, double tau_p = 50.0) {
    return gaussian_pulse(tau_p, 0.0, default_grid(tau_p, 0.0, params));
}

} // namespace

TEST_CASE("cooperativity and its inverse") {
    const auto p = CavityParams::from_cooperativity(3.0);
    CHECK(p.g == doctest::Approx(std::sqrt(6.0)));
    CHECK(p.cooperativity() == doctest::Approx(3.0));
    CHECK(p.gamma31 == doctest::Approx(0.5));
    const auto q = CavityParams::from_coupling(2.0, 2.0);
    CHECK(q.cooperativity() == doctest::Approx(1.0));
    CavityParams lossless;
    lossless.g = 1.0;
    lossless.gamma31 = lossless.gamma32 = 0.0;
    CHECK(std::isinf(lossless.cooperativity()));

    CavityParams bad;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = CavityParams{};
    bad.detector_efficiency = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("frequency reflection matches the closed form at resonance") {
    for (double C : {0.1, 0.5, 1.0, 3.0}) {
        const auto p = CavityParams::from_cooperativity(C);
        for (int M : {0, 1, 2}) {
            CHECK(std::abs(frequency_reflection(M, p, 0.0) - oracle::long_pulse_r(M, C)) < 1e-14);
            CHECK(std::abs(frequency_reflection(M, p, 0.3) - oracle::reflection(M, p.g, 1.0, 1.0, 0.3)) < 1e-14);
        }
    }
    CavityParams lossless;
    lossless.g = 2.0;
    lossless.gamma31 = lossless.gamma32 = 0.0;
    CHECK(frequency_reflection(1, lossless, 0.0) == cplx{-1.0});
    CHECK(frequency_reflection(0, lossless, 0.0) == cplx{1.0});
}

TEST_CASE("resonant reflection depends on C only") {
    const auto a = CavityParams::from_coupling(std::sqrt(6.0), 1.0);
    const auto b = CavityParams::from_coupling(std::sqrt(12.0), 2.0);
    for (int M : {0, 1, 2}) CHECK(std::abs(frequency_reflection(M, a, 0.0) - frequency_reflection(M, b, 0.0)) < 1e-15);
}

TEST_CASE("RK4 sector output agrees with the closed-form convolution") {
    for (double C : {0.25, 1.0, 10.0}) {
        const auto p = CavityParams::from_cooperativity(C);
        const auto pulse = pulse_for(p);
        for (int M : {0, 1, 2}) {
            CAPTURE(C);
            CAPTURE(M);
            CHECK(max_diff(evolve_sector(M, p, pulse).alpha_out, semianalytic_output(M, p, pulse)) < 1e-5);
        }
    }
}

TEST_CASE("RK4 sector output agrees with the spectral oracle") {
    for (double C : {0.5, 3.0}) {
        const auto p = CavityParams::from_cooperativity(C, 1.5);
        const auto pulse = pulse_for(p, 20.0);
        for (int M : {1, 2}) {
            const auto out = evolve_sector(M, p, pulse).alpha_out;
            for (double t : {-30.0, -10.0, 0.0, 5.0, 25.0}) {
                const auto i = static_cast<std::size_t>(std::lround((t - pulse.grid().t_start) / pulse.grid().dt));
                CAPTURE(t);
                CHECK(std::abs(out[i] - oracle::spectral_output(M, p.g, 1.5, 20.0, 0.0, pulse.grid().time(i))) < 1e-6);
            }
        }
    }
}

TEST_CASE("collective sector reproduces individually coupled atoms") {
    const auto p = CavityParams::from_cooperativity(2.0);
    const auto pulse = pulse_for(p, 10.0);
    const auto collective = evolve_sector(2, p, pulse).alpha_out;
    const auto unreduced = oracle::unreduced_output(2, p.g, 1.0, 1.0, pulse);
    double worst = 0.0;
    for (std::size_t i = 0; i < pulse.size(); ++i) worst = std::max(worst, std::abs(collective[i] - unreduced[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("lossless scattering conserves the photon") {
    for (double g : {1.0, 3.0}) {
        CavityParams p;
        p.g = g;
        p.gamma31 = p.gamma32 = 0.0;
        const auto pulse = pulse_for(p);
        for (int M : {0, 1, 2}) CHECK(envelope_norm(evolve_sector(M, p, pulse).alpha_out) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("empty cavity and uncoupled atoms are identical") {
    CavityParams p = CavityParams::from_cooperativity(0.0);
    const auto pulse = pulse_for(p);
    const auto m0 = evolve_sector(0, p, pulse).alpha_out;
    const auto m2 = evolve_sector(2, p, pulse).alpha_out;
    for (std::size_t i = 0; i < pulse.size(); ++i) REQUIRE(m0[i] == m2[i]);
    // Long pulse off an empty cavity: almost perfect reflection.
    CHECK(std::abs(overlap(pulse, m0)) > 0.99);
}

TEST_CASE("impedance-matched sectors absorb the photon") {
    const auto half = CavityParams::from_cooperativity(0.5);
    CHECK(envelope_norm(evolve_sector(1, half, pulse_for(half)).alpha_out) <= 0.01);
    const auto quarter = CavityParams::from_cooperativity(0.25);
    CHECK(envelope_norm(evolve_sector(2, quarter, pulse_for(quarter)).alpha_out) <= 0.01);
}

TEST_CASE("invalid inputs are reported with their code") {
    const auto p = CavityParams::from_cooperativity(1.0);
    const auto pulse = pulse_for(p, 10.0);
    CHECK_THROWS_AS(evolve_sector(-1, p, pulse), Error);
    try {
        (void)evolve_sector(1, p, pulse.scaled(2.0));
        FAIL("expected NotNormalized");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotNormalized);
    }
    try {
        (void)semianalytic_output(1, CavityParams::from_cooperativity(1.0, 2.0), pulse);
        FAIL("expected InvalidRegime");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRegime);
    }
    // A slowly decaying dark-ish polariton is still ringing at the window end.
    CavityParams slow;
    slow.g = 0.1;
    slow.gamma31 = slow.gamma32 = 0.0005;
    try {
        (void)evolve_sector(1, slow, pulse_for(slow, 50.0));
        FAIL("expected NonConvergent");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonConvergent);
    }
}

TEST_CASE("default grid resolves the fastest decay and the pulse") {
    const auto g1 = default_grid(50.0, 0.0, CavityParams::from_cooperativity(3.0));
    CHECK(g1.dt == doctest::Approx(0.01));
    const auto g2 = default_grid(0.1, 0.0, CavityParams::from_cooperativity(3.0));
    CHECK(g2.dt <= 0.1 / 20.0);
    const auto g3 = default_grid(50.0, 0.0, CavityParams::from_cooperativity(3.0, 5.0));
    CHECK(g3.dt <= 1.0 / 250.0 + 1e-15);
    CHECK(fastest_rate(2, CavityParams::from_cooperativity(100.0)) == doctest::Approx(20.0));
}

TEST_CASE("simulation grid honours overrides") {
    const auto p = CavityParams::from_cooperativity(3.0);
    const auto g = simulation_grid(10.0, 5.0, p, 0.005, 200.0);
    CHECK(g.dt == doctest::Approx(0.005));
    CHECK(g.t_start == doctest::Approx(5.0 - 40.0));
    CHECK(g.t_end() == doctest::Approx(5.0 - 40.0 + 200.0).epsilon(1e-3));
}
