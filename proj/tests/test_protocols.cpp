#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caps/error.hpp"
#include "caps/protocols.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace caps;
namespace fz = oracle::frozen;

namespace {

PulseEnvelope pulse_for(const CavityParams& params, double tau_p = 50.0) {
    return gaussian_pulse(tau_p, 0.0, default_grid(tau_p, 0.0, params));
}

ProtocolOutcome same(double C, double tau_p = 50.0) {
    const auto p = CavityParams::from_cooperativity(C);
    return run_same_cavity(p, pulse_for(p, tau_p));
}

ProtocolOutcome remote(double C, double tau_p = 50.0) {
    const auto p = CavityParams::from_cooperativity(C);
    return run_remote(p, pulse_for(p, tau_p));
}

const double s = std::numbers::sqrt2 / 2.0;
const cplx I{0.0, 1.0};

} // namespace

TEST_CASE("beam splitter conventions") {
    const auto conv = BeamSplitterConvention::balanced();
    CHECK_NOTHROW(conv.validate());
    const auto f = beam_splitter_transform(BsDirection::Forward, {1.0, 0.0}, conv);
    CHECK(std::abs(f[0] - s) < 1e-15);
    CHECK(std::abs(f[1] - I * s) < 1e-15);
    const auto b1 = beam_splitter_transform(BsDirection::Backward, {s, I * s}, conv);
    CHECK(std::abs(b1[0] - 1.0) < 1e-15);
    CHECK(std::abs(b1[1]) < 1e-15);
    const auto b2 = beam_splitter_transform(BsDirection::Backward, {s, -I * s}, conv);
    CHECK(std::abs(b2[0]) < 1e-15);
    CHECK(std::abs(std::abs(b2[1]) - 1.0) < 1e-15);

    BeamSplitterConvention broken = conv;
    broken.backward = conv.forward;
    CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("same cavity reproduces the reference numbers") {
    const auto c1 = same(1.0).branch("photon");
    CHECK(c1.concurrence == doctest::Approx(fz::same_E_C1).epsilon(2e-4));
    CHECK(c1.probability == doctest::Approx(fz::same_Ps_C1).epsilon(2e-4));
    CHECK(c1.concurrence == doctest::Approx(oracle::same_cavity_E(1.0)).epsilon(0.01));
    CHECK(c1.probability == doctest::Approx(oracle::same_cavity_Ps(1.0)).epsilon(0.005));

    const auto c3 = same(3.0).branch("photon");
    CHECK(c3.concurrence == doctest::Approx(fz::same_E_C3).epsilon(1e-4));
    CHECK(c3.probability == doctest::Approx(fz::same_Ps_C3).epsilon(2e-4));
    CHECK(same(4.1).branch("photon").probability == doctest::Approx(fz::same_Ps_C4_1).epsilon(2e-4));
    CHECK(same(100.0).branch("photon").concurrence == doctest::Approx(fz::same_E_C100).epsilon(1e-4));
}

TEST_CASE("remote reproduces the reference numbers") {
    const auto r3 = remote(3.0);
    CHECK(r3.branch("D1").concurrence == doctest::Approx(fz::remote_E_D1_C3).epsilon(2e-4));
    CHECK(r3.branch("D1").probability == doctest::Approx(fz::remote_P_D1_C3).epsilon(2e-4));
    CHECK(r3.branch("D2").probability == doctest::Approx(fz::remote_P_D2_C3).epsilon(2e-4));
    CHECK(r3.total_probability == doctest::Approx(fz::remote_P_D1_C3 + fz::remote_P_D2_C3).epsilon(5e-4));

    const auto r1 = remote(1.0);
    CHECK(r1.branch("D2").probability == doctest::Approx(oracle::remote_P_D2(1.0)).epsilon(0.005 / 0.222));
    CHECK(r1.branch("D1").concurrence == doctest::Approx(oracle::remote_E_D1(1.0)).epsilon(0.01));
    CHECK(r1.branch("D1").probability == doctest::Approx(oracle::remote_P_D1(1.0)).epsilon(0.02));
    CHECK(r1.branch("D2").probability == doctest::Approx(fz::remote_P_D2_C1).epsilon(5e-4));

    const auto r100 = remote(100.0);
    CHECK(r100.branch("D1").probability == doctest::Approx(fz::remote_P_D1_C100).epsilon(5e-4));
    CHECK(r100.branch("D2").probability == doctest::Approx(fz::remote_P_D2_C100).epsilon(5e-4));
}

TEST_CASE("D2 heralds the singlet for any cooperativity") {
    for (double C : {0.1, 1.0, 3.0, 10.0}) {
        const auto d2 = remote(C).branch("D2");
        REQUIRE(d2.state);
        Vector4c singlet;
        singlet << 0, -s, s, 0;
        const double fidelity = (singlet.adjoint() * d2.state->rho() * singlet)(0, 0).real();
        CAPTURE(C);
        CHECK(fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d2.concurrence == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(envelope_norm(d2.envelopes[0]) < 1e-30);
        CHECK(envelope_norm(d2.envelopes[3]) < 1e-30);
    }
}

TEST_CASE("uncoupled atoms stay separable and reflect the photon") {
    const auto p = CavityParams::from_coupling(0.0);
    const auto out = run_same_cavity(p, pulse_for(p));
    CHECK(out.branch("photon").concurrence < 1e-6);
    CHECK(out.branch("photon").probability == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("without atomic loss every photon is detected") {
    CavityParams p;
    p.g = 2.0;
    p.gamma31 = p.gamma32 = 0.0;
    const auto pulse = pulse_for(p);
    CHECK(run_same_cavity(p, pulse).total_probability == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(run_remote(p, pulse).total_probability == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("detector efficiency scales probabilities only") {
    auto p = CavityParams::from_cooperativity(3.0);
    const auto pulse = pulse_for(p);
    const auto full = run_remote(p, pulse);
    p.detector_efficiency = 0.4;
    const auto dim = run_remote(p, pulse);
    for (const char* h : {"D1", "D2"}) {
        CHECK(dim.branch(h).probability == doctest::Approx(0.4 * full.branch(h).probability).epsilon(1e-14));
        CHECK(dim.branch(h).concurrence == full.branch(h).concurrence);
    }
    const auto same_full = run_same_cavity(CavityParams::from_cooperativity(3.0), pulse);
    const auto same_dim = run_same_cavity(p, pulse);
    CHECK(same_dim.total_probability == doctest::Approx(0.4 * same_full.total_probability).epsilon(1e-14));
}

TEST_CASE("concurrence grows with the cooperativity") {
    double previous = -1.0;
    for (double C : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) {
        const double E = same(C).branch("photon").concurrence;
        CAPTURE(C);
        CHECK(E >= previous - 1e-12);
        previous = E;
    }
}

TEST_CASE("assembled states are valid and consistent with pure concurrence") {
    for (double C : {0.5, 3.0, 30.0}) {
        for (const auto& out : {same(C, 20.0), remote(C, 20.0)}) {
            for (const auto& b : out.branches) {
                if (!b.state) continue;
                CHECK(b.probability >= 0.0);
                CHECK(b.probability <= 1.0 + 1e-9);
                if (b.purity > 1.0 - 1e-10) {
                    const auto v = b.state->dominant_eigenvector();
                    CHECK(std::abs(b.concurrence - pure_concurrence(v(0), v(1), v(2), v(3))) < 1e-8);
                }
            }
            CHECK(out.total_probability <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("non-product weights are rejected for remote cavities") {
    const auto p = CavityParams::from_cooperativity(3.0);
    try {
        (void)run_remote(p, pulse_for(p, 10.0), AtomWeights::normalized({1.0, 0.0, 0.0, 1.0}));
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}

TEST_CASE("distinct remote cavities") {
    const auto a = CavityParams::from_cooperativity(3.0);
    const auto b = CavityParams::from_cooperativity(1.0);
    const auto pulse = pulse_for(a, 20.0);
    const auto out = run_remote(a, b, pulse, AtomWeights::balanced());
    CHECK(out.params.cavity_b);
    CHECK(out.responses.size() == 4);
    // Mismatched cavities spoil the perfect D2 singlet.
    CHECK(out.branch("D2").concurrence < 1.0 - 1e-6);
    const auto twin = run_remote(a, a, pulse, AtomWeights::balanced());
    CHECK(twin.branch("D1").probability == run_remote(a, pulse).branch("D1").probability);
}

TEST_CASE("single-state weights herald with the sector probabilities") {
    const auto p = CavityParams::from_cooperativity(3.0);
    const auto pulse = pulse_for(p);
    const auto out = run_same_cavity(p, pulse, AtomWeights::basis_state(1, 1));
    CHECK(out.total_probability == doctest::Approx(envelope_norm(evolve_sector(2, p, pulse).alpha_out)));
    const auto absorbed = CavityParams::from_cooperativity(0.5);
    const auto dark = run_remote(absorbed, pulse_for(absorbed), AtomWeights::product({1.0, 0.0}, {1.0, 0.0}));
    CHECK(dark.total_probability < 1e-3);
}

TEST_CASE("ideal GHZ clouds end maximally entangled") {
    for (int na : {1, 2, 5}) {
        for (double phi : {0.0, 0.7}) {
            CloudSpec spec;
            spec.n_a = na;
            spec.n_b = 3;
            spec.phi_a = phi;
            spec.phi_b = -1.1;
            const auto out = run_ghz_cloud(spec, CavityParams::from_cooperativity(3.0),
                                           pulse_for(CavityParams::from_cooperativity(3.0), 10.0));
            CHECK(out.total_probability == doctest::Approx(1.0).epsilon(1e-14));
            for (const auto& b : out.branches) {
                CHECK(b.probability == doctest::Approx(0.5).epsilon(1e-14));
                CHECK(b.schmidt_entropy == doctest::Approx(1.0).epsilon(1e-12));
            }
            // D1: -|11> + e^{i(phi_a + phi_b)} |22> in the effective basis.
            const auto& a = out.branch("D1").amplitudes;
            const cplx ratio = a(1, 1) / a(0, 0);
            CHECK(std::abs(ratio + std::polar(1.0, phi - 1.1)) < 1e-12);
            CHECK(std::abs(a(0, 1)) < 1e-15);
        }
    }
}

TEST_CASE("finite-C single-atom clouds reduce to the remote protocol") {
    const auto p = CavityParams::from_cooperativity(3.0);
    const auto pulse = pulse_for(p);
    CloudSpec spec;
    spec.mode = CloudMode::FiniteC;
    const auto cloud = run_ghz_cloud(spec, p, pulse);
    const auto atoms = run_remote(p, pulse);
    for (const char* h : {"D1", "D2"}) {
        CHECK(cloud.branch(h).probability == doctest::Approx(atoms.branch(h).probability).epsilon(1e-14));
        const auto& x = cloud.branch(h).state->rho();
        const auto& y = atoms.branch(h).state->rho();
        CHECK((x - y).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cloud spec validation") {
    CloudSpec bad;
    bad.n_a = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = CloudSpec{};
    bad.phi_b = std::nan("");
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK(parse_cloud_mode("finite-c") == CloudMode::FiniteC);
    CHECK(parse_protocol("remote") == Protocol::Remote);
    CHECK_THROWS_AS(parse_protocol("serial"), Error);
}
