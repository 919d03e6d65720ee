#pragma once

// Two-atom states heralded by a photon detection.
//
// Basis order is fixed everywhere as |11>, |12>, |21>, |22> (first label is
// atom A); index = 2*(k-1) + (l-1).

#include "caps/pulse.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>

namespace caps {

using Matrix4c = Eigen::Matrix4cd;
using Matrix2c = Eigen::Matrix2cd;
using Vector4c = Eigen::Vector4cd;

constexpr std::size_t basis_index(int k, int l) { return static_cast<std::size_t>(2 * (k - 1) + (l - 1)); }

class TwoQubitState {
public:
    // Validates Hermiticity (1e-12), unit trace (1e-10) and positivity
    // (smallest eigenvalue >= -1e-10); throws NotNormalized otherwise.
    explicit TwoQubitState(const Matrix4c& rho);

    static TwoQubitState pure(const Vector4c& psi);

    const Matrix4c& rho() const { return rho_; }
    cplx operator()(std::size_t row, std::size_t col) const {
        return rho_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    // Eigenvector of the largest eigenvalue, with its first nonzero
    // component made real positive.
    Vector4c dominant_eigenvector() const;

private:
    Matrix4c rho_;
};

// Initial product-state amplitudes w_kl multiplying the incoming photon.
struct AtomWeights {
    std::array<cplx, 4> w{cplx{0.5}, cplx{0.5}, cplx{0.5}, cplx{0.5}};

    static AtomWeights balanced() { return {}; }
    // w_kl = u_k v_l with each single-atom superposition normalized.
    static AtomWeights product(std::array<cplx, 2> atom_a, std::array<cplx, 2> atom_b);
    // Four amplitudes, rescaled to unit norm.
    static AtomWeights normalized(std::array<cplx, 4> w);
    static AtomWeights basis_state(int k, int l);

    cplx operator()(int k, int l) const { return w[basis_index(k, l)]; }

    double norm_squared() const;
    bool is_product(double tol = 1e-12) const;
    void validate() const;
};

struct HeraldedState {
    TwoQubitState state;
    double probability;
};

// rho_(kl),(pq) = int A_kl(t) conj(A_pq(t)) dt / P with P = sum_kl int |A_kl|^2 dt.
// Throws VanishingProbability if P <= 1e-12.
HeraldedState assemble_heralded_state(std::span<const PulseEnvelope, 4> branches);

// Wootters spin-flip concurrence.
double concurrence(const TwoQubitState& state);

// 2|ad - bc| for a normalized pure state a|11> + b|12> + c|21> + d|22>.
double pure_concurrence(cplx a, cplx b, cplx c, cplx d);

double purity(const TwoQubitState& state);

// Entanglement entropy in ebits of a normalized bipartite pure state given as
// a 2x2 coefficient matrix (rows: subsystem A, columns: subsystem B).
double schmidt_entropy_2d(const Matrix2c& amplitudes);

} // namespace caps
