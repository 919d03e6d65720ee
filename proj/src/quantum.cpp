#include "caps/quantum.hpp"

#include "caps/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace caps {

namespace {

// sigma_y (x) sigma_y in the |11>,|12>,|21>,|22> basis.
Matrix4c spin_flip() {
    Matrix4c yy = Matrix4c::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    return yy;
}

} // namespace

TwoQubitState::TwoQubitState(const Matrix4c& rho) : rho_(rho) {
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm >= 1e-12) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian (max |rho - rho^+| = " << herm << ")";
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
    const double trace_err = std::abs(rho_.trace() - 1.0);
    if (trace_err >= 1e-10) {
        std::ostringstream msg;
        msg << "density matrix trace deviates from 1 by " << trace_err;
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
    const Matrix4c sym = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(sym, Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -1e-10) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << min_eig;
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
}

TwoQubitState TwoQubitState::pure(const Vector4c& psi) {
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::NotNormalized, "pure state vector is not normalized");
    }
    Matrix4c rho = psi * psi.adjoint();
    for (Eigen::Index i = 0; i < 4; ++i) rho(i, i) = rho(i, i).real();
    return TwoQubitState(rho);
}

Vector4c TwoQubitState::dominant_eigenvector() const {
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(0.5 * (rho_ + rho_.adjoint()));
    Vector4c v = solver.eigenvectors().col(3);
    for (Eigen::Index i = 0; i < 4; ++i) {
        if (std::abs(v(i)) > 1e-12) {
            v *= std::abs(v(i)) / v(i);
            break;
        }
    }
    return v;
}

AtomWeights AtomWeights::product(std::array<cplx, 2> atom_a, std::array<cplx, 2> atom_b) {
    auto normalize = [](std::array<cplx, 2>& u) {
        const double n = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
        if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "single-atom state has zero norm");
        u[0] /= n;
        u[1] /= n;
    };
    normalize(atom_a);
    normalize(atom_b);
    AtomWeights out;
    for (int k = 1; k <= 2; ++k) {
        for (int l = 1; l <= 2; ++l) out.w[basis_index(k, l)] = atom_a[k - 1] * atom_b[l - 1];
    }
    return out;
}

AtomWeights AtomWeights::normalized(std::array<cplx, 4> w) {
    AtomWeights out{w};
    const double n = std::sqrt(out.norm_squared());
    if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "atom weights have zero norm");
    for (auto& x : out.w) x /= n;
    return out;
}

AtomWeights AtomWeights::basis_state(int k, int l) {
    AtomWeights out{{cplx{}, cplx{}, cplx{}, cplx{}}};
    out.w[basis_index(k, l)] = 1.0;
    return out;
}

double AtomWeights::norm_squared() const {
    double s = 0.0;
    for (const auto& x : w) s += std::norm(x);
    return s;
}

bool AtomWeights::is_product(double tol) const {
    return std::abs(w[0] * w[3] - w[1] * w[2]) <= tol;
}

void AtomWeights::validate() const {
    if (std::abs(norm_squared() - 1.0) > 1e-12) {
        throw Error(ErrorCode::NotNormalized, "atom weights must satisfy sum |w_kl|^2 = 1");
    }
}

HeraldedState assemble_heralded_state(std::span<const PulseEnvelope, 4> branches) {
    Matrix4c gram;
    for (Eigen::Index i = 0; i < 4; ++i) {
        gram(i, i) = envelope_norm(branches[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = i + 1; j < 4; ++j) {
            gram(i, j) = overlap(branches[static_cast<std::size_t>(j)], branches[static_cast<std::size_t>(i)]);
            gram(j, i) = std::conj(gram(i, j));
        }
    }
    const double probability = gram.trace().real();
    if (!(probability > 1e-12)) {
        std::ostringstream msg;
        msg << "heralding probability " << probability << " is too small to condition on";
        throw Error(ErrorCode::VanishingProbability, msg.str());
    }
    return {TwoQubitState(gram / probability), probability};
}

double concurrence(const TwoQubitState& state) {
    const Matrix4c& rho = state.rho();
    const Matrix4c yy = spin_flip();
    const Matrix4c flipped = yy * rho.conjugate() * yy;

    // Eigenvalues of rho * flipped equal those of sqrt(rho) flipped sqrt(rho),
    // which is Hermitian and positive semidefinite.
    Eigen::SelfAdjointEigenSolver<Matrix4c> rho_eig(0.5 * (rho + rho.adjoint()));
    const Eigen::Vector4d root = rho_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix4c sqrt_rho =
        rho_eig.eigenvectors() * root.cast<cplx>().asDiagonal() * rho_eig.eigenvectors().adjoint();
    Matrix4c r = sqrt_rho * flipped * sqrt_rho;
    r = 0.5 * (r + r.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix4c> r_eig(r, Eigen::EigenvaluesOnly);
    std::array<double, 4> lambda{};
    for (Eigen::Index i = 0; i < 4; ++i) {
        lambda[static_cast<std::size_t>(i)] = std::sqrt(std::max(r_eig.eigenvalues()(i), 0.0));
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

double pure_concurrence(cplx a, cplx b, cplx c, cplx d) {
    const double n = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    if (std::abs(n - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "pure state has squared norm " << n;
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
    return 2.0 * std::abs(a * d - b * c);
}

double purity(const TwoQubitState& state) { return state.rho().cwiseAbs2().sum(); }

double schmidt_entropy_2d(const Matrix2c& amplitudes) {
    const double n = amplitudes.squaredNorm();
    if (std::abs(std::sqrt(n) - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "bipartite amplitudes have Frobenius norm " << std::sqrt(n);
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
    Eigen::JacobiSVD<Matrix2c> svd(amplitudes);
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
        const double p = svd.singularValues()(i) * svd.singularValues()(i) / n;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    return entropy;
}

} // namespace caps
