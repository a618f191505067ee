// perturbation.hpp: First-order non-degenerate perturbation theory for H_S + eps H'.
//
// All matrices live in the unperturbed eigenbasis of H_S. First-order vectors are kept
// unnormalized: |i'> = |i> + eps sum_{k != i} c_ki |k>, c_ki = <k|H'|i> / (E_i - E_k).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ato/spectral.hpp"

namespace ato {

class PerturbationSetup {
public:
    PerturbationSetup(HamiltonianSpec base, MatrixXcd hprime, double epsilon,
                      const NumericPolicy& policy = default_policy)
        : base_(std::move(base)), hprime_(std::move(hprime)), epsilon_(epsilon) {
        const auto d = static_cast<Index>(base_.dim());
        if (!base_.is_diagonal()) throw std::invalid_argument("PerturbationSetup: base must be diagonal");
        if (hprime_.rows() != d || hprime_.cols() != d) {
            throw std::invalid_argument("PerturbationSetup: H' shape does not match H_S");
        }
        if (hermiticity_defect(hprime_) > policy.structural) {
            throw std::invalid_argument("PerturbationSetup: H' is not Hermitian");
        }
        if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) {
            throw std::invalid_argument("PerturbationSetup: epsilon must lie in [0, 1]");
        }
        if (!validate_bohr_nondegenerate(base_, policy)) {
            throw std::invalid_argument("PerturbationSetup: H_S must have a non-degenerate Bohr spectrum");
        }
    }

    const HamiltonianSpec& base() const noexcept { return base_; }
    const MatrixXcd& hprime() const noexcept { return hprime_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t dim() const noexcept { return base_.dim(); }

    PerturbationSetup with_epsilon(double eps) const { return {base_, hprime_, eps}; }

    // H_S + eps H' in the unperturbed eigenbasis.
    MatrixXcd perturbed_matrix() const {
        return base_.energies().cast<cd>().asDiagonal().toDenseMatrix() + epsilon_ * hprime_;
    }

private:
    HamiltonianSpec base_;
    MatrixXcd hprime_;
    double epsilon_{0.0};
};

// Full diagonalization of H_S + eps H'; columns phase-aligned so <i|i'> is real positive.
inline HamiltonianSpec exact_perturbed_spec(const PerturbationSetup& setup) {
    if (setup.epsilon() == 0.0) return setup.base();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(setup.perturbed_matrix());
    if (es.info() != Eigen::Success) throw std::runtime_error("exact_perturbed_spec: diagonalization failed");
    MatrixXcd v = es.eigenvectors();
    for (Index k = 0; k < v.cols(); ++k) {
        const cd o = v(k, k);
        if (std::abs(o) > 0.0) v.col(k) *= std::conj(o) / std::abs(o);
    }
    return {es.eigenvalues(), std::move(v)};
}

struct FirstOrderBasis {
    double epsilon{0.0};
    std::vector<double> energies;       // unperturbed E_i
    MatrixXcd hprime;                   // H' in the unperturbed basis
    MatrixXcd coefficients;             // c_ki, zero diagonal
    MatrixXcd vectors;                  // column i = |i'> to first order
    VectorXd primed_energies;           // E_i + eps <i|H'|i>
    VectorXd exact_primed_energies;     // eigenvalues of H_S + eps H'

    std::size_t dim() const noexcept { return energies.size(); }

    // <a'|H'|b'> using the first-order vectors.
    MatrixXcd primed_hprime() const { return vectors.adjoint() * hprime * vectors; }
};

inline FirstOrderBasis first_order_basis(const PerturbationSetup& setup, double min_gap = 1e-9) {
    const auto d = static_cast<Index>(setup.dim());
    const VectorXd& e = setup.base().energies();
    for (Index a = 0; a < d; ++a)
        for (Index b = a + 1; b < d; ++b)
            if (std::abs(e(a) - e(b)) <= min_gap) {
                throw std::invalid_argument("first_order_basis: near-degenerate levels; perturbation series invalid");
            }
    FirstOrderBasis fb;
    fb.epsilon = setup.epsilon();
    fb.energies = setup.base().energy_list();
    fb.hprime = setup.hprime();
    fb.coefficients = MatrixXcd::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k)
            if (k != i) fb.coefficients(k, i) = setup.hprime()(k, i) / (e(i) - e(k));
    fb.vectors = MatrixXcd::Identity(d, d) + fb.epsilon * fb.coefficients;
    fb.primed_energies = e + fb.epsilon * setup.hprime().diagonal().real();
    fb.exact_primed_energies = exact_perturbed_spec(setup).energies();
    return fb;
}

// V^dagger m V with V the first-order vectors. With `truncate`, the eps^2 term is dropped.
inline MatrixXcd to_primed_basis(const MatrixXcd& m, const FirstOrderBasis& basis, bool truncate = false) {
    if (m.rows() != static_cast<Index>(basis.dim()) || m.cols() != m.rows()) {
        throw std::invalid_argument("to_primed_basis: dimension mismatch");
    }
    if (!truncate) return basis.vectors.adjoint() * m * basis.vectors;
    const MatrixXcd& c = basis.coefficients;
    return m + basis.epsilon * (c.adjoint() * m + m * c);
}

// First-order inverse of to_primed_basis: W^dagger m W with W = I - eps C.
inline MatrixXcd from_primed_basis(const MatrixXcd& m, const FirstOrderBasis& basis) {
    if (m.rows() != static_cast<Index>(basis.dim()) || m.cols() != m.rows()) {
        throw std::invalid_argument("from_primed_basis: dimension mismatch");
    }
    const MatrixXcd w = MatrixXcd::Identity(m.rows(), m.cols()) - basis.epsilon * basis.coefficients;
    return w.adjoint() * m * w;
}

} // namespace ato
