// approx_laws.hpp: First-order transformation laws for primed dyads |i'><j'| under a
// thermal unitary when the system Hamiltonian carries a weak perturbation eps H'.
//
// Predictions are matrices of dyad coefficients in the primed basis; O(eps^2) is dropped.
// Two forms are provided:
//   Consistent: the first-order expansion carried through term by term. The
//                l = i and k = j cross terms of an off-diagonal dyad feed the
//                population channel P(i->p), and matrix elements of H' sit on the
//                dyads they multiply.
//   AsTypeset: the commonly quoted closed forms, kept for comparison. They differ from
//                Consistent at O(eps) whenever P(i->p) != delta_ip (off-diagonal
//                law) or H' has complex off-diagonal elements (diagonal law).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ato/perturbation.hpp"
#include "ato/thermal_ops.hpp"

namespace ato {

enum class LawForm { Consistent, AsTypeset };
enum class PrimedDenominators { Exact, FirstOrder };

struct LawOptions {
    LawForm form{LawForm::Consistent};
    PrimedDenominators denominators{PrimedDenominators::Exact};
};

struct ApproxLawPrediction {
    std::size_t i{0};
    std::size_t j{0};
    MatrixXcd op;        // coefficients of |a'><b'|
    int dropped_order{2};
};

namespace detail {

inline void check_scenario(std::size_t i, std::size_t j, const ExactLawCoefficients& coeffs,
                           const FirstOrderBasis& basis) {
    if (coeffs.dim() != basis.dim()) throw std::invalid_argument("approx laws: dimension mismatch");
    if (coeffs.system_energies != basis.energies) {
        throw std::invalid_argument("approx laws: coefficients and basis come from different scenarios");
    }
    if (i >= basis.dim() || j >= basis.dim()) throw std::invalid_argument("approx laws: index out of range");
}

inline const VectorXd& primed_energies(const FirstOrderBasis& basis, const LawOptions& opt) {
    return opt.denominators == PrimedDenominators::Exact ? basis.exact_primed_energies : basis.primed_energies;
}

} // namespace detail

inline ApproxLawPrediction predict_offdiagonal(std::size_t i, std::size_t j, const ExactLawCoefficients& coeffs,
                                               const FirstOrderBasis& basis, const LawOptions& opt = {}) {
    detail::check_scenario(i, j, coeffs, basis);
    if (i == j) throw std::invalid_argument("predict_offdiagonal: requires i != j");
    const auto d = static_cast<Index>(basis.dim());
    const auto ii = static_cast<Index>(i);
    const auto jj = static_cast<Index>(j);
    const double eps = basis.epsilon;
    const MatrixXcd& hp = basis.hprime;
    const MatrixXcd hpp = basis.primed_hprime();
    const VectorXd& ep = detail::primed_energies(basis, opt);
    const std::vector<double>& e = basis.energies;
    const MatrixXcd& lam = coeffs.lambda;
    const MatrixXd& P = coeffs.transition;

    MatrixXcd x = MatrixXcd::Zero(d, d);
    const cd lij = lam(ii, jj);
    x(ii, jj) += lij;
    // back-rotation of Lambda_ij |i><j| into the primed basis
    for (Index k = 0; k < d; ++k)
        if (k != ii) x(k, jj) -= eps * lij * hpp(k, ii) / (ep(ii) - ep(k));
    for (Index l = 0; l < d; ++l)
        if (l != jj) x(ii, l) -= eps * lij * hpp(jj, l) / (ep(jj) - ep(l));

    // channel images of the first-order admixtures |i><l| and |k><j|
    for (Index l = 0; l < d; ++l) {
        if (l == jj) continue;
        const cd w = eps * hp(jj, l) / (e[j] - e[static_cast<std::size_t>(l)]);
        if (l == ii && opt.form == LawForm::Consistent) {
            for (Index p = 0; p < d; ++p) x(p, p) += w * P(ii, p);
        } else {
            x(ii, l) += w * lam(ii, l);
        }
    }
    for (Index k = 0; k < d; ++k) {
        if (k == ii) continue;
        const cd w = eps * hp(k, ii) / (e[i] - e[static_cast<std::size_t>(k)]);
        if (k == jj && opt.form == LawForm::Consistent) {
            for (Index p = 0; p < d; ++p) x(p, p) += w * P(jj, p);
        } else {
            x(k, jj) += w * lam(k, jj);
        }
    }
    return {i, j, std::move(x)};
}

inline ApproxLawPrediction predict_diagonal(std::size_t i, const ExactLawCoefficients& coeffs,
                                            const FirstOrderBasis& basis, const LawOptions& opt = {}) {
    detail::check_scenario(i, i, coeffs, basis);
    const auto d = static_cast<Index>(basis.dim());
    const auto ii = static_cast<Index>(i);
    const double eps = basis.epsilon;
    const MatrixXcd hpp = basis.primed_hprime();
    const VectorXd& ep = detail::primed_energies(basis, opt);
    const std::vector<double>& e = basis.energies;
    const MatrixXcd& lam = coeffs.lambda;
    const MatrixXd& P = coeffs.transition;
    const bool typeset = opt.form == LawForm::AsTypeset;

    MatrixXcd x = MatrixXcd::Zero(d, d);
    for (Index j = 0; j < d; ++j) {
        const double pij = P(ii, j);
        x(j, j) += pij;
        for (Index m = 0; m < d; ++m) {
            if (m == j) continue;
            const double den = ep(j) - ep(m);
            // coefficient of |j'><m'| and of |m'><j'|
            const cd to_jm = typeset ? hpp(m, j) : hpp(j, m);
            const cd to_mj = typeset ? hpp(j, m) : hpp(m, j);
            x(j, m) -= eps * pij * to_jm / den;
            x(m, j) -= eps * pij * to_mj / den;
        }
    }
    for (Index k = 0; k < d; ++k) {
        if (k == ii) continue;
        const double den = e[i] - e[static_cast<std::size_t>(k)];
        const cd to_ik = typeset ? hpp(k, ii) : hpp(ii, k);
        const cd to_ki = typeset ? hpp(ii, k) : hpp(k, ii);
        x(ii, k) += eps * lam(ii, k) * to_ik / den;
        x(k, ii) += eps * lam(k, ii) * to_ki / den;
    }
    return {i, i, std::move(x)};
}

inline ApproxLawPrediction predict_element(std::size_t i, std::size_t j, const ExactLawCoefficients& coeffs,
                                           const FirstOrderBasis& basis, const LawOptions& opt = {}) {
    return i == j ? predict_diagonal(i, coeffs, basis, opt) : predict_offdiagonal(i, j, coeffs, basis, opt);
}

// Prediction for a whole state given by its primed-dyad coefficients rho'_ij.
inline MatrixXcd predict_channel(const MatrixXcd& rho_primed, const ExactLawCoefficients& coeffs,
                                 const FirstOrderBasis& basis, const LawOptions& opt = {}) {
    const auto d = static_cast<Index>(basis.dim());
    if (rho_primed.rows() != d || rho_primed.cols() != d) {
        throw std::invalid_argument("predict_channel: dimension mismatch");
    }
    MatrixXcd out = MatrixXcd::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            if (rho_primed(i, j) == cd{0.0, 0.0}) continue;
            out += rho_primed(i, j) *
                   predict_element(static_cast<std::size_t>(i), static_cast<std::size_t>(j), coeffs, basis, opt).op;
        }
    return out;
}

// Brute-force Tr_B[U (|i'><j'| (x) tau_B) U^dagger], returned in the primed basis.
inline MatrixXcd exact_map(const EnergyConservingUnitary& u, std::size_t i, std::size_t j,
                           const FirstOrderBasis& basis, const DensityMatrix& tau_b) {
    if (i >= basis.dim() || j >= basis.dim()) throw std::invalid_argument("exact_map: index out of range");
    if (basis.dim() * tau_b.dim() != u.dim()) throw std::invalid_argument("exact_map: dimension mismatch");
    const MatrixXcd out = channel_on_dyad(u.matrix(), basis.vectors.col(static_cast<Index>(i)),
                                          basis.vectors.col(static_cast<Index>(j)), tau_b.matrix());
    return to_primed_basis(out, basis);
}

// l1 coherence (sum of off-diagonal magnitudes) of the channel output, in the primed
// basis, for an input whose primed-dyad coefficients are the diagonal `rho_diag`.
inline double coherence_generated(const DensityMatrix& rho_diag, const EnergyConservingUnitary& u,
                                  const FirstOrderBasis& basis, const DensityMatrix& tau_b,
                                  const NumericPolicy& policy = default_policy) {
    const MatrixXcd& r = rho_diag.matrix();
    if (rho_diag.dim() != basis.dim()) throw std::invalid_argument("coherence_generated: dimension mismatch");
    if (max_abs(r - MatrixXcd(r.diagonal().asDiagonal())) > policy.structural) {
        throw std::invalid_argument("coherence_generated: input must be diagonal in the primed basis");
    }
    const MatrixXcd& v = basis.vectors;
    const MatrixXcd input = v * r.diagonal().asDiagonal() * v.adjoint();
    const MatrixXcd out = to_primed_basis(apply_channel_operator(u.matrix(), input, tau_b.matrix()), basis);
    double l1 = 0.0;
    for (Index a = 0; a < out.rows(); ++a)
        for (Index b = 0; b < out.cols(); ++b)
            if (a != b) l1 += std::abs(out(a, b));
    return l1;
}

} // namespace ato
