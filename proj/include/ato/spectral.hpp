// spectral.hpp: Hamiltonians, density matrices, Gibbs states, and composite-space
// plumbing (tensor product, partial trace over the bath, total energies).
//
// Composite ordering is system-major everywhere: |i, R> lives at flat index i*d2 + R.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ato/numeric_policy.hpp"

namespace ato {

using cd = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr cd I_unit{0.0, 1.0};

inline double max_abs(const MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const MatrixXcd& m) {
    return max_abs(m - m.adjoint());
}

inline double unitarity_defect(const MatrixXcd& u) {
    return max_abs(u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols()));
}

// --------------------------------- Hamiltonian --------------------------------

class HamiltonianSpec {
public:
    HamiltonianSpec() = default;

    HamiltonianSpec(VectorXd energies, MatrixXcd eigenbasis,
                    const NumericPolicy& policy = default_policy)
        : energies_(std::move(energies)), basis_(std::move(eigenbasis)) {
        const Index d = energies_.size();
        if (d == 0) throw std::invalid_argument("HamiltonianSpec: empty spectrum");
        if (basis_.rows() != d || basis_.cols() != d) {
            throw std::invalid_argument("HamiltonianSpec: eigenbasis shape does not match spectrum");
        }
        for (Index k = 0; k < d; ++k) {
            if (!std::isfinite(energies_(k))) {
                throw std::invalid_argument("HamiltonianSpec: non-finite energy");
            }
            if (k > 0 && energies_(k) < energies_(k - 1)) {
                throw std::invalid_argument("HamiltonianSpec: energies must be sorted ascending");
            }
        }
        if (unitarity_defect(basis_) > policy.structural) {
            throw std::invalid_argument("HamiltonianSpec: eigenbasis is not unitary");
        }
        diagonal_ = max_abs(basis_ - MatrixXcd::Identity(d, d)) == 0.0;
    }

    static HamiltonianSpec diagonal(const std::vector<double>& energies) {
        VectorXd e(static_cast<Index>(energies.size()));
        for (std::size_t k = 0; k < energies.size(); ++k) e(static_cast<Index>(k)) = energies[k];
        const Index d = e.size();
        return HamiltonianSpec(std::move(e), MatrixXcd::Identity(d, d));
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(energies_.size()); }
    const VectorXd& energies() const noexcept { return energies_; }
    double energy(std::size_t k) const { return energies_(static_cast<Index>(k)); }
    const MatrixXcd& eigenbasis() const noexcept { return basis_; }
    bool is_diagonal() const noexcept { return diagonal_; }

    MatrixXcd matrix() const {
        return basis_ * energies_.cast<cd>().asDiagonal() * basis_.adjoint();
    }

    std::vector<double> energy_list() const {
        return {energies_.data(), energies_.data() + energies_.size()};
    }

private:
    VectorXd energies_;
    MatrixXcd basis_;
    bool diagonal_{true};
};

// -------------------------------- Density matrix -------------------------------

// Returns a diagnostic when m is not a valid density matrix under the policy.
inline std::optional<std::string> state_violation(const MatrixXcd& m,
                                                  const NumericPolicy& policy = default_policy) {
    if (m.rows() == 0 || m.rows() != m.cols()) return "matrix is empty or not square";
    if (!m.allFinite()) return "matrix has non-finite entries";
    if (const double h = hermiticity_defect(m); h > policy.structural) {
        std::ostringstream os;
        os << "not Hermitian (defect " << h << ")";
        return os.str();
    }
    if (const double t = std::abs(m.trace() - cd{1.0, 0.0}); t > policy.structural) {
        std::ostringstream os;
        os << "trace deviates from 1 by " << t;
        return os.str();
    }
    const MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    if (const double lo = es.eigenvalues().minCoeff(); lo < -policy.psd_floor) {
        std::ostringstream os;
        os << "not positive semidefinite (min eigenvalue " << lo << ")";
        return os.str();
    }
    return std::nullopt;
}

class DensityMatrix {
public:
    DensityMatrix() = default;

    explicit DensityMatrix(MatrixXcd entries, const NumericPolicy& policy = default_policy)
        : m_(std::move(entries)) {
        if (auto why = state_violation(m_, policy)) {
            throw std::invalid_argument("DensityMatrix: " + *why);
        }
    }

    static DensityMatrix from_populations(const VectorXd& p) {
        return DensityMatrix(p.cast<cd>().asDiagonal().toDenseMatrix());
    }

    static DensityMatrix basis_state(std::size_t dim, std::size_t k) {
        if (k >= dim) throw std::invalid_argument("basis_state: index out of range");
        MatrixXcd m = MatrixXcd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
        m(static_cast<Index>(k), static_cast<Index>(k)) = 1.0;
        return DensityMatrix(std::move(m));
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const MatrixXcd& matrix() const noexcept { return m_; }
    cd operator()(std::size_t r, std::size_t c) const {
        return m_(static_cast<Index>(r), static_cast<Index>(c));
    }

private:
    MatrixXcd m_;
};

// ------------------------------ Composite indexing -----------------------------

struct CompositeIndexMap {
    std::size_t d1{0};
    std::size_t d2{0};

    CompositeIndexMap(std::size_t system_dim, std::size_t bath_dim) : d1(system_dim), d2(bath_dim) {
        if (d1 == 0 || d2 == 0) throw std::invalid_argument("CompositeIndexMap: zero dimension");
    }

    std::size_t dim() const noexcept { return d1 * d2; }
    std::size_t flat(std::size_t i, std::size_t r) const noexcept { return i * d2 + r; }
    std::pair<std::size_t, std::size_t> split(std::size_t f) const noexcept { return {f / d2, f % d2}; }
};

// ---------------------------------- Operations ---------------------------------

// Populations e^{-beta E_k}/Z evaluated with exponents shifted by E_min.
inline VectorXd gibbs_populations(const HamiltonianSpec& h, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("gibbs_state: beta must be positive and finite");
    }
    const VectorXd& e = h.energies();
    const double e_min = e.minCoeff();
    VectorXd w(e.size());
    for (Index k = 0; k < e.size(); ++k) {
        const double x = -beta * (e(k) - e_min);
        if (!std::isfinite(x)) throw std::invalid_argument("gibbs_state: non-finite exponent");
        w(k) = std::exp(x);
    }
    const double z = w.sum();
    if (!std::isfinite(z) || z <= 0.0) throw std::invalid_argument("gibbs_state: invalid partition function");
    return w / z;
}

inline DensityMatrix gibbs_state(const HamiltonianSpec& h, double beta) {
    const VectorXd p = gibbs_populations(h, beta);
    if (h.is_diagonal()) return DensityMatrix::from_populations(p);
    const MatrixXcd& u = h.eigenbasis();
    return DensityMatrix(u * p.cast<cd>().asDiagonal() * u.adjoint());
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b,
                                    const NumericPolicy& policy = default_policy) {
    if (a.dim() * b.dim() > policy.max_composite_dim) {
        throw std::invalid_argument("tensor_product: composite dimension exceeds configured cap");
    }
    return DensityMatrix(kron(a.matrix(), b.matrix()), policy);
}

// (sigma_S)_{pq} = sum_R (rho_SB)_{(p,R),(q,R)}; works on any operator.
inline MatrixXcd partial_trace_bath(const MatrixXcd& rho_sb, const CompositeIndexMap& map) {
    if (rho_sb.rows() != static_cast<Index>(map.dim()) || rho_sb.cols() != rho_sb.rows()) {
        throw std::invalid_argument("partial_trace_bath: dimension mismatch");
    }
    const auto d1 = static_cast<Index>(map.d1);
    const auto d2 = static_cast<Index>(map.d2);
    MatrixXcd out = MatrixXcd::Zero(d1, d1);
    for (Index p = 0; p < d1; ++p)
        for (Index q = 0; q < d1; ++q) {
            cd acc{0.0, 0.0};
            for (Index r = 0; r < d2; ++r) acc += rho_sb(p * d2 + r, q * d2 + r);
            out(p, q) = acc;
        }
    return out;
}

inline DensityMatrix partial_trace_bath(const DensityMatrix& rho_sb, const CompositeIndexMap& map) {
    return DensityMatrix(partial_trace_bath(rho_sb.matrix(), map));
}

inline std::vector<double> total_energies(const HamiltonianSpec& hs, const HamiltonianSpec& hb,
                                          const CompositeIndexMap& map) {
    if (!hs.is_diagonal() || !hb.is_diagonal()) {
        throw std::invalid_argument("total_energies: Hamiltonians must be diagonal in the working basis");
    }
    if (hs.dim() != map.d1 || hb.dim() != map.d2) {
        throw std::invalid_argument("total_energies: dimension mismatch");
    }
    std::vector<double> totals(map.dim());
    for (std::size_t i = 0; i < map.d1; ++i)
        for (std::size_t r = 0; r < map.d2; ++r) totals[map.flat(i, r)] = hs.energy(i) + hb.energy(r);
    return totals;
}

// ---------------------------- Bohr non-degeneracy ------------------------------

struct BohrConflict {
    using Pair = std::pair<std::size_t, std::size_t>;
    Pair first;
    Pair second;               // equals `first` for a degenerate pair of levels
    bool level_degeneracy{false};
};

struct BohrCheck {
    bool ok{true};
    std::vector<BohrConflict> conflicts;
    explicit operator bool() const noexcept { return ok; }
};

// True iff all levels are distinct and all nonzero gaps are pairwise distinct (within tol).
inline BohrCheck validate_bohr_nondegenerate(const std::vector<double>& energies, double tol) {
    if (energies.empty()) throw std::invalid_argument("validate_bohr_nondegenerate: empty spectrum");
    BohrCheck out;
    const std::size_t n = energies.size();
    struct Gap {
        BohrConflict::Pair levels;
        double value;
    };
    std::vector<Gap> gaps;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double g = std::abs(energies[b] - energies[a]);
            if (g <= tol) {
                out.ok = false;
                out.conflicts.push_back({{a, b}, {a, b}, true});
            } else {
                gaps.push_back({{a, b}, g});
            }
        }
    for (std::size_t x = 0; x < gaps.size(); ++x)
        for (std::size_t y = x + 1; y < gaps.size(); ++y)
            if (std::abs(gaps[x].value - gaps[y].value) <= tol) {
                out.ok = false;
                out.conflicts.push_back({gaps[x].levels, gaps[y].levels, false});
            }
    return out;
}

inline BohrCheck validate_bohr_nondegenerate(const HamiltonianSpec& h, const NumericPolicy& policy = default_policy) {
    return validate_bohr_nondegenerate(h.energy_list(), policy.spectral_grouping);
}

} // namespace ato
