// ergotropy.hpp: Passive states, unitary ergotropy, and work extraction restricted to
// thermal phase unitaries (exact and with a perturbed system Hamiltonian).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ato/perturbation.hpp"
#include "ato/thermal_ops.hpp"

namespace ato {

// --------------------------------- Passive states -------------------------------

// Eigenvalues of rho (descending) placed on levels of h (ascending). Equal eigenvalues
// and equal energies keep their index order.
inline DensityMatrix passive_state(const DensityMatrix& rho, const HamiltonianSpec& h) {
    if (rho.dim() != h.dim()) throw std::invalid_argument("passive_state: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho.matrix() + rho.matrix().adjoint()),
                                                Eigen::EigenvaluesOnly);
    std::vector<double> p(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::stable_sort(p.begin(), p.end(), std::greater<>());
    VectorXd pops(static_cast<Index>(p.size()));
    for (std::size_t k = 0; k < p.size(); ++k) pops(static_cast<Index>(k)) = p[k];
    const MatrixXcd& u = h.eigenbasis();
    return DensityMatrix(u * pops.cast<cd>().asDiagonal() * u.adjoint());
}

inline double energy(const DensityMatrix& rho, const HamiltonianSpec& h) {
    return (h.matrix() * rho.matrix()).trace().real();
}

inline double ergotropy_unitary(const DensityMatrix& rho, const HamiltonianSpec& h) {
    return std::max(0.0, energy(rho, h) - energy(passive_state(rho, h), h));
}

// --------------------------------- Phase unitaries ------------------------------

struct PhaseUnitary {
    MatrixXd lambdas; // (system index i, bath index R)

    MatrixXcd matrix() const {
        const Index d1 = lambdas.rows();
        const Index d2 = lambdas.cols();
        VectorXcd diag(d1 * d2);
        for (Index i = 0; i < d1; ++i)
            for (Index r = 0; r < d2; ++r) diag(i * d2 + r) = std::exp(-I_unit * lambdas(i, r));
        return diag.asDiagonal();
    }
};

// Tr[H rho] - Tr[H U rho U^dagger] for U = diag(e^{-i lambda}).
inline double phase_objective(const MatrixXcd& h, const MatrixXcd& rho, const VectorXd& lambda) {
    const Index n = h.rows();
    double out = 0.0;
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            if (a == b) continue;
            out += (h(b, a) * rho(a, b) * (cd{1.0, 0.0} - std::exp(-I_unit * (lambda(a) - lambda(b))))).real();
        }
    return out;
}

struct PhaseOptimizerOptions {
    std::size_t restarts{32};
    std::size_t max_sweeps{200};
    std::uint64_t seed{0};
    double sweep_tol{1e-15};
};

struct PhaseOptimum {
    double value{0.0};
    VectorXd lambda; // flat composite order
};

// Coordinate ascent on the phase objective. The objective depends on one phase as
// const + 2 Re[z_c e^{-i lambda_c}] (negated), so each coordinate update is exact:
// lambda_c = arg(z_c) + pi (mod 2 pi). Restart 0 starts from lambda = 0, the rest are seeded draws.
inline PhaseOptimum maximize_phase_objective(const MatrixXcd& h, const MatrixXcd& rho,
                                             const PhaseOptimizerOptions& opt) {
    if (opt.restarts == 0 || opt.max_sweeps == 0) {
        throw std::invalid_argument("maximize_phase_objective: optimizer budget must be positive");
    }
    const Index n = h.rows();
    if (h.cols() != n || rho.rows() != n || rho.cols() != n) {
        throw std::invalid_argument("maximize_phase_objective: dimension mismatch");
    }
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    PhaseOptimum best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < opt.restarts; ++r) {
        std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + r);
        VectorXd lam = VectorXd::Zero(n);
        if (r > 0)
            for (Index c = 0; c < n; ++c) lam(c) = angle(rng);
        double value = phase_objective(h, rho, lam);
        for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            for (Index c = 0; c < n; ++c) {
                cd z{0.0, 0.0};
                for (Index b = 0; b < n; ++b)
                    if (b != c) z += h(b, c) * rho(c, b) * std::exp(I_unit * lam(b));
                if (std::abs(z) > 0.0) lam(c) = std::fmod(std::arg(z) + std::numbers::pi, 2.0 * std::numbers::pi);
            }
            const double next = phase_objective(h, rho, lam);
            const bool stalled = next - value <= opt.sweep_tol;
            value = std::max(value, next);
            if (stalled) break;
        }
        if (value > best.value) best = {value, lam};
    }
    return best;
}

inline void require_nondegenerate_totals(const HamiltonianSpec& hs, const HamiltonianSpec& hb,
                                         const NumericPolicy& policy) {
    const CompositeIndexMap map(hs.dim(), hb.dim());
    const auto dec = decompose_energy_blocks(total_energies(hs, hb, map), policy.spectral_grouping);
    if (!dec.nondegenerate()) {
        throw std::invalid_argument(
            "ergotropy: total spectrum H_S + H_B is degenerate; thermal unitaries are not phase unitaries");
    }
}

inline PhaseUnitary to_phase_unitary(const VectorXd& flat, std::size_t d1, std::size_t d2) {
    PhaseUnitary pu;
    pu.lambdas = MatrixXd(static_cast<Index>(d1), static_cast<Index>(d2));
    for (Index i = 0; i < static_cast<Index>(d1); ++i)
        for (Index r = 0; r < static_cast<Index>(d2); ++r) pu.lambdas(i, r) = flat(i * static_cast<Index>(d2) + r);
    return pu;
}

// Maximal energy drop of H_S under thermal phase unitaries; vanishes identically.
inline double ergotropy_under_TO(const DensityMatrix& rho_s, const HamiltonianSpec& hs, const HamiltonianSpec& hb,
                                 double beta, const PhaseOptimizerOptions& opt = {},
                                 const NumericPolicy& policy = default_policy) {
    require_nondegenerate_totals(hs, hb, policy);
    const MatrixXcd joint = kron(rho_s.matrix(), gibbs_state(hb, beta).matrix());
    const auto d2 = static_cast<Index>(hb.dim());
    const MatrixXcd h = kron(hs.matrix(), MatrixXcd::Identity(d2, d2));
    return std::max(0.0, maximize_phase_objective(h, joint, opt).value);
}

// ---------------------------------- B-coefficients ------------------------------

enum class PrimedEigenvalues { Exact, FirstOrder };

struct BCoefficients {
    MatrixXcd b;     // b_ij for i != j (b_ji = conj b_ij), zero diagonal
    MatrixXd theta;  // arg b_ij, 0 where b_ij = 0

    std::size_t dim() const noexcept { return static_cast<std::size_t>(b.rows()); }
};

// b_ij = <j|H'|i> (h'_i/(E_i-E_j) + h'_j/(E_j-E_i)) rho_ij, bath weights summed to one.
inline BCoefficients b_coefficients(const DensityMatrix& rho_s, const PerturbationSetup& setup,
                                    PrimedEigenvalues which = PrimedEigenvalues::Exact) {
    if (rho_s.dim() != setup.dim()) throw std::invalid_argument("b_coefficients: dimension mismatch");
    const auto d = static_cast<Index>(setup.dim());
    const VectorXd& e = setup.base().energies();
    const MatrixXcd& hp = setup.hprime();
    const VectorXd h = which == PrimedEigenvalues::Exact
                           ? exact_perturbed_spec(setup).energies()
                           : VectorXd(e + setup.epsilon() * hp.diagonal().real());
    BCoefficients out;
    out.b = MatrixXcd::Zero(d, d);
    out.theta = MatrixXd::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            if (i == j) continue;
            const double factor = h(i) / (e(i) - e(j)) + h(j) / (e(j) - e(i));
            const cd bij = hp(j, i) * factor * rho_s.matrix()(i, j);
            out.b(i, j) = bij;
            out.theta(i, j) = std::abs(bij) > 0.0 ? std::arg(bij) : 0.0;
        }
    return out;
}

// 2 eps sum_{i<j} |b_ij| (1 + cos theta_ij)
inline double ergotropy_TOeps_closed_form(const BCoefficients& b, double epsilon) {
    double acc = 0.0;
    const auto d = static_cast<Index>(b.dim());
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) acc += std::abs(b.b(i, j)) * (1.0 + std::cos(b.theta(i, j)));
    return 2.0 * epsilon * acc;
}

inline std::size_t active_pairs(const BCoefficients& b, double floor = 0.0) {
    std::size_t n = 0;
    const auto d = static_cast<Index>(b.dim());
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j)
            if (std::abs(b.b(i, j)) > floor) ++n;
    return n;
}

struct ErgotropyReport {
    double closed_form{0.0};
    double brute_force{0.0};
    PhaseUnitary optimizing_phases;
    double epsilon{0.0};
    double residual{0.0};
    std::size_t restarts{0};
    std::uint64_t seed{0};
};

inline ErgotropyReport ergotropy_under_TOeps_bruteforce(const DensityMatrix& rho_s, const PerturbationSetup& setup,
                                                        const HamiltonianSpec& hb, double beta,
                                                        const PhaseOptimizerOptions& opt = {},
                                                        const NumericPolicy& policy = default_policy) {
    require_nondegenerate_totals(setup.base(), hb, policy);
    const HamiltonianSpec hps = exact_perturbed_spec(setup);
    const auto d2 = static_cast<Index>(hb.dim());
    const MatrixXcd h = kron(hps.matrix(), MatrixXcd::Identity(d2, d2));
    const MatrixXcd joint = kron(rho_s.matrix(), gibbs_state(hb, beta).matrix());
    const PhaseOptimum best = maximize_phase_objective(h, joint, opt);

    ErgotropyReport rep;
    rep.epsilon = setup.epsilon();
    rep.closed_form = ergotropy_TOeps_closed_form(b_coefficients(rho_s, setup), setup.epsilon());
    rep.brute_force = std::max(0.0, best.value);
    rep.optimizing_phases = to_phase_unitary(best.lambda, setup.dim(), hb.dim());
    rep.residual = std::abs(rep.brute_force - rep.closed_form);
    rep.restarts = opt.restarts;
    rep.seed = opt.seed;
    return rep;
}

} // namespace ato
