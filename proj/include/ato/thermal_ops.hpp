// thermal_ops.hpp: Energy-conserving unitaries on system+bath, the induced thermal
// channel, and the exact-law coefficients (damping Lambda_ij, transitions P(i->j)).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ato/spectral.hpp"

namespace ato {

// ------------------------------ Block decomposition ----------------------------

struct EnergyBlock {
    double energy{0.0};
    std::vector<std::size_t> members; // flat composite indices, ascending
};

struct EnergyBlockDecomposition {
    std::vector<EnergyBlock> blocks;
    double tol{0.0};
    std::size_t dim{0};

    std::vector<std::size_t> block_sizes() const {
        std::vector<std::size_t> s;
        s.reserve(blocks.size());
        for (const auto& b : blocks) s.push_back(b.members.size());
        return s;
    }

    bool nondegenerate() const {
        return std::all_of(blocks.begin(), blocks.end(), [](const EnergyBlock& b) { return b.members.size() == 1; });
    }

    // block_of[flat] = index into `blocks`
    std::vector<std::size_t> block_index() const {
        std::vector<std::size_t> out(dim);
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (auto m : blocks[b].members) out[m] = b;
        return out;
    }
};

inline EnergyBlockDecomposition decompose_energy_blocks(const std::vector<double>& totals, double tol) {
    if (totals.empty()) throw std::invalid_argument("decompose_energy_blocks: empty spectrum");
    std::vector<std::size_t> order(totals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });

    EnergyBlockDecomposition dec;
    dec.tol = tol;
    dec.dim = totals.size();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t idx = order[k];
        if (k == 0 || totals[idx] - totals[order[k - 1]] > tol) {
            dec.blocks.push_back({totals[idx], {idx}});
            continue;
        }
        auto& blk = dec.blocks.back();
        // chaining: members within tol of a neighbour but not of the block's lowest level
        if (totals[idx] - blk.energy > tol) {
            std::ostringstream os;
            os << "decompose_energy_blocks: ambiguous grouping near E=" << blk.energy
               << " (levels chain across tol=" << tol << "); use a cleaner spectrum";
            throw std::invalid_argument(os.str());
        }
        blk.members.push_back(idx);
    }
    for (auto& b : dec.blocks) std::sort(b.members.begin(), b.members.end());
    return dec;
}

// --------------------------- Energy-conserving unitary -------------------------

class EnergyConservingUnitary {
public:
    EnergyConservingUnitary(EnergyBlockDecomposition dec, std::vector<MatrixXcd> blocks,
                            const NumericPolicy& policy = default_policy)
        : dec_(std::move(dec)), blocks_(std::move(blocks)) {
        if (blocks_.size() != dec_.blocks.size()) {
            throw std::invalid_argument("EnergyConservingUnitary: block count mismatch");
        }
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto n = static_cast<Index>(dec_.blocks[b].members.size());
            if (blocks_[b].rows() != n || blocks_[b].cols() != n) {
                throw std::invalid_argument("EnergyConservingUnitary: block shape mismatch");
            }
            if (unitarity_defect(blocks_[b]) > policy.structural) {
                throw std::invalid_argument("EnergyConservingUnitary: block is not unitary");
            }
        }
    }

    static EnergyConservingUnitary identity(const EnergyBlockDecomposition& dec) {
        std::vector<MatrixXcd> blocks;
        for (const auto& b : dec.blocks) {
            const auto n = static_cast<Index>(b.members.size());
            blocks.push_back(MatrixXcd::Identity(n, n));
        }
        return {dec, std::move(blocks)};
    }

    std::size_t dim() const noexcept { return dec_.dim; }
    const EnergyBlockDecomposition& decomposition() const noexcept { return dec_; }
    const std::vector<MatrixXcd>& blocks() const noexcept { return blocks_; }

    MatrixXcd matrix() const {
        const auto d = static_cast<Index>(dec_.dim);
        MatrixXcd u = MatrixXcd::Zero(d, d);
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto& mem = dec_.blocks[b].members;
            for (std::size_t r = 0; r < mem.size(); ++r)
                for (std::size_t c = 0; c < mem.size(); ++c)
                    u(static_cast<Index>(mem[r]), static_cast<Index>(mem[c])) =
                        blocks_[b](static_cast<Index>(r), static_cast<Index>(c));
        }
        return u;
    }

private:
    EnergyBlockDecomposition dec_;
    std::vector<MatrixXcd> blocks_;
};

// Max-entry |U H_T - H_T U| with H_T = diag(totals).
inline double commutator_defect(const MatrixXcd& u, const std::vector<double>& totals) {
    const auto d = static_cast<Index>(totals.size());
    double worst = 0.0;
    for (Index r = 0; r < d; ++r)
        for (Index c = 0; c < d; ++c)
            worst = std::max(worst, std::abs(u(r, c) * (totals[c] - totals[r])));
    return worst;
}

// Haar-distributed n x n unitary: QR of a complex Ginibre matrix, phases of diag(R) divided out.
template <class Rng>
MatrixXcd haar_unitary(Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    MatrixXcd z(n, n);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) z(r, c) = cd{normal(rng), normal(rng)} / std::sqrt(2.0);
    Eigen::HouseholderQR<MatrixXcd> qr(z);
    MatrixXcd q = qr.householderQ();
    const MatrixXcd& rr = qr.matrixQR();
    for (Index k = 0; k < n; ++k) {
        const cd d = rr(k, k);
        const double a = std::abs(d);
        q.col(k) *= (a > 0.0) ? d / a : cd{1.0, 0.0};
    }
    return q;
}

inline EnergyConservingUnitary sample_energy_conserving_unitary(const EnergyBlockDecomposition& dec,
                                                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<MatrixXcd> blocks;
    blocks.reserve(dec.blocks.size());
    for (const auto& b : dec.blocks) blocks.push_back(haar_unitary(static_cast<Index>(b.members.size()), rng));
    return {dec, std::move(blocks)};
}

// ------------------------------------ Channel ----------------------------------

// Tr_B[U (X (x) tau_B) U^dagger] for an arbitrary system operator X (linear extension).
inline MatrixXcd apply_channel_operator(const MatrixXcd& u, const MatrixXcd& x, const MatrixXcd& tau_b) {
    const CompositeIndexMap map(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(tau_b.rows()));
    if (u.rows() != static_cast<Index>(map.dim()) || u.cols() != u.rows()) {
        throw std::invalid_argument("apply_channel: unitary dimension does not match system x bath");
    }
    const MatrixXcd joint = u * kron(x, tau_b) * u.adjoint();
    return partial_trace_bath(joint, map);
}

inline DensityMatrix apply_channel(const EnergyConservingUnitary& u, const DensityMatrix& rho_s,
                                   const DensityMatrix& tau_b) {
    if (rho_s.dim() * tau_b.dim() != u.dim()) {
        throw std::invalid_argument("apply_channel: dimension mismatch");
    }
    return DensityMatrix(apply_channel_operator(u.matrix(), rho_s.matrix(), tau_b.matrix()));
}

// Channel image of the dyad |a><b| evaluated through the two Hermitian combinations
// (|a><b| + |b><a|) and i(|a><b| - |b><a|), so only Hermitian inputs enter the channel.
inline MatrixXcd channel_on_dyad(const MatrixXcd& u, const VectorXcd& ket, const VectorXcd& bra_vec,
                                 const MatrixXcd& tau_b) {
    const MatrixXcd x = ket * bra_vec.adjoint();
    const MatrixXcd h1 = x + x.adjoint();
    const MatrixXcd h2 = I_unit * (x - x.adjoint());
    const MatrixXcd y1 = apply_channel_operator(u, h1, tau_b);
    const MatrixXcd y2 = apply_channel_operator(u, h2, tau_b);
    return 0.5 * (y1 - I_unit * y2);
}

// ------------------------------ Exact-law coefficients -------------------------

struct ExactLawCoefficients {
    MatrixXcd lambda;               // Lambda_ij (damping of |i><j|)
    MatrixXd transition;            // P(i->j), row i = source
    std::vector<double> system_energies;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(lambda.rows()); }

    // Phi(rho) assembled entrywise from the exact laws.
    MatrixXcd reconstruct(const MatrixXcd& rho) const {
        const Index d = lambda.rows();
        MatrixXcd out = MatrixXcd::Zero(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                if (i == j) {
                    for (Index p = 0; p < d; ++p) out(p, p) += transition(i, p) * rho(i, i);
                } else {
                    out(i, j) += lambda(i, j) * rho(i, j);
                }
            }
        return out;
    }
};

inline ExactLawCoefficients extract_exact_law_coefficients(const EnergyConservingUnitary& u,
                                                           const DensityMatrix& tau_b,
                                                           const HamiltonianSpec& hs,
                                                           const HamiltonianSpec& hb,
                                                           const NumericPolicy& policy = default_policy) {
    if (!validate_bohr_nondegenerate(hs, policy)) {
        throw std::invalid_argument(
            "extract_exact_law_coefficients: system spectrum is Bohr-degenerate; exact laws do not apply");
    }
    const CompositeIndexMap map(hs.dim(), hb.dim());
    if (u.dim() != map.dim() || tau_b.dim() != hb.dim()) {
        throw std::invalid_argument("extract_exact_law_coefficients: dimension mismatch");
    }
    const MatrixXcd um = u.matrix();
    const auto d1 = hs.dim();
    const auto d2 = hb.dim();
    const double tol = policy.spectral_grouping;

    // amplitude <p, R'|U|i, R> summed over bath levels R' at energy E_R + E_i - E_p
    auto shell = [&](std::size_t r, std::size_t i, std::size_t p) {
        std::vector<std::size_t> out;
        const double target = hb.energy(r) + hs.energy(i) - hs.energy(p);
        for (std::size_t rp = 0; rp < d2; ++rp)
            if (std::abs(hb.energy(rp) - target) <= tol) out.push_back(rp);
        return out;
    };
    auto U = [&](std::size_t p, std::size_t rp, std::size_t i, std::size_t r) {
        return um(static_cast<Index>(map.flat(p, rp)), static_cast<Index>(map.flat(i, r)));
    };

    ExactLawCoefficients c;
    c.system_energies = hs.energy_list();
    c.lambda = MatrixXcd::Zero(static_cast<Index>(d1), static_cast<Index>(d1));
    c.transition = MatrixXd::Zero(static_cast<Index>(d1), static_cast<Index>(d1));
    for (std::size_t r = 0; r < d2; ++r) {
        const double pr = tau_b(r, r).real();
        for (std::size_t i = 0; i < d1; ++i) {
            for (std::size_t j = 0; j < d1; ++j) {
                cd lam{0.0, 0.0};
                for (auto rp : shell(r, i, i)) lam += U(i, rp, i, r) * std::conj(U(j, rp, j, r));
                c.lambda(static_cast<Index>(i), static_cast<Index>(j)) += pr * lam;

                double trans = 0.0;
                for (auto rp : shell(r, i, j)) trans += std::norm(U(j, rp, i, r));
                c.transition(static_cast<Index>(i), static_cast<Index>(j)) += pr * trans;
            }
        }
    }
    return c;
}

// Max-entry |Phi(tau_S) - tau_S| for an arbitrary global unitary (no conservation assumed).
inline double gibbs_residual(const MatrixXcd& global_u, const HamiltonianSpec& hs, const HamiltonianSpec& hb,
                             double beta) {
    const DensityMatrix tau_s = gibbs_state(hs, beta);
    const DensityMatrix tau_b = gibbs_state(hb, beta);
    return max_abs(apply_channel_operator(global_u, tau_s.matrix(), tau_b.matrix()) - tau_s.matrix());
}

inline double check_gibbs_preserving(const EnergyConservingUnitary& u, const HamiltonianSpec& hs,
                                     const HamiltonianSpec& hb, double beta) {
    return gibbs_residual(u.matrix(), hs, hb, beta);
}

// Global unitary U followed by a Givens rotation mixing two composite levels
// from different energy blocks; used as a negative control.
inline MatrixXcd corrupt_unitary(const MatrixXcd& u, std::size_t a, std::size_t b, double angle) {
    if (a == b || a >= static_cast<std::size_t>(u.rows()) || b >= static_cast<std::size_t>(u.rows())) {
        throw std::invalid_argument("corrupt_unitary: invalid level pair");
    }
    MatrixXcd g = MatrixXcd::Identity(u.rows(), u.cols());
    const auto ia = static_cast<Index>(a);
    const auto ib = static_cast<Index>(b);
    g(ia, ia) = std::cos(angle);
    g(ia, ib) = -std::sin(angle);
    g(ib, ia) = std::sin(angle);
    g(ib, ib) = std::cos(angle);
    return g * u;
}

} // namespace ato
