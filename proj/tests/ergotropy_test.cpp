#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ato/convergence.hpp"
#include "ato/ergotropy.hpp"
#include "test_support.hpp"

namespace ato {
namespace {

const HamiltonianSpec kQubit = HamiltonianSpec::diagonal({0.0, 1.0});
const HamiltonianSpec kBath = HamiltonianSpec::diagonal({0.0, 0.37, 0.81});

MatrixXcd sigma_x() {
    MatrixXcd m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

DensityMatrix qubit_state(double p0, cd coherence) {
    MatrixXcd m(2, 2);
    m << p0, coherence, std::conj(coherence), 1.0 - p0;
    return DensityMatrix(m);
}

// Energy drop of a single coherent pair, maximized over the relative phase by hand:
// 2 eps |w| (1 + cos arg w) with w = <1|H'|0> rho_01.
double single_pair_oracle(const MatrixXcd& hp, const DensityMatrix& rho, double eps) {
    const cd w = hp(1, 0) * rho(0, 1);
    return 2.0 * eps * std::abs(w) * (1.0 + std::cos(std::arg(w)));
}

TEST(PassiveState, Examples) {
    const auto p = passive_state(DensityMatrix::from_populations(Eigen::Vector2d(0.2, 0.8)), kQubit);
    EXPECT_NEAR(p(0, 0).real(), 0.8, 1e-15);
    EXPECT_NEAR(p(1, 1).real(), 0.2, 1e-15);
    const auto g = gibbs_state(kQubit, 1.0);
    EXPECT_LE(max_abs(passive_state(g, kQubit).matrix() - g.matrix()), 1e-15);
}

TEST(PassiveState, MinimizesEnergyOverPermutations) {
    std::mt19937_64 rng(17);
    const auto h = HamiltonianSpec::diagonal({0.0, 0.7, 1.9});
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = testing::random_density(3, rng);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix());
        std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + 3);
        std::sort(lam.begin(), lam.end());
        double best = std::numeric_limits<double>::infinity();
        do {
            best = std::min(best, lam[0] * 0.0 + lam[1] * 0.7 + lam[2] * 1.9);
        } while (std::next_permutation(lam.begin(), lam.end()));
        EXPECT_NEAR(energy(passive_state(rho, h), h), best, 1e-13);
    }
}

TEST(UnitaryErgotropy, Examples) {
    EXPECT_NEAR(ergotropy_unitary(gibbs_state(kQubit, 0.5), kQubit), 0.0, 1e-15);
    EXPECT_NEAR(ergotropy_unitary(DensityMatrix::from_populations(Eigen::Vector2d(0.2, 0.8)), kQubit), 0.6, 1e-15);
    EXPECT_NEAR(ergotropy_unitary(DensityMatrix::basis_state(2, 1), kQubit), 1.0, 1e-15);
}

TEST(ThermalOperations, PhaseObjectiveVanishesForUnperturbedHamiltonian) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const auto hs = HamiltonianSpec::diagonal({0.0, 1.0, 2.5});
    const auto hb = HamiltonianSpec::diagonal({0.0, 0.37});
    const MatrixXcd h = kron(hs.matrix(), MatrixXcd::Identity(2, 2));
    for (int trial = 0; trial < 50; ++trial) {
        const auto rho = testing::random_density(3, rng);
        const MatrixXcd joint = kron(rho.matrix(), gibbs_state(hb, 1.0).matrix());
        VectorXd lam(6);
        for (Index k = 0; k < 6; ++k) lam(k) = angle(rng);
        EXPECT_NEAR(phase_objective(h, joint, lam), 0.0, 1e-15);
    }
    const auto rho = testing::random_density(3, rng);
    EXPECT_LE(ergotropy_under_TO(rho, hs, hb, 1.0), 1e-15);
}

TEST(ThermalOperations, DegenerateTotalsRejected) {
    EXPECT_THROW(ergotropy_under_TO(DensityMatrix::basis_state(2, 1), kQubit, kQubit, 1.0), std::invalid_argument);
}

TEST(BCoefficients, HandOracle) {
    const auto rho = qubit_state(0.5, 0.3);
    for (double eps : {0.0, 1e-2, 0.2}) {
        const auto b = b_coefficients(rho, PerturbationSetup(kQubit, sigma_x(), eps));
        EXPECT_NEAR(std::abs(b.b(0, 1) - 0.3 * std::sqrt(1.0 + 4.0 * eps * eps)), 0.0, 1e-14);
        EXPECT_NEAR(b.theta(0, 1), 0.0, 1e-15);
    }
}

TEST(BCoefficients, VanishForDiagonalInputs) {
    const auto setup = PerturbationSetup(kQubit, sigma_x(), 0.1);
    EXPECT_EQ(active_pairs(b_coefficients(qubit_state(0.3, 0.0), setup)), 0u);
    const auto diag = PerturbationSetup(kQubit, Eigen::Vector2cd(0.4, -0.1).asDiagonal(), 0.1);
    EXPECT_EQ(active_pairs(b_coefficients(qubit_state(0.5, 0.3), diag)), 0u);
}

TEST(BCoefficients, ThetaIsAntisymmetric) {
    std::mt19937_64 rng(2);
    const auto setup = PerturbationSetup(HamiltonianSpec::diagonal({0.0, 1.0, 2.5}), testing::random_hermitian(3, rng), 0.05);
    const auto b = b_coefficients(testing::random_density(3, rng), setup);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) {
            if (i == j) continue;
            EXPECT_NEAR(std::abs(b.b(i, j) - std::conj(b.b(j, i))), 0.0, 1e-14);
            EXPECT_NEAR(std::remainder(b.theta(i, j) + b.theta(j, i), 2.0 * std::numbers::pi), 0.0, 1e-14);
        }
}

TEST(ClosedForm, ZeroAndAlignedPhases) {
    const auto rho = qubit_state(0.5, 0.3);
    const auto b0 = b_coefficients(rho, PerturbationSetup(kQubit, sigma_x(), 0.0));
    EXPECT_EQ(ergotropy_TOeps_closed_form(b0, 0.0), 0.0);
    const double eps = 0.01;
    const auto b = b_coefficients(rho, PerturbationSetup(kQubit, sigma_x(), eps));
    EXPECT_NEAR(ergotropy_TOeps_closed_form(b, eps), 4.0 * eps * std::abs(b.b(0, 1)), 1e-16);
}

TEST(ClosedForm, OpposedPhaseIsAZeroMode) {
    const double eps = 0.01;
    const auto rho = qubit_state(0.5, -0.3);
    const auto setup = PerturbationSetup(kQubit, sigma_x(), eps);
    EXPECT_NEAR(ergotropy_TOeps_closed_form(b_coefficients(rho, setup), eps), 0.0, 1e-18);
    const auto rep = ergotropy_under_TOeps_bruteforce(rho, setup, kBath, 1.0);
    EXPECT_LE(rep.brute_force, 1e-15);
}

TEST(BruteForce, SinglePairMatchesOracle) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    MatrixXcd hp(2, 2);
    hp << 0.3, cd(0.7, -0.4), cd(0.7, 0.4), -0.5;
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = qubit_state(0.6, 0.3 * std::exp(I_unit * angle(rng)));
        for (double eps : {1e-2, 1e-3}) {
            const auto rep = ergotropy_under_TOeps_bruteforce(rho, PerturbationSetup(kQubit, hp, eps), kBath, 1.0);
            EXPECT_NEAR(rep.brute_force, single_pair_oracle(hp, rho, eps), 1e-14);
        }
    }
}

TEST(BruteForce, ClosedFormGapIsHigherOrder) {
    const auto rho = qubit_state(0.6, cd(0.2, 0.1));
    MatrixXcd hp(2, 2);
    hp << 0.3, cd(0.7, -0.4), cd(0.7, 0.4), -0.5;
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::vector<double> gap;
    for (double e : eps) {
        const auto rep = ergotropy_under_TOeps_bruteforce(rho, PerturbationSetup(kQubit, hp, e), kBath, 1.0);
        gap.push_back(rep.residual);
    }
    const auto fit = fit_loglog_slope(eps, gap, 1e-15);
    EXPECT_TRUE(fit.vacuous || fit.slope >= 1.9) << fit.slope;
}

TEST(BruteForce, MultiPairBoundedByClosedForm) {
    std::mt19937_64 rng(8);
    const auto hs = HamiltonianSpec::diagonal({0.0, 1.0, 2.5});
    const auto hb = HamiltonianSpec::diagonal({0.0, 0.37});
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho = testing::random_density(3, rng);
        const MatrixXcd hp = testing::random_hermitian(3, rng);
        const double eps = 1e-3;
        const auto rep = ergotropy_under_TOeps_bruteforce(rho, PerturbationSetup(hs, hp, eps), hb, 1.0);
        EXPECT_LE(rep.brute_force, rep.closed_form + 10.0 * eps * eps);
    }
}

TEST(BruteForce, DeterministicAndBudgetChecked) {
    const auto rho = qubit_state(0.6, cd(0.2, 0.1));
    const auto setup = PerturbationSetup(kQubit, sigma_x(), 1e-2);
    const auto a = ergotropy_under_TOeps_bruteforce(rho, setup, kBath, 1.0, {8, 100, 5});
    const auto b = ergotropy_under_TOeps_bruteforce(rho, setup, kBath, 1.0, {8, 100, 5});
    EXPECT_EQ(a.brute_force, b.brute_force);
    EXPECT_EQ(a.optimizing_phases.lambdas, b.optimizing_phases.lambdas);
    EXPECT_THROW(ergotropy_under_TOeps_bruteforce(rho, setup, kBath, 1.0, {0, 100, 5}), std::invalid_argument);
}

TEST(SlopeFit, RecoversPowerLawAndFloors) {
    const std::vector<double> x{1e-2, 1e-3, 1e-4};
    EXPECT_NEAR(fit_loglog_slope(x, {3e-4, 3e-6, 3e-8}).slope, 2.0, 1e-12);
    EXPECT_TRUE(fit_loglog_slope(x, {1e-16, 0.0, 1e-17}).vacuous);
    const auto one = fit_loglog_slope(x, {1e-8, 1e-16, 0.0});
    EXPECT_EQ(one.points, 1u);
    EXPECT_TRUE(std::isinf(one.slope));
    EXPECT_THROW(fit_loglog_slope({1.0}, {1.0}), std::invalid_argument);
    EXPECT_THROW(fit_loglog_slope({0.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
}

} // namespace
} // namespace ato
