#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ato/spectral.hpp"
#include "test_support.hpp"

namespace ato {
namespace {

TEST(GibbsState, GroundStateLimit) {
    const auto p = gibbs_populations(HamiltonianSpec::diagonal({0.0, 1.0}), 50.0);
    EXPECT_NEAR(p(0), 1.0, 1e-20);
    EXPECT_NEAR(p(1), 0.0, 1e-20);
}

TEST(GibbsState, InfiniteTemperatureLimitAndZeroBetaRejected) {
    const auto h = HamiltonianSpec::diagonal({0.0, 1.0});
    EXPECT_THROW(gibbs_state(h, 0.0), std::invalid_argument);
    EXPECT_THROW(gibbs_state(h, -1.0), std::invalid_argument);
    const auto p = gibbs_populations(h, 1e-9);
    EXPECT_NEAR(p(0), 0.5, 1e-9);
    EXPECT_NEAR(p(1), 0.5, 1e-9);
}

TEST(GibbsState, ScalarOracleThreeLevels) {
    const double z = 1.0 + std::exp(-1.0) + std::exp(-2.5);
    const double expected[] = {1.0 / z, std::exp(-1.0) / z, std::exp(-2.5) / z};
    const auto rho = gibbs_state(HamiltonianSpec::diagonal({0.0, 1.0, 2.5}), 1.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(rho(k, k).real(), expected[k], 1e-15);
        sum += rho(k, k).real();
    }
    EXPECT_NEAR(sum, 1.0, 4e-16);
    EXPECT_EQ(max_abs(rho.matrix() - MatrixXcd(rho.matrix().diagonal().asDiagonal())), 0.0);
}

TEST(GibbsState, LargeBetaEnergyProductDoesNotOverflow) {
    const auto p = gibbs_populations(HamiltonianSpec::diagonal({-1e6, 0.0, 1e6}), 10.0);
    EXPECT_TRUE(p.allFinite());
    EXPECT_DOUBLE_EQ(p(0), 1.0);
}

TEST(GibbsState, PopulationsNonIncreasingInEnergy) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> e(5);
        for (auto& x : e) x = u(rng);
        std::sort(e.begin(), e.end());
        const auto p = gibbs_populations(HamiltonianSpec::diagonal(e), u(rng) + 0.1);
        for (Index k = 1; k < p.size(); ++k) EXPECT_LE(p(k), p(k - 1));
    }
}

TEST(HamiltonianSpec, RejectsUnsortedAndNonUnitary) {
    EXPECT_THROW(HamiltonianSpec::diagonal({1.0, 0.0}), std::invalid_argument);
    MatrixXcd bad = MatrixXcd::Identity(2, 2);
    bad(0, 1) = 0.1;
    VectorXd e(2);
    e << 0.0, 1.0;
    EXPECT_THROW(HamiltonianSpec(e, bad), std::invalid_argument);
}

TEST(HamiltonianSpec, ReconstructionIsHermitian) {
    std::mt19937_64 rng(5);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(testing::random_hermitian(4, rng));
    const HamiltonianSpec h(es.eigenvalues(), es.eigenvectors());
    EXPECT_LE(hermiticity_defect(h.matrix()), 1e-12);
    EXPECT_FALSE(h.is_diagonal());
}

TEST(DensityMatrix, ValidatorRejectsEachViolation) {
    MatrixXcd m(2, 2);
    m << 0.5, cd{0.1, 0.2}, cd{0.1, 0.2}, 0.5; // not Hermitian
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
    m << 0.6, 0.0, 0.0, 0.6; // trace
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
    m << 1.2, 0.0, 0.0, -0.2; // negative eigenvalue
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
    m << 0.5, 0.5, 0.5, 0.5;
    EXPECT_NO_THROW(DensityMatrix{m});
}

TEST(CompositeIndexMap, RoundTripsEveryIndex) {
    const CompositeIndexMap map(3, 4);
    for (std::size_t f = 0; f < map.dim(); ++f) {
        const auto [i, r] = map.split(f);
        EXPECT_EQ(map.flat(i, r), f);
    }
    EXPECT_EQ(map.flat(2, 3), 11u);
}

TEST(TensorProduct, MaximallyMixedAndOneHot) {
    const auto half = DensityMatrix::from_populations(VectorXd::Constant(2, 0.5));
    EXPECT_LE(max_abs(tensor_product(half, half).matrix() - 0.25 * MatrixXcd::Identity(4, 4)), 1e-15);

    const auto p = tensor_product(DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(3, 1));
    MatrixXcd expect = MatrixXcd::Zero(6, 6);
    expect(1, 1) = 1.0;
    EXPECT_EQ(max_abs(p.matrix() - expect), 0.0);
}

TEST(TensorProduct, RespectsCompositeCap) {
    NumericPolicy tight;
    tight.max_composite_dim = 5;
    const auto a = DensityMatrix::basis_state(2, 0);
    const auto b = DensityMatrix::basis_state(3, 0);
    EXPECT_THROW(tensor_product(a, b, tight), std::invalid_argument);
}

TEST(PartialTrace, RecoversSystemFactor) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = testing::random_density(2, rng);
        const auto tau = testing::random_density(3, rng);
        const auto back = partial_trace_bath(tensor_product(rho, tau), CompositeIndexMap(2, 3));
        EXPECT_LE(max_abs(back.matrix() - rho.matrix()), 1e-12);
    }
}

TEST(PartialTrace, BellStateGivesMaximallyMixed) {
    VectorXcd psi = VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix bell(psi * psi.adjoint());
    const auto red = partial_trace_bath(bell, CompositeIndexMap(2, 2));
    EXPECT_LE(max_abs(red.matrix() - 0.5 * MatrixXcd::Identity(2, 2)), 1e-15);
}

// Oracle: sum_R (I (x) <R|) rho (I (x) |R>) with explicit projector matrices.
TEST(PartialTrace, MatchesProjectorOracle) {
    std::mt19937_64 rng(19);
    const auto rho = testing::random_density(6, rng);
    MatrixXcd oracle = MatrixXcd::Zero(2, 2);
    for (Index r = 0; r < 3; ++r) {
        MatrixXcd proj = MatrixXcd::Zero(6, 2); // columns: |i> (x) |R>
        for (Index i = 0; i < 2; ++i) proj(i * 3 + r, i) = 1.0;
        oracle += proj.adjoint() * rho.matrix() * proj;
    }
    const auto got = partial_trace_bath(rho, CompositeIndexMap(2, 3));
    EXPECT_LE(max_abs(got.matrix() - oracle), 1e-15);
    EXPECT_THROW(partial_trace_bath(rho, CompositeIndexMap(2, 2)), std::invalid_argument);
}

TEST(TotalEnergies, Enumeration) {
    const auto qq = total_energies(HamiltonianSpec::diagonal({0, 1}), HamiltonianSpec::diagonal({0, 1}),
                                   CompositeIndexMap(2, 2));
    EXPECT_EQ(qq, (std::vector<double>{0, 1, 1, 2}));

    const auto triv = total_energies(HamiltonianSpec::diagonal({0, 1, 2.5}), HamiltonianSpec::diagonal({0}),
                                     CompositeIndexMap(3, 1));
    EXPECT_EQ(triv, (std::vector<double>{0, 1, 2.5}));

    auto got = total_energies(HamiltonianSpec::diagonal({0, 1}), HamiltonianSpec::diagonal({0, 1, 2}),
                              CompositeIndexMap(2, 3));
    EXPECT_EQ(got, (std::vector<double>{0, 1, 2, 1, 2, 3}));
    std::vector<double> hand;
    for (double e : {0.0, 1.0})
        for (double b : {0.0, 1.0, 2.0}) hand.push_back(e + b);
    std::sort(hand.begin(), hand.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, hand);
}

TEST(BohrCheck, Examples) {
    EXPECT_FALSE(validate_bohr_nondegenerate({0.0, 1.0, 2.0}, 1e-9).ok);
    EXPECT_TRUE(validate_bohr_nondegenerate({0.0, 1.0, 2.5}, 1e-9).ok);

    const auto near = validate_bohr_nondegenerate({0.0, 1.0, 1.0 + 1e-12}, 1e-9);
    EXPECT_FALSE(near.ok);
    const auto hit = std::find_if(near.conflicts.begin(), near.conflicts.end(),
                                  [](const BohrConflict& c) { return c.level_degeneracy; });
    ASSERT_NE(hit, near.conflicts.end());
    EXPECT_EQ(hit->first, (BohrConflict::Pair{1, 2}));

    EXPECT_THROW(validate_bohr_nondegenerate(std::vector<double>{}, 1e-9), std::invalid_argument);
    EXPECT_TRUE(validate_bohr_nondegenerate({3.0}, 1e-9).ok);
}

TEST(BohrCheck, RepeatedGapReportsBothPairs) {
    const auto c = validate_bohr_nondegenerate({0.0, 1.0, 2.0}, 1e-9);
    ASSERT_EQ(c.conflicts.size(), 1u);
    EXPECT_EQ(c.conflicts[0].first, (BohrConflict::Pair{0, 1}));
    EXPECT_EQ(c.conflicts[0].second, (BohrConflict::Pair{1, 2}));
}

} // namespace
} // namespace ato
