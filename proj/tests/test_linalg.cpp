#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace mjsr;

TEST(MatMul, IdentityAndNilpotent) {
    const RealMatrix m{{1.5, -2.0}, {0.25, 4.0}};
    EXPECT_EQ(mat_mul(RealMatrix::identity(2), m), m);
    const RealMatrix n{{0.0, 1.0}, {0.0, 0.0}};
    EXPECT_TRUE(mat_mul(n, n).is_zero());
    EXPECT_THROW(mat_mul(RealMatrix(2, 3), RealMatrix(2, 3)), ValidationError);
}

TEST(MatMul, ExampleFactorProduct) {
    const auto om = oracle::example_omega();
    const IntMatrix p = mat_mul(mat_mul(omega_factor(om, 3), omega_factor(om, 2)), omega_factor(om, 0));
    const IntMatrix expected{{1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}};
    EXPECT_EQ(p, expected);
}

TEST(Kronecker, UnitFactorAndBlockLayout) {
    const RealMatrix m{{1.0, 2.0}, {3.0, 4.0}};
    EXPECT_EQ(kronecker(RealMatrix{{1.0}}, m), m);

    const auto k = kronecker(matrix_cast<double>(omega_factor(oracle::example_omega(), 0)), m);
    ASSERT_EQ(k.rows(), 8u);
    for (std::size_t bi = 0; bi < 4; ++bi)
        for (std::size_t bj = 0; bj < 4; ++bj) {
            const bool filled = bj == 0 && (bi == 0 || bi == 2);
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t c = 0; c < 2; ++c)
                    EXPECT_EQ(k(2 * bi + r, 2 * bj + c), filled ? m(r, c) : 0.0);
        }
}

TEST(Kronecker, MixedProductIdentity) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto p = oracle::random_real(rng, 2, 2), q = oracle::random_real(rng, 2, 2);
        const auto r = oracle::random_real(rng, 2, 2), s = oracle::random_real(rng, 2, 2);
        const auto lhs = mat_mul(kronecker(p, q), kronecker(r, s));
        const auto rhs = kronecker(mat_mul(p, r), mat_mul(q, s));
        for (std::size_t i = 0; i < lhs.entries().size(); ++i) EXPECT_NEAR(lhs.entries()[i], rhs.entries()[i], 1e-12);
    }
}

TEST(Norms, Examples) {
    EXPECT_DOUBLE_EQ(operator_norm(RealMatrix::identity(3), NormKind::RowSumMax), 1.0);
    for (auto k : {NormKind::RowSumMax, NormKind::ColSumMax, NormKind::Frobenius})
        EXPECT_DOUBLE_EQ(operator_norm(RealMatrix{{2.0}}, k), 2.0);
    const RealMatrix m{{1.0, 1.0}, {0.0, 1.0}};
    EXPECT_DOUBLE_EQ(operator_norm(m, NormKind::RowSumMax), 2.0);
    EXPECT_DOUBLE_EQ(operator_norm(m, NormKind::ColSumMax), 2.0);
    EXPECT_DOUBLE_EQ(operator_norm(m, NormKind::Frobenius), std::sqrt(3.0));
    // complex modulus
    EXPECT_DOUBLE_EQ(operator_norm(ComplexMatrix{{Complex(3, 4)}}, NormKind::RowSumMax), 5.0);
}

TEST(BlockNorm, Examples) {
    EXPECT_DOUBLE_EQ(block_norm(RealMatrix::identity(6), 3, 2), 1.0);

    const RealMatrix b{{1.0, -2.0}, {0.5, 0.5}};
    RealMatrix m(8, 8);
    for (std::size_t bi : {0u, 2u})
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) m(2 * bi + r, 2 + c) = b(r, c);
    for (auto k : {NormKind::RowSumMax, NormKind::ColSumMax, NormKind::Frobenius})
        EXPECT_DOUBLE_EQ(block_norm(m, 4, 2, k), operator_norm(b, k));

    EXPECT_THROW(block_norm(RealMatrix(5, 5), 2, 2), ValidationError);
}

TEST(BlockNorm, LiftedMemberEqualsBaseNorm) {
    std::mt19937_64 rng(2);
    const auto set = oracle::random_set(rng, 4, 2);
    const auto lifted = lift_set(set, oracle::example_omega());
    EXPECT_DOUBLE_EQ(block_norm(lifted.members()[0], 4, 2), operator_norm(set[0]));
}

TEST(Submultiplicative, AllNormsAndBlockNorm) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + t % 8;
        const auto a = oracle::random_real(rng, d, d, -2.0, 2.0), b = oracle::random_real(rng, d, d, -2.0, 2.0);
        const auto ab = mat_mul(a, b);
        for (auto k : {NormKind::RowSumMax, NormKind::ColSumMax, NormKind::Frobenius})
            EXPECT_LE(operator_norm(ab, k), operator_norm(a, k) * operator_norm(b, k) * (1 + 1e-12));
        if (d % 2 == 0) {
            for (auto k : {NormKind::RowSumMax, NormKind::ColSumMax, NormKind::Frobenius})
                EXPECT_LE(block_norm(ab, 2, d / 2, k), block_norm(a, 2, d / 2, k) * block_norm(b, 2, d / 2, k) * (1 + 1e-12));
        }
    }
}

TEST(SpectralRadius, ClosedForms) {
    EXPECT_NEAR(spectral_radius(RealMatrix::identity(3)), 1.0, 1e-12);
    EXPECT_EQ(spectral_radius(RealMatrix{{0.0, 1.0}, {0.0, 0.0}}), 0.0);
    EXPECT_EQ(spectral_radius(RealMatrix(3, 3)), 0.0);
    EXPECT_NEAR(spectral_radius(RealMatrix{{2.0, 1.0}, {1.0, 1.0}}), (3.0 + std::sqrt(5.0)) / 2.0, 1e-9);
    // rotation: complex pair on the circle
    const double a = 0.7;
    EXPECT_NEAR(spectral_radius(RealMatrix{{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}}), 1.0, 1e-9);
    // Jordan block
    EXPECT_NEAR(spectral_radius(RealMatrix{{0.5, 1.0}, {0.0, 0.5}}), 0.5, 1e-9);
    EXPECT_NEAR(spectral_radius(ComplexMatrix{{Complex(0, 2)}}), 2.0, 1e-15);
    EXPECT_THROW(spectral_radius(RealMatrix(2, 3)), ValidationError);
}

TEST(SpectralRadius, AgreesWithEigenSolver) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + t % 7;
        const auto m = oracle::random_real(rng, d, d);
        const double expected = oracle::eigen_spectral_radius(m);
        EXPECT_NEAR(spectral_radius(m), expected, 1e-8 * (1 + expected)) << "trial " << t;
        const auto c = oracle::random_complex(rng, d, d);
        const double ec = oracle::eigen_spectral_radius(c);
        EXPECT_NEAR(spectral_radius(c), ec, 1e-8 * (1 + ec)) << "complex trial " << t;
    }
}

// ||M^(2^k)||^(1/2^k) computed naively with explicit squaring and the
// rescaling done by hand approaches the same value.
TEST(SpectralRadius, GelfandConsistency) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto m = oracle::random_real(rng, 4, 4);
        const double rho = spectral_radius(m);
        RealMatrix x = m;
        double log_scale = 0.0;
        for (int k = 1; k <= 20; ++k) {
            x = mat_mul(x, x);
            log_scale *= 2.0;
            const double s = operator_norm(x, NormKind::Frobenius);
            x *= 1.0 / s;
            log_scale += std::log(s);
        }
        const double gelfand = std::exp(log_scale / std::pow(2.0, 20));
        EXPECT_NEAR(gelfand, rho, 1e-6);
    }
}

TEST(Scaling, NormAndRadiusAreHomogeneous) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        const auto m = oracle::random_real(rng, 3, 3);
        const double c = u(rng);
        const RealMatrix cm = c * m;
        for (auto k : {NormKind::RowSumMax, NormKind::ColSumMax, NormKind::Frobenius})
            EXPECT_NEAR(operator_norm(cm, k), std::abs(c) * operator_norm(m, k), 1e-12);
        EXPECT_NEAR(spectral_radius(cm), std::abs(c) * spectral_radius(m), 1e-9 * (1 + std::abs(c)));
    }
}

TEST(SpectralRadius, PermutationSimilarityInvariant) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 3 + t % 4;
        const auto m = oracle::random_real(rng, d, d);
        std::vector<std::size_t> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        RealMatrix p(d, d), pinv(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            p(i, perm[i]) = 1.0;
            pinv(perm[i], i) = 1.0;
        }
        const double rho = spectral_radius(m);
        EXPECT_NEAR(spectral_radius(mat_mul(pinv, mat_mul(m, p))), rho, 1e-9 * (1 + rho));
    }
}
