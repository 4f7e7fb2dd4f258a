#include <gtest/gtest.h>

#include <cmath>

#include "qlyap/linalg.hpp"
#include "qlyap/random.hpp"

namespace qlyap {
namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

TEST(HermitianEig, PauliX) {
    const SpectralDecomposition s = hermitian_eig(pauli_x());
    EXPECT_NEAR(s.eigenvalues(0), -1.0, 1e-15);
    EXPECT_NEAR(s.eigenvalues(1), 1.0, 1e-15);
}

TEST(HermitianEig, DiagonalInputSortsAscendingWithPermutationVectors) {
    const SpectralDecomposition s = hermitian_eig(diagonal({3, 1, 2}));
    EXPECT_DOUBLE_EQ(s.eigenvalues(0), 1.0);
    EXPECT_DOUBLE_EQ(s.eigenvalues(1), 2.0);
    EXPECT_DOUBLE_EQ(s.eigenvalues(2), 3.0);
    // Column k is +-e_{index of eigenvalue k}.
    EXPECT_NEAR(std::abs(s.eigenvectors(1, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.eigenvectors(2, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.eigenvectors(0, 2)), 1.0, 1e-15);
}

TEST(HermitianEig, RandomReconstructionAndUnitarity) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix m = random_hermitian(8, rng);
        const SpectralDecomposition s = hermitian_eig(m);
        EXPECT_LE(operator_norm(reconstruct(s) - m), 1e-10 * operator_norm(m));
        EXPECT_LE(operator_norm(s.eigenvectors.adjoint() * s.eigenvectors - identity(8)), 1e-10);
        for (Eigen::Index i = 1; i < 8; ++i) EXPECT_LE(s.eigenvalues(i - 1), s.eigenvalues(i));
    }
}

TEST(HermitianEig, RejectsNonHermitian) {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    EXPECT_THROW(hermitian_eig(m), NonHermitianInput);
    EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 3)), DimensionMismatch);
}

TEST(HermitianEig, ReconstructionIsIdempotentUpToPhase) {
    Rng rng(5);
    const ComplexMatrix m = random_hermitian(6, rng);
    const SpectralDecomposition once = hermitian_eig(m);
    const SpectralDecomposition twice = hermitian_eig(reconstruct(once));
    EXPECT_LE((once.eigenvalues - twice.eigenvalues).norm(), 1e-12);
    for (Eigen::Index k = 0; k < 6; ++k) {
        // |<u_k, v_k>| = 1 for the same eigenvector up to phase.
        EXPECT_NEAR(std::abs(once.eigenvectors.col(k).dot(twice.eigenvectors.col(k))), 1.0, 1e-9);
    }
}

TEST(OperatorNorm, Examples) {
    EXPECT_DOUBLE_EQ(operator_norm(diagonal({3, -4})), 4.0);
    ComplexMatrix nil(2, 2);
    nil << 0, 1, 0, 0;
    EXPECT_NEAR(operator_norm(nil), 1.0, 1e-15);
    for (Eigen::Index d : {1, 3, 8}) EXPECT_NEAR(operator_norm(identity(d)), 1.0, 1e-15);
}

TEST(OperatorNorm, HermitianEqualsMaxAbsEigenvalue) {
    Rng rng(3);
    const ComplexMatrix m = random_hermitian(7, rng);
    const SpectralDecomposition s = hermitian_eig(m);
    EXPECT_NEAR(operator_norm(m), std::max(-s.min(), s.max()), 1e-12);
}

TEST(OperatorNorm, Submultiplicative) {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix m = random_matrix(5, rng);
        const ComplexMatrix n = random_matrix(5, rng);
        EXPECT_LE(operator_norm(m * n), operator_norm(m) * operator_norm(n) + 1e-10);
    }
}

TEST(FunctionalCalculus, Examples) {
    EXPECT_LE(operator_norm(functional_calculus(hermitian_eig(pauli_x()), [](double x) { return x * x; }) -
                            identity(2)),
              1e-15);
    const ComplexMatrix logistic =
        functional_calculus(hermitian_eig(diagonal({0.5, 0.25})), [](double x) { return 4 * x * (1 - x); });
    EXPECT_LE(operator_norm(logistic - diagonal({1.0, 0.75})), 1e-15);
}

TEST(FunctionalCalculus, CommutesWithArgument) {
    Rng rng(23);
    const ComplexMatrix m = random_hermitian(6, rng);
    const ComplexMatrix fm = functional_calculus(hermitian_eig(m), [](double x) { return std::exp(x); });
    EXPECT_LE(operator_norm(fm * m - m * fm), 1e-10);
}

TEST(FunctionalCalculus, DomainError) {
    EXPECT_THROW(functional_calculus(hermitian_eig(diagonal({-1.0, 1.0})), [](double x) { return std::log(x); }),
                 DomainError);
}

TEST(FunctionalCalculus, PolynomialHomomorphism) {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix m = random_hermitian(5, rng);
        const SpectralDecomposition s = hermitian_eig(m);
        const auto p = random_coefficients(static_cast<std::size_t>(rng.integer(0, 5)), 3, rng);
        const auto q = random_coefficients(static_cast<std::size_t>(rng.integer(0, 5)), 3, rng);
        const auto horner = [](const std::vector<long>& c, double x) {
            double v = 0.0;
            for (std::size_t k = c.size(); k-- > 0;) v = v * x + static_cast<double>(c[k]);
            return v;
        };
        const ComplexMatrix pm = functional_calculus(s, [&](double x) { return horner(p, x); });
        const ComplexMatrix qm = functional_calculus(s, [&](double x) { return horner(q, x); });
        const ComplexMatrix pqm = functional_calculus(s, [&](double x) { return horner(p, x) * horner(q, x); });
        EXPECT_LE(operator_norm(pqm - pm * qm), 1e-9 * (1.0 + operator_norm(pqm)));
    }
}

TEST(Exponential, HermitianRouteMatchesPade) {
    Rng rng(31);
    const ComplexMatrix h = random_hermitian(4, rng);
    const ComplexMatrix via_eig = exp_hermitian(hermitian_eig(h), Complex(0.0, -0.7));
    const ComplexMatrix via_pade = exp_general(Complex(0.0, -0.7) * h);
    EXPECT_LE(operator_norm(via_eig - via_pade), 1e-12);
}

}  // namespace
}  // namespace qlyap
