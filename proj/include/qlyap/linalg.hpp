#pragma once

// Dense complex matrices, Hermitian eigendecomposition and scalar functional
// calculus. All algebras are full matrix algebras M_d(C); matrices are Eigen
// dense complex matrices.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qlyap/errors.hpp"

namespace qlyap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Relative tolerance of the Hermiticity check performed by hermitian_eig.
inline constexpr double kHermitianTolerance = 1e-10;

/// Eigenvalues (ascending) and a unitary matrix whose columns are the
/// corresponding eigenvectors.
struct SpectralDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    [[nodiscard]] Eigen::Index dim() const { return eigenvalues.size(); }
    [[nodiscard]] double min() const { return eigenvalues(0); }
    [[nodiscard]] double max() const { return eigenvalues(eigenvalues.size() - 1); }
    [[nodiscard]] double diameter() const { return max() - min(); }
};

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

/// Matrix unit with a single 1 at (row, col), zero-based.
inline ComplexMatrix matrix_unit(Eigen::Index dim, Eigen::Index row, Eigen::Index col) {
    ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
    e(row, col) = 1.0;
    return e;
}

inline ComplexMatrix diagonal(std::initializer_list<double> values) {
    const auto dim = static_cast<Eigen::Index>(values.size());
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    Eigen::Index i = 0;
    for (double v : values) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionMismatch(std::string(what) + " must be a non-empty square matrix");
    }
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("operands of dimension " + std::to_string(a.rows()) + " and " +
                                std::to_string(b.rows()));
    }
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

inline double hermitian_defect(const ComplexMatrix& m) { return operator_norm(m - m.adjoint()); }

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTolerance) {
    return m.rows() == m.cols() && hermitian_defect(m) <= rel_tol * operator_norm(m);
}

inline SpectralDecomposition hermitian_eig(const ComplexMatrix& m) {
    require_square(m, "hermitian_eig input");
    const double defect = hermitian_defect(m);
    if (defect > kHermitianTolerance * operator_norm(m)) {
        throw NonHermitianInput("||M - M^*|| = " + std::to_string(defect));
    }
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw DomainError("eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// U diag(f(lambda_i)) U^*.
template <class F>
ComplexMatrix functional_calculus(const SpectralDecomposition& s, F&& f) {
    Eigen::VectorXcd values(s.dim());
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const Complex v = f(s.eigenvalues(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw DomainError("function undefined at eigenvalue " + std::to_string(s.eigenvalues(i)));
        }
        values(i) = v;
    }
    return s.eigenvectors * values.asDiagonal() * s.eigenvectors.adjoint();
}

inline ComplexMatrix reconstruct(const SpectralDecomposition& s) {
    return functional_calculus(s, [](double x) { return x; });
}

/// exp(z H) for Hermitian H given its spectral decomposition.
inline ComplexMatrix exp_hermitian(const SpectralDecomposition& s, Complex z) {
    return functional_calculus(s, [z](double x) { return std::exp(z * x); });
}

/// General matrix exponential (scaling and squaring with Pade approximants).
inline ComplexMatrix exp_general(const ComplexMatrix& m) {
    require_square(m, "matrix exponential argument");
    return m.exp();
}

}  // namespace qlyap
