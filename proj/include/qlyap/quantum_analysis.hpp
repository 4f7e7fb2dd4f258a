#pragma once

// Operator derivatives: inner derivations, their partial inverse, the
// divided-difference realization of delta_{A->B}, finite-difference Gateaux
// derivatives and operator Taylor partial sums.

#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <utility>

#include "qlyap/errors.hpp"
#include "qlyap/linalg.hpp"
#include "qlyap/ncpoly.hpp"

namespace qlyap {

enum class DerivativeMethod { divided_difference, finite_difference, symbolic };

struct DerivativeReport {
    ComplexMatrix value;
    DerivativeMethod method = DerivativeMethod::divided_difference;
    std::optional<double> step_used;
    /// ||value - alternate|| / (1 + ||value||) when an alternate value exists.
    std::optional<double> agreement_defect;
};

/// delta_A(X) = AX - XA.
inline ComplexMatrix inner_derivation(const ComplexMatrix& a, const ComplexMatrix& x) {
    require_same_dim(a, x);
    return a * x - x * a;
}

/// 1e-8 times the spectral diameter, floored at the smallest normal double.
inline double default_gap_tolerance(const SpectralDecomposition& s) {
    return std::max(1e-8 * s.diameter(), std::numeric_limits<double>::min());
}

/// Partial inverse of delta_A on the range of delta_A, in the eigenbasis of A.
inline ComplexMatrix inner_derivation_pinv(const SpectralDecomposition& s, const ComplexMatrix& y,
                                           double gap_tol) {
    if (!(gap_tol > 0.0)) throw DomainError("gap_tol must be positive");
    if (y.rows() != s.dim() || y.cols() != s.dim()) throw DimensionMismatch("Y does not match A");
    const ComplexMatrix& u = s.eigenvectors;
    const ComplexMatrix yt = u.adjoint() * y * u;
    const double kernel_threshold = gap_tol * operator_norm(y);
    ComplexMatrix xt = ComplexMatrix::Zero(s.dim(), s.dim());
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        for (Eigen::Index j = 0; j < s.dim(); ++j) {
            const double gap = s.eigenvalues(i) - s.eigenvalues(j);
            if (std::abs(gap) > gap_tol) {
                xt(i, j) = yt(i, j) / gap;
            } else if (std::abs(yt(i, j)) > kernel_threshold) {
                throw KernelComponent("Y has a component in the kernel of delta_A at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
    return u * xt * u.adjoint();
}

inline ComplexMatrix inner_derivation_pinv(const SpectralDecomposition& s, const ComplexMatrix& y) {
    return inner_derivation_pinv(s, y, default_gap_tolerance(s));
}

/// -delta_A^{-1} delta_B applied to X; on X = f(A) this is the off-kernel part
/// of the derivative of f at A in direction B.
inline ComplexMatrix suzuki_derivation(const SpectralDecomposition& s, const ComplexMatrix& b,
                                       const ComplexMatrix& x) {
    return -inner_derivation_pinv(s, inner_derivation(b, x));
}

/// Gateaux derivative of A -> f(A) in direction B via the first divided
/// difference of f on the spectrum of A. Coincident eigenvalues (within
/// gap_tol) use f'(lambda_i).
template <class F, class FPrime>
DerivativeReport divided_difference_derivative(const SpectralDecomposition& s, F&& f, FPrime&& fprime,
                                               const ComplexMatrix& b, double gap_tol) {
    if (b.rows() != s.dim() || b.cols() != s.dim()) throw DimensionMismatch("B does not match A");
    const Eigen::Index d = s.dim();
    RealVector fv(d);
    RealVector fpv(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        fv(i) = f(s.eigenvalues(i));
        fpv(i) = fprime(s.eigenvalues(i));
        if (!std::isfinite(fv(i)) || !std::isfinite(fpv(i))) {
            throw DomainError("function undefined at eigenvalue " + std::to_string(s.eigenvalues(i)));
        }
    }
    const ComplexMatrix& u = s.eigenvectors;
    ComplexMatrix kernel = u.adjoint() * b * u;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const double gap = s.eigenvalues(i) - s.eigenvalues(j);
            const double dd = std::abs(gap) > gap_tol ? (fv(i) - fv(j)) / gap : fpv(i);
            kernel(i, j) *= dd;
        }
    }
    return {u * kernel * u.adjoint(), DerivativeMethod::divided_difference, std::nullopt, std::nullopt};
}

template <class F, class FPrime>
DerivativeReport divided_difference_derivative(const SpectralDecomposition& s, F&& f, FPrime&& fprime,
                                               const ComplexMatrix& b) {
    return divided_difference_derivative(s, std::forward<F>(f), std::forward<FPrime>(fprime), b,
                                         default_gap_tolerance(s));
}

inline double default_fd_step(const ComplexMatrix& a, const ComplexMatrix& b) {
    return 1e-4 * (1.0 + operator_norm(a)) / (1.0 + operator_norm(b));
}

/// Central difference of `tau` at A in direction B with one Richardson level
/// over the steps {h, h/2}. `tau` is any callable ComplexMatrix -> ComplexMatrix;
/// library errors it raises on perturbed arguments become MapDomainError.
template <class Map>
DerivativeReport gateaux_finite_difference(Map&& tau, const ComplexMatrix& a, const ComplexMatrix& b,
                                           double base_step) {
    require_same_dim(a, b);
    if (!(base_step > 0.0)) throw DomainError("base_step must be positive");
    const auto central = [&](double h) -> ComplexMatrix {
        try {
            return (tau(ComplexMatrix(a + h * b)) - tau(ComplexMatrix(a - h * b))) / (2.0 * h);
        } catch (const MapDomainError&) {
            throw;
        } catch (const Error& e) {
            throw MapDomainError(std::string("perturbed argument rejected: ") + e.what());
        }
    };
    const ComplexMatrix coarse = central(base_step);
    const ComplexMatrix fine = central(0.5 * base_step);
    ComplexMatrix extrapolated = (4.0 * fine - coarse) / 3.0;
    const double defect = operator_norm(extrapolated - fine) / (1.0 + operator_norm(extrapolated));
    return {std::move(extrapolated), DerivativeMethod::finite_difference, base_step, defect};
}

template <class Map>
DerivativeReport gateaux_finite_difference(Map&& tau, const ComplexMatrix& a, const ComplexMatrix& b) {
    return gateaux_finite_difference(std::forward<Map>(tau), a, b, default_fd_step(a, b));
}

/// Evaluates f(A + sB) through its operator Taylor expansion truncated at
/// order N: sum_{n<=N} s^n/n! d^n_{A->B} f(A). Works for any Eigen dense
/// matrix type, so remainders can be measured in extended precision.
template <class Matrix>
Matrix taylor_partial_sum(const NCPoly& f, const Matrix& a, const Matrix& b,
                          typename Eigen::NumTraits<typename Matrix::Scalar>::Real s, std::size_t order) {
    using Real = typename Eigen::NumTraits<typename Matrix::Scalar>::Real;
    if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols()) {
        throw DimensionMismatch("taylor_partial_sum operands");
    }
    const Eigen::Index d = a.rows();
    Matrix out = Matrix::Zero(d, d);
    Matrix word_value(d, d);
    Real sn = 1;
    for (std::size_t n = 0; n <= order; ++n) {
        // g_n = d^n f / n!, so s^n/n! d^n f = s^n g_n.
        const NCPoly g = shift_coefficient(f, n);
        for (const auto& [w, c] : g.terms()) {
            word_value.setIdentity();
            for (Symbol sym : w) word_value = word_value * (sym == Symbol::A ? a : b);
            out += (sn * c.template convert_to<Real>()) * word_value;
        }
        sn *= s;
    }
    return out;
}

}  // namespace qlyap
