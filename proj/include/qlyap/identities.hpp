#pragma once

// Randomized identity suite for the operator-derivative calculus: Leibniz
// rule, the A f(A) = f(A) A first-order identity, agreement of the three
// first-derivative routes, partial-inverse reconstruction and the operator
// Taylor remainder order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qlyap/linalg.hpp"
#include "qlyap/ncpoly.hpp"
#include "qlyap/quantum_analysis.hpp"
#include "qlyap/random.hpp"

namespace qlyap {

struct IdentityCheck {
    std::string name;
    std::size_t count = 0;
    double max_defect = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct IdentitySuiteOptions {
    std::uint64_t seed = 7;
    std::size_t leibniz_pairs = 200;
    std::size_t max_degree = 5;
    long coefficient_bound = 3;
    std::size_t derivative_instances = 50;
    Eigen::Index dim = 6;
};

struct IdentitySuiteReport {
    std::uint64_t seed = 0;
    std::vector<IdentityCheck> checks;

    [[nodiscard]] bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

namespace detail {

inline double relative_distance(const ComplexMatrix& x, const ComplexMatrix& y) {
    const double scale = std::max(operator_norm(x), operator_norm(y));
    return scale == 0.0 ? 0.0 : operator_norm(x - y) / scale;
}

struct ScalarPolynomial {
    std::vector<long> coeffs;

    double operator()(double x) const {
        double p = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) p = p * x + static_cast<double>(coeffs[k]);
        return p;
    }
    [[nodiscard]] double derivative(double x) const {
        double p = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 1;) p = p * x + static_cast<double>(k) * static_cast<double>(coeffs[k]);
        return p;
    }
};

}  // namespace detail

/// Exact check: d(fg) - d(f) g - f d(g) is the zero polynomial.
inline IdentityCheck check_leibniz(Rng& rng, std::size_t pairs, std::size_t max_degree, long bound) {
    IdentityCheck c{"leibniz_exact", pairs, 0.0, 0.0, true};
    for (std::size_t i = 0; i < pairs; ++i) {
        const NCPoly f = random_polynomial_in_a(max_degree, bound, rng);
        const NCPoly g = random_polynomial_in_a(max_degree, bound, rng);
        if (!leibniz_defect(f, g).is_zero()) {
            c.passed = false;
            c.max_defect = 1.0;
        }
    }
    return c;
}

/// Exact check: the first-order Taylor coefficients of (A+sB) f(A+sB) and
/// f(A+sB) (A+sB) coincide.
inline IdentityCheck check_first_order_commutation(Rng& rng, std::size_t count, std::size_t max_degree,
                                                   long bound) {
    IdentityCheck c{"first_order_commutation_exact", count, 0.0, 0.0, true};
    const NCPoly a = NCPoly::symbol(Symbol::A);
    for (std::size_t i = 0; i < count; ++i) {
        const NCPoly f = random_polynomial_in_a(max_degree, bound, rng);
        if (!(nc_gateaux_term(a * f, 1) == nc_gateaux_term(f * a, 1))) {
            c.passed = false;
            c.max_defect = 1.0;
        }
    }
    return c;
}

/// Symbolic, divided-difference and finite-difference first derivatives of
/// A -> p(A) agree pairwise (relative operator-norm distance).
inline IdentityCheck check_first_order_agreement(Rng& rng, std::size_t count, Eigen::Index dim,
                                                 std::size_t max_degree, long bound, double tol = 1e-6) {
    IdentityCheck c{"first_derivative_agreement", count, 0.0, tol, true};
    for (std::size_t i = 0; i < count; ++i) {
        detail::ScalarPolynomial p{random_coefficients(max_degree, bound, rng)};
        if (std::all_of(p.coeffs.begin() + 1, p.coeffs.end(), [](long x) { return x == 0; })) p.coeffs[1] = 1;
        const ComplexMatrix a = random_hermitian(dim, rng);
        const ComplexMatrix b = random_hermitian(dim, rng);
        const SpectralDecomposition s = hermitian_eig(a);

        const ComplexMatrix symbolic = nc_evaluate(nc_gateaux_term(polynomial_in_a(p.coeffs), 1), a, b);
        const ComplexMatrix divided =
            divided_difference_derivative(s, p, [&](double x) { return p.derivative(x); }, b).value;
        const ComplexMatrix finite =
            gateaux_finite_difference(
                [&](const ComplexMatrix& x) { return functional_calculus(hermitian_eig(x), p); }, a, b)
                .value;
        const double defect = std::max({detail::relative_distance(symbolic, divided),
                                        detail::relative_distance(symbolic, finite),
                                        detail::relative_distance(divided, finite)});
        c.max_defect = std::max(c.max_defect, defect);
    }
    c.passed = c.max_defect <= tol;
    return c;
}

/// delta_A(delta_A^{-1} Y) = Y for Y off-diagonal in the eigenbasis of A.
inline IdentityCheck check_pinv_reconstruction(Rng& rng, std::size_t count, Eigen::Index dim, double tol = 1e-9) {
    IdentityCheck c{"inner_derivation_pinv_reconstruction", count, 0.0, tol, true};
    for (std::size_t i = 0; i < count; ++i) {
        const ComplexMatrix a = random_hermitian(dim, rng);
        const SpectralDecomposition s = hermitian_eig(a);
        ComplexMatrix yt = random_matrix(dim, rng);
        yt.diagonal().setZero();
        const ComplexMatrix y = s.eigenvectors * yt * s.eigenvectors.adjoint();
        const ComplexMatrix back = inner_derivation(a, inner_derivation_pinv(s, y));
        c.max_defect = std::max(c.max_defect, detail::relative_distance(back, y));
    }
    c.passed = c.max_defect <= tol;
    return c;
}

/// Log-log slopes of ||Taylor_N(s) - f(A+sB)|| over s in {1e-1, ..., 1e-4}
/// for f = A^5, computed in long double. max_defect is the largest distance
/// of a slope from N + 1.
inline IdentityCheck check_taylor_remainder(Rng& rng, Eigen::Index dim, std::vector<double>* slopes_out = nullptr) {
    using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    IdentityCheck c{"taylor_remainder_order", 3, 0.0, 0.2, true};
    const NCPoly f = NCPoly::power(Symbol::A, 5);
    const ComplexMatrix a_d = random_hermitian(dim, rng);
    const ComplexMatrix b_d = random_hermitian(dim, rng);
    const LMatrix a = (a_d / operator_norm(a_d)).cast<std::complex<long double>>();
    const LMatrix b = (b_d / operator_norm(b_d)).cast<std::complex<long double>>();
    const std::vector<long double> steps{1e-1L, 1e-2L, 1e-3L, 1e-4L};
    for (std::size_t order = 1; order <= 3; ++order) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (long double s : steps) {
            const LMatrix shifted = a + s * b;
            const LMatrix exact = shifted * shifted * shifted * shifted * shifted;
            const LMatrix partial = taylor_partial_sum(f, a, b, s, order);
            xs.push_back(std::log(static_cast<double>(s)));
            ys.push_back(std::log(static_cast<double>((partial - exact).norm())));
        }
        const double mx = (xs[0] + xs[1] + xs[2] + xs[3]) / 4.0;
        const double my = (ys[0] + ys[1] + ys[2] + ys[3]) / 4.0;
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            sxy += (xs[k] - mx) * (ys[k] - my);
        }
        const double slope = sxy / sxx;
        if (slopes_out) slopes_out->push_back(slope);
        c.max_defect = std::max(c.max_defect, std::abs(slope - static_cast<double>(order + 1)));
    }
    c.passed = c.max_defect <= c.tolerance;
    return c;
}

inline IdentitySuiteReport run_identity_suite(const IdentitySuiteOptions& opts = {}) {
    Rng rng(opts.seed);
    IdentitySuiteReport r;
    r.seed = opts.seed;
    r.checks.push_back(check_leibniz(rng, opts.leibniz_pairs, opts.max_degree, opts.coefficient_bound));
    r.checks.push_back(
        check_first_order_commutation(rng, opts.leibniz_pairs, opts.max_degree, opts.coefficient_bound));
    r.checks.push_back(check_first_order_agreement(rng, opts.derivative_instances, opts.dim, opts.max_degree,
                                                   opts.coefficient_bound));
    r.checks.push_back(check_pinv_reconstruction(rng, opts.derivative_instances, opts.dim));
    r.checks.push_back(check_taylor_remainder(rng, opts.dim));
    return r;
}

}  // namespace qlyap
