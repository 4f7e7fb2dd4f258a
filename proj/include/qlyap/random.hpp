#pragma once

// Seeded generators for test matrices and polynomials. Only the engine's raw
// 64-bit output is used, so streams are identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qlyap/linalg.hpp"
#include "qlyap/ncpoly.hpp"

namespace qlyap {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    long integer(long lo, long hi) {
        return lo + static_cast<long>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Standard normal (Box-Muller).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complex_normal() { return {normal(), normal()}; }

private:
    std::mt19937_64 engine_;
};

inline ComplexMatrix random_matrix(Eigen::Index dim, Rng& rng) {
    ComplexMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rng.complex_normal();
    }
    return m;
}

/// GUE-like sample scaled to unit-order spectrum.
inline ComplexMatrix random_hermitian(Eigen::Index dim, Rng& rng) {
    const ComplexMatrix g = random_matrix(dim, rng);
    return (g + g.adjoint()) / (2.0 * std::sqrt(static_cast<double>(dim)));
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of R's diagonal removed.
inline ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng) {
    const ComplexMatrix g = random_matrix(dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

/// U diag(spectrum) U^* with a random unitary U.
inline ComplexMatrix random_hermitian_with_spectrum(const std::vector<double>& spectrum, Rng& rng) {
    const auto dim = static_cast<Eigen::Index>(spectrum.size());
    const ComplexMatrix u = random_unitary(dim, rng);
    const RealVector values = Eigen::Map<const RealVector>(spectrum.data(), dim);
    return u * values.cast<Complex>().asDiagonal() * u.adjoint();
}

/// sum_k c_k A^k with integer c_k in [-bound, bound], degree <= max_degree.
inline std::vector<long> random_coefficients(std::size_t max_degree, long bound, Rng& rng) {
    std::vector<long> c(max_degree + 1);
    for (auto& x : c) x = rng.integer(-bound, bound);
    return c;
}

inline NCPoly polynomial_in_a(const std::vector<long>& coeffs) {
    NCPoly p;
    for (std::size_t k = 0; k < coeffs.size(); ++k) p += NCPoly::power(Symbol::A, k, coeffs[k]);
    return p;
}

/// Random polynomial in the single symbol A (not necessarily of full degree).
inline NCPoly random_polynomial_in_a(std::size_t max_degree, long bound, Rng& rng) {
    return polynomial_in_a(random_coefficients(max_degree, bound, rng));
}

}  // namespace qlyap
