#pragma once

// Evolutions tau / tau_t: scalar-induced maps A -> f(A), linear Kraus maps,
// conjugation and similarity flows, horocyclic models, and the classical 1D
// reference maps they are built from.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlyap/errors.hpp"
#include "qlyap/linalg.hpp"
#include "qlyap/quantum_analysis.hpp"

namespace qlyap {

/// Spectra within this distance of a scalar map's domain are clamped onto it.
inline constexpr double kDomainTolerance = 1e-9;

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

    /// x clamped onto [lo, hi] when within tolerance, nullopt otherwise.
    [[nodiscard]] std::optional<double> admit(double x, double tol = kDomainTolerance) const {
        if (!std::isfinite(x)) return std::nullopt;
        if (x < lo) return x >= lo - tol * std::max(1.0, std::abs(lo)) ? std::optional(lo) : std::nullopt;
        if (x > hi) return x <= hi + tol * std::max(1.0, std::abs(hi)) ? std::optional(hi) : std::nullopt;
        return x;
    }
};

/// A differentiable real map with its derivative and domain.
class ScalarMap {
public:
    using Function = std::function<double(double)>;

    /// Validates `fprime` against central differences of `f` at 16 interior
    /// points; throws InvalidModel on mismatch.
    ScalarMap(std::string name, Function f, Function fprime, Interval domain, bool invariant_domain)
        : name_(std::move(name)),
          f_(std::move(f)),
          fprime_(std::move(fprime)),
          domain_(domain),
          invariant_domain_(invariant_domain) {
        validate_derivative();
    }

    static ScalarMap logistic(double r) {
        return {"logistic",
                [r](double x) { return r * x * (1.0 - x); },
                [r](double x) { return r * (1.0 - 2.0 * x); },
                {0.0, 1.0},
                r >= 0.0 && r <= 4.0};
    }

    static ScalarMap tent(double a) {
        return {"tent",
                [a](double x) { return x < 0.5 ? a * x : a * (1.0 - x); },
                [a](double x) { return x < 0.5 ? a : -a; },
                {0.0, 1.0},
                a >= 0.0 && a <= 2.0};
    }

    static ScalarMap doubling() {
        return {"doubling",
                [](double x) { return std::fmod(2.0 * x, 1.0); },
                [](double) { return 2.0; },
                {0.0, 1.0},
                true};
    }

    static ScalarMap affine(double c, double b = 0.0) {
        return {"affine", [c, b](double x) { return c * x + b; }, [c](double) { return c; }, {}, true};
    }

    /// Polynomial interpolant through (nodes[i], values[i]), degree <= 20,
    /// evaluated in Newton form.
    static ScalarMap interpolated(std::string name, const std::vector<double>& nodes,
                                  const std::vector<double>& values, Interval domain,
                                  bool invariant_domain = false) {
        if (nodes.size() != values.size() || nodes.empty()) {
            throw InvalidModel("interpolation needs matching, non-empty node and value lists");
        }
        if (nodes.size() > 21) throw InvalidModel("interpolation degree exceeds 20");
        std::vector<double> coeff = values;
        const std::size_t n = nodes.size();
        for (std::size_t level = 1; level < n; ++level) {
            for (std::size_t i = n - 1; i >= level; --i) {
                const double h = nodes[i] - nodes[i - level];
                if (h == 0.0) throw InvalidModel("repeated interpolation node");
                coeff[i] = (coeff[i] - coeff[i - 1]) / h;
            }
        }
        auto eval = [nodes, coeff](double x, bool derivative) {
            double p = coeff.back();
            double dp = 0.0;
            for (std::size_t k = coeff.size() - 1; k-- > 0;) {
                dp = dp * (x - nodes[k]) + p;
                p = p * (x - nodes[k]) + coeff[k];
            }
            return derivative ? dp : p;
        };
        return {std::move(name), [eval](double x) { return eval(x, false); },
                [eval](double x) { return eval(x, true); }, domain, invariant_domain};
    }

    double operator()(double x) const { return f_(x); }
    [[nodiscard]] double derivative(double x) const { return fprime_(x); }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const Interval& domain() const noexcept { return domain_; }
    [[nodiscard]] bool invariant_domain() const noexcept { return invariant_domain_; }

private:
    void validate_derivative() const {
        const double lo = domain_.bounded() ? domain_.lo : -1.0;
        const double hi = domain_.bounded() ? domain_.hi : 1.0;
        const double width = hi - lo;
        const double h = 1e-5 * std::max(1.0, width);
        for (int k = 0; k < 16; ++k) {
            const double x = lo + (k + 0.5) * width / 16.0;
            const double fd = (f_(x + h) - f_(x - h)) / (2.0 * h);
            const double exact = fprime_(x);
            if (!(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)))) {
                throw InvalidModel("derivative of '" + name_ + "' disagrees with central difference at x = " +
                                   std::to_string(x));
            }
        }
    }

    std::string name_;
    Function f_;
    Function fprime_;
    Interval domain_;
    bool invariant_domain_;
};

namespace detail {

/// exp(z M) for a fixed generator M, choosing the Hermitian, normal or
/// general (Pade) route once at construction.
class GeneratorExponential {
public:
    GeneratorExponential() = default;
    explicit GeneratorExponential(ComplexMatrix generator) : generator_(std::move(generator)) {
        require_square(generator_, "flow generator");
        const double scale = std::max(1.0, operator_norm(generator_));
        if (is_hermitian(generator_)) {
            const SpectralDecomposition s = hermitian_eig(generator_);
            unitary_ = s.eigenvectors;
            eigenvalues_ = s.eigenvalues.cast<Complex>();
            normal_ = true;
        } else if (operator_norm(generator_ * generator_.adjoint() - generator_.adjoint() * generator_) <=
                   1e-12 * scale * scale) {
            Eigen::ComplexSchur<ComplexMatrix> schur(generator_);
            unitary_ = schur.matrixU();
            eigenvalues_ = schur.matrixT().diagonal();
            normal_ = true;
        }
    }

    [[nodiscard]] ComplexMatrix exp(Complex z) const {
        if (z == Complex(0.0)) return identity(generator_.rows());
        if (normal_) {
            Eigen::VectorXcd values = (z * eigenvalues_).array().exp();
            return unitary_ * values.asDiagonal() * unitary_.adjoint();
        }
        return exp_general(z * generator_);
    }

    [[nodiscard]] const ComplexMatrix& generator() const noexcept { return generator_; }

private:
    ComplexMatrix generator_;
    ComplexMatrix unitary_;
    Eigen::VectorXcd eigenvalues_;
    bool normal_ = false;
};

}  // namespace detail

struct ScalarInduced {
    ScalarMap map;
};

struct KrausMap {
    std::vector<ComplexMatrix> ops;
};

/// tau_t(A) = U_t^{-1} A U_t with U_t = exp(-itH); U_t^{-1} = U_t^* when unitary.
struct ConjugationFlow {
    detail::GeneratorExponential exponential;
    bool unitary = true;
};

/// tau_t(X) = exp(tK) X exp(-tK).
struct SimilarityFlow {
    detail::GeneratorExponential exponential;
};

class DynamicalMap {
public:
    using Kind = std::variant<ScalarInduced, KrausMap, ConjugationFlow, SimilarityFlow>;

    static DynamicalMap scalar(ScalarMap map) { return DynamicalMap(ScalarInduced{std::move(map)}); }

    static DynamicalMap kraus(std::vector<ComplexMatrix> ops) {
        if (ops.empty()) throw InvalidModel("Kraus map needs at least one operator");
        for (const auto& v : ops) {
            require_square(v, "Kraus operator");
            require_same_dim(v, ops.front());
        }
        return DynamicalMap(KrausMap{std::move(ops)});
    }

    static DynamicalMap conjugation_flow(ComplexMatrix h, bool unitary = true) {
        if (unitary && !is_hermitian(h)) throw InvalidModel("unitary conjugation flow needs a Hermitian generator");
        return DynamicalMap(ConjugationFlow{detail::GeneratorExponential(std::move(h)), unitary});
    }

    static DynamicalMap similarity_flow(ComplexMatrix k) {
        return DynamicalMap(SimilarityFlow{detail::GeneratorExponential(std::move(k))});
    }

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

    [[nodiscard]] bool is_flow() const {
        return std::holds_alternative<ConjugationFlow>(kind_) || std::holds_alternative<SimilarityFlow>(kind_);
    }

    [[nodiscard]] bool is_linear() const { return !std::holds_alternative<ScalarInduced>(kind_); }

    /// tau(A), or tau_t(A) for flows.
    [[nodiscard]] ComplexMatrix apply(const ComplexMatrix& a, std::optional<double> t = std::nullopt) const {
        require_square(a, "map argument");
        return std::visit(
            [&](const auto& k) -> ComplexMatrix {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ScalarInduced>) {
                    const SpectralDecomposition s = admitted_spectrum(k.map, a);
                    return functional_calculus(s, [&](double x) { return k.map(x); });
                } else if constexpr (std::is_same_v<K, KrausMap>) {
                    return apply_kraus(k, a);
                } else {
                    return conjugate(k, a, require_time(t));
                }
            },
            kind_);
    }

    /// The derivative of the map at A applied to T.
    [[nodiscard]] ComplexMatrix tangent(const ComplexMatrix& a, const ComplexMatrix& t_vec,
                                        std::optional<double> t = std::nullopt) const {
        require_square(a, "map argument");
        require_same_dim(a, t_vec);
        return std::visit(
            [&](const auto& k) -> ComplexMatrix {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ScalarInduced>) {
                    const SpectralDecomposition s = admitted_spectrum(k.map, a);
                    return divided_difference_derivative(
                               s, [&](double x) { return k.map(x); },
                               [&](double x) { return k.map.derivative(x); }, t_vec)
                        .value;
                } else if constexpr (std::is_same_v<K, KrausMap>) {
                    return apply_kraus(k, t_vec);
                } else {
                    return conjugate(k, t_vec, require_time(t));
                }
            },
            kind_);
    }

private:
    explicit DynamicalMap(Kind kind) : kind_(std::move(kind)) {}

    static double require_time(std::optional<double> t) {
        if (!t) throw MissingTime("flow evaluation needs a time argument");
        return *t;
    }

    static SpectralDecomposition admitted_spectrum(const ScalarMap& map, const ComplexMatrix& a) {
        SpectralDecomposition s = hermitian_eig(a);
        for (Eigen::Index i = 0; i < s.dim(); ++i) {
            const auto x = map.domain().admit(s.eigenvalues(i));
            if (!x) {
                throw SpectrumOutOfDomain("eigenvalue " + std::to_string(s.eigenvalues(i)) + " outside the domain of '" +
                                          map.name() + "'");
            }
            s.eigenvalues(i) = *x;
        }
        return s;
    }

    static ComplexMatrix apply_kraus(const KrausMap& k, const ComplexMatrix& x) {
        require_same_dim(k.ops.front(), x);
        ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
        for (const auto& v : k.ops) out += v * x * v.adjoint();
        return out;
    }

    static ComplexMatrix conjugate(const ConjugationFlow& k, const ComplexMatrix& x, double t) {
        require_same_dim(k.exponential.generator(), x);
        if (t == 0.0) return x;
        const Complex i_t(0.0, t);
        return k.exponential.exp(i_t) * x * k.exponential.exp(-i_t);
    }

    static ComplexMatrix conjugate(const SimilarityFlow& k, const ComplexMatrix& x, double t) {
        require_same_dim(k.exponential.generator(), x);
        if (t == 0.0) return x;
        return k.exponential.exp(t) * x * k.exponential.exp(-t);
    }

    Kind kind_;
};

/// [A, tau A, ..., tau^n A]; flows advance by `t` per step.
inline std::vector<ComplexMatrix> orbit(const DynamicalMap& m, const ComplexMatrix& a, std::size_t n,
                                        std::optional<double> t = std::nullopt) {
    std::vector<ComplexMatrix> out;
    out.reserve(n + 1);
    out.push_back(a);
    for (std::size_t k = 1; k <= n; ++k) {
        try {
            out.push_back(m.apply(out.back(), t));
        } catch (const SpectrumOutOfDomain& e) {
            throw SpectrumOutOfDomain(e.what(), k);
        }
    }
    return out;
}

inline std::vector<double> classical_orbit(const ScalarMap& f, double x0, std::size_t n) {
    const auto start = f.domain().admit(x0);
    if (!start) throw DomainEscape("seed " + std::to_string(x0) + " outside the domain of '" + f.name() + "'", 0);
    std::vector<double> out;
    out.reserve(n + 1);
    out.push_back(*start);
    for (std::size_t k = 1; k <= n; ++k) {
        const double y = f(out.back());
        const auto x = f.domain().admit(y);
        if (!x) throw DomainEscape("iterate " + std::to_string(y) + " left the domain", k);
        out.push_back(*x);
    }
    return out;
}

/// Flow tau_t(X) = exp(tK) X exp(-tK) together with the action
/// sigma_s(X) = exp(sG) X exp(-sG) it contracts: [K, G] = -rate G.
class HorocyclicModel {
public:
    static constexpr double kCommutatorTolerance = 1e-10;

    HorocyclicModel(ComplexMatrix k, ComplexMatrix g, double rate)
        : k_(std::move(k)), g_(std::move(g)), rate_(rate) {
        require_square(k_, "K");
        require_same_dim(k_, g_);
        if (operator_norm(g_) == 0.0) throw InvalidModel("action generator G vanishes");
        const double defect = operator_norm(inner_derivation(k_, g_) + rate_ * g_);
        if (defect > kCommutatorTolerance) {
            throw InvalidModel("||[K,G] + rate G|| = " + std::to_string(defect));
        }
        flow_exp_ = detail::GeneratorExponential(k_);
        action_exp_ = detail::GeneratorExponential(g_);
    }

    [[nodiscard]] const ComplexMatrix& flow_generator() const noexcept { return k_; }
    [[nodiscard]] const ComplexMatrix& action_generator() const noexcept { return g_; }
    [[nodiscard]] double rate() const noexcept { return rate_; }

    [[nodiscard]] DynamicalMap flow() const { return DynamicalMap::similarity_flow(k_); }

    [[nodiscard]] ComplexMatrix evolve(const ComplexMatrix& a, double t) const {
        if (t == 0.0) return a;
        return flow_exp_.exp(t) * a * flow_exp_.exp(-t);
    }

    [[nodiscard]] ComplexMatrix act(const ComplexMatrix& a, double s) const {
        if (s == 0.0) return a;
        return action_exp_.exp(s) * a * action_exp_.exp(-s);
    }

    /// delta_j(X) = [G, X].
    [[nodiscard]] ComplexMatrix derivation(const ComplexMatrix& x) const { return inner_derivation(g_, x); }

private:
    ComplexMatrix k_;
    ComplexMatrix g_;
    double rate_;
    detail::GeneratorExponential flow_exp_;
    detail::GeneratorExponential action_exp_;
};

/// ||tau_t sigma_s tau_{-t}(A) - sigma_{s exp(-rate t)}(A)||.
inline double horocyclic_intertwining_defect(const HorocyclicModel& h, const ComplexMatrix& a, double t,
                                             double s) {
    require_same_dim(h.flow_generator(), a);
    if (s == 0.0 || t == 0.0) return 0.0;
    const ComplexMatrix lhs = h.evolve(h.act(h.evolve(a, -t), s), t);
    const ComplexMatrix rhs = h.act(a, s * std::exp(-h.rate() * t));
    return operator_norm(lhs - rhs);
}

}  // namespace qlyap
