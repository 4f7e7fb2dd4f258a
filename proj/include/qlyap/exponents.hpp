#pragma once

// Exponent estimators. Limits t -> infinity are replaced by finite-sample
// fits over a tail window; every estimate carries its samples and a
// convergence diagnostic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "qlyap/dynamics.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/linalg.hpp"
#include "qlyap/quantum_analysis.hpp"

namespace qlyap {

/// Norms below this are treated as exactly vanished.
inline constexpr double kVanishingNorm = 1e-300;

struct RateSample {
    double time = 0.0;
    double log_norm = 0.0;
};

enum class FitMode {
    lim,     ///< least-squares slope over the tail window
    limsup,  ///< maximum of log_norm / time over the tail window
};

struct ExponentEstimate {
    std::vector<RateSample> samples;
    double rate = 0.0;
    double standard_error = 0.0;
    double tail_fraction = 0.5;
    bool converged = false;
    std::optional<std::array<double, 2>> argmax_direction;
    /// Set when the tracked quantity vanished exactly (rate is -infinity).
    std::optional<std::size_t> degenerate_step;
};

struct EstimatorOptions {
    double tail_fraction = 0.5;
    FitMode mode = FitMode::lim;
    /// Raise instead of returning a flagged -infinity estimate.
    bool throw_on_degenerate = false;
    /// Time advanced per step when qle_discrete iterates a flow.
    double step_time = 1.0;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double standard_error = 0.0;
};

inline LineFit least_squares(std::span<const RateSample> s) {
    const auto m = static_cast<double>(s.size());
    double mt = 0.0;
    double my = 0.0;
    for (const auto& p : s) {
        mt += p.time;
        my += p.log_norm;
    }
    mt /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : s) {
        sxx += (p.time - mt) * (p.time - mt);
        sxy += (p.time - mt) * (p.log_norm - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    if (s.size() > 2) {
        double ssr = 0.0;
        for (const auto& p : s) {
            const double r = p.log_norm - my - fit.slope * (p.time - mt);
            ssr += r * r;
        }
        fit.standard_error = std::sqrt(ssr / (m - 2.0) / sxx);
    }
    return fit;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline ExponentEstimate degenerate_estimate(std::vector<RateSample> samples, double tail_fraction,
                                            std::size_t step) {
    ExponentEstimate e;
    e.samples = std::move(samples);
    e.rate = -std::numeric_limits<double>::infinity();
    e.standard_error = 0.0;
    e.tail_fraction = tail_fraction;
    e.converged = false;
    e.degenerate_step = step;
    return e;
}

}  // namespace detail

/// Fits a growth rate to (time, log_norm) samples over the last
/// ceil(tail_fraction * N) samples.
inline ExponentEstimate fit_rate(std::vector<RateSample> samples, double tail_fraction,
                                 FitMode mode = FitMode::lim) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw DomainError("tail_fraction must lie in (0, 1]");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].time > samples[i - 1].time)) {
            throw DomainError("sample times must be strictly increasing");
        }
    }
    const auto tail_len = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(samples.size())));
    if (tail_len < 4) {
        throw InsufficientSamples(std::to_string(tail_len) + " samples in the tail window, need 4");
    }
    const std::span<const RateSample> tail(samples.data() + (samples.size() - tail_len), tail_len);
    for (const auto& p : tail) {
        if (!std::isfinite(p.log_norm)) throw DomainError("non-finite log_norm in the tail window");
    }

    const detail::LineFit full = detail::least_squares(tail);
    const std::size_t half = tail_len / 2;
    const detail::LineFit first = detail::least_squares(tail.first(half));
    const detail::LineFit second = detail::least_squares(tail.subspan(half));

    ExponentEstimate e;
    e.tail_fraction = tail_fraction;
    e.standard_error = full.standard_error;
    e.converged = std::abs(first.slope - second.slope) < 10.0 * full.standard_error + 1e-9;
    if (mode == FitMode::lim) {
        e.rate = full.slope;
    } else {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : tail) {
            if (p.time > 0.0) best = std::max(best, p.log_norm / p.time);
        }
        if (!std::isfinite(best)) throw InsufficientSamples("limsup mode needs positive sample times");
        e.rate = best;
    }
    e.samples = std::move(samples);
    return e;
}

/// Chain-rule exponent along a given orbit: samples (k, sum_{j<k} log|f'(x_j)|)
/// for k = 1..orbit.size().
inline ExponentEstimate classical_lyapunov_along(const ScalarMap& f, std::span<const double> orbit,
                                                 const EstimatorOptions& opts = {}) {
    std::vector<RateSample> samples;
    samples.reserve(orbit.size());
    detail::CompensatedSum sum;
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        const double d = std::abs(f.derivative(orbit[k]));
        if (d == 0.0) {
            if (opts.throw_on_degenerate) throw ZeroDerivativeOnOrbit(k);
            return detail::degenerate_estimate(std::move(samples), opts.tail_fraction, k);
        }
        sum.add(std::log(d));
        samples.push_back({static_cast<double>(k + 1), sum.value()});
    }
    return fit_rate(std::move(samples), opts.tail_fraction, opts.mode);
}

inline ExponentEstimate classical_lyapunov(const ScalarMap& f, double x0, std::size_t n,
                                           const EstimatorOptions& opts = {}) {
    const std::vector<double> xs = classical_orbit(f, x0, n);
    return classical_lyapunov_along(f, std::span<const double>(xs.data(), n), opts);
}

/// Top exponent of the tangent dynamics: T_0 = B, T_{k+1} = D tau|_{A_k}[T_k],
/// renormalized every step. Sample k holds log ||D_B tau^k(A)||.
inline ExponentEstimate qle_discrete(const DynamicalMap& m, const ComplexMatrix& a, const ComplexMatrix& b,
                                     std::size_t n_max, const EstimatorOptions& opts = {}) {
    require_same_dim(a, b);
    const std::optional<double> dt = m.is_flow() ? std::optional(opts.step_time) : std::nullopt;
    const double time_unit = m.is_flow() ? opts.step_time : 1.0;

    const double b_norm = operator_norm(b);
    if (b_norm < kVanishingNorm) throw TangentVanished("direction B vanishes");
    ComplexMatrix tangent = b / b_norm;
    ComplexMatrix point = a;
    detail::CompensatedSum log_norm;
    log_norm.add(std::log(b_norm));

    std::vector<RateSample> samples;
    samples.reserve(n_max);
    for (std::size_t k = 1; k <= n_max; ++k) {
        ComplexMatrix next_tangent;
        ComplexMatrix next_point;
        try {
            next_tangent = m.tangent(point, tangent, dt);
            next_point = m.apply(point, dt);
        } catch (const SpectrumOutOfDomain& e) {
            throw SpectrumOutOfDomain(e.what(), k - 1);
        }
        const double g = operator_norm(next_tangent);
        if (g < kVanishingNorm) {
            if (opts.throw_on_degenerate) {
                throw TangentVanished("tangent vanished at step " + std::to_string(k));
            }
            return detail::degenerate_estimate(std::move(samples), opts.tail_fraction, k);
        }
        log_norm.add(std::log(g));
        tangent = next_tangent / g;
        point = std::move(next_point);
        samples.push_back({static_cast<double>(k) * time_unit, log_norm.value()});
    }
    return fit_rate(std::move(samples), opts.tail_fraction, opts.mode);
}

namespace detail {

inline void require_increasing(std::span<const double> grid) {
    if (grid.empty()) throw DomainError("time grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    }
}

/// Samples log ||[L, tau_t A]|| on the grid, skipping vanished norms. Returns
/// nothing when every commutator is at roundoff level relative to ||L|| ||tau_t A||,
/// i.e. the derivation annihilates the orbit.
template <class Evolve>
std::vector<RateSample> derivation_samples(std::span<const double> t_grid, Evolve&& evolve,
                                           const ComplexMatrix& l) {
    const double l_norm = operator_norm(l);
    const double roundoff = 16.0 * static_cast<double>(l.rows()) * std::numeric_limits<double>::epsilon();
    std::vector<RateSample> samples;
    samples.reserve(t_grid.size());
    bool above_roundoff = false;
    for (double t : t_grid) {
        const ComplexMatrix& x = evolve(t);
        const double norm = operator_norm(inner_derivation(l, x));
        if (norm >= kVanishingNorm) samples.push_back({t, std::log(norm)});
        if (norm > roundoff * l_norm * operator_norm(x)) above_roundoff = true;
    }
    if (!above_roundoff) samples.clear();
    return samples;
}

}  // namespace detail

/// Growth rate of ||[G, tau_t(A)]|| for a horocyclic model.
inline ExponentEstimate qle_horocyclic(const HorocyclicModel& h, const ComplexMatrix& a,
                                       std::span<const double> t_grid, const EstimatorOptions& opts = {}) {
    detail::require_increasing(t_grid);
    const double defect = horocyclic_intertwining_defect(h, a, t_grid.back(), 1.0);
    if (defect > 1e-8 * (1.0 + operator_norm(a))) {
        throw InvalidModel("intertwining defect " + std::to_string(defect) + " at t = " +
                           std::to_string(t_grid.back()));
    }
    std::vector<ComplexMatrix> evolved;
    evolved.reserve(t_grid.size());
    for (double t : t_grid) evolved.push_back(h.evolve(a, t));
    std::size_t idx = 0;
    auto samples = detail::derivation_samples(
        t_grid, [&](double) -> const ComplexMatrix& { return evolved[idx++]; }, h.action_generator());
    if (samples.empty()) {
        if (opts.throw_on_degenerate) throw DerivationVanishes("[G, tau_t(A)] vanishes on the whole grid");
        return detail::degenerate_estimate({}, opts.tail_fraction, 0);
    }
    return fit_rate(std::move(samples), opts.tail_fraction, opts.mode);
}

/// Upper exponent over derivation directions L_a = a1 L1 + a2 L2, a on a
/// uniform grid of the unit circle. Directions are ranked by the limsup-mode
/// value (max over the tail of log_norm / t), ties going to the smallest
/// angle; the reported rate is the `opts.mode` fit of the selected direction.
inline ExponentEstimate qle_upper(const DynamicalMap& m, const ComplexMatrix& a, const ComplexMatrix& l1,
                                  const ComplexMatrix& l2, std::size_t n_angles, std::span<const double> t_grid,
                                  const EstimatorOptions& opts = {}) {
    if (!m.is_flow()) throw InvalidModel("qle_upper needs a flow");
    if (n_angles < 4) throw DomainError("n_angles must be at least 4");
    require_same_dim(a, l1);
    require_same_dim(a, l2);
    detail::require_increasing(t_grid);

    std::vector<ComplexMatrix> evolved;
    evolved.reserve(t_grid.size());
    for (double t : t_grid) evolved.push_back(m.apply(a, t));

    std::optional<ExponentEstimate> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_angles; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_angles);
        const std::array<double, 2> alpha{std::cos(theta), std::sin(theta)};
        const ComplexMatrix l = alpha[0] * l1 + alpha[1] * l2;
        std::size_t idx = 0;
        auto samples = detail::derivation_samples(
            t_grid, [&](double) -> const ComplexMatrix& { return evolved[idx++]; }, l);
        const auto tail_len =
            static_cast<std::size_t>(std::ceil(opts.tail_fraction * static_cast<double>(samples.size())));
        if (samples.empty() || tail_len < 4) continue;
        const double score = fit_rate(samples, opts.tail_fraction, FitMode::limsup).rate;
        if (!best || score > best_score + 1e-12 * (1.0 + std::abs(best_score))) {
            best = fit_rate(std::move(samples), opts.tail_fraction, opts.mode);
            best->argmax_direction = alpha;
            best_score = score;
        }
    }
    if (!best) {
        if (opts.throw_on_degenerate) throw DerivationVanishes("[L_a, tau_t(A)] vanishes for every direction");
        return detail::degenerate_estimate({}, opts.tail_fraction, 0);
    }
    return *best;
}

struct SupFormulaReport {
    std::size_t n = 0;
    /// (1/n) log ||D_1 tau^n(A)|| by matrix tangent propagation.
    double lhs = 0.0;
    /// max_i (1/n) log |D f^n(lambda_i)| by the scalar chain rule.
    double rhs = 0.0;
    double defect = 0.0;
    /// max over k <= n of the relative mismatch between ||D_1 tau^k(A)|| and
    /// max_i |D f^k(lambda_i)|.
    double max_identity_defect = 0.0;
};

/// Checks ||D_1 tau^n(A)|| = max_i |D f^n(lambda_i)| for tau(A) = f(A). The
/// scalar side follows the eigenvalue trajectories of the computed matrix
/// orbit (read off in the eigenbasis of A, which every f^k(A) shares), so both
/// sides see the same floating-point orbit.
inline SupFormulaReport verify_sup_formula(const ScalarMap& f, const ComplexMatrix& a, std::size_t n) {
    if (n == 0) throw DomainError("n must be positive");
    const DynamicalMap m = DynamicalMap::scalar(f);
    const Eigen::Index d = a.rows();
    EstimatorOptions opts;
    opts.throw_on_degenerate = true;
    // fit_rate needs 4 tail samples; the report only uses the raw samples.
    opts.tail_fraction = 1.0;

    std::vector<RateSample> lhs_samples;
    if (n >= 4) {
        lhs_samples = qle_discrete(m, a, identity(d), n, opts).samples;
    } else {
        ComplexMatrix t = identity(d);
        ComplexMatrix x = a;
        for (std::size_t k = 1; k <= n; ++k) {
            t = m.tangent(x, t);
            x = m.apply(x);
            lhs_samples.push_back({static_cast<double>(k), std::log(operator_norm(t))});
        }
    }

    const std::vector<ComplexMatrix> points = orbit(m, a, n - 1);
    const ComplexMatrix u = hermitian_eig(a).eigenvectors;
    std::vector<std::vector<double>> trajectories(static_cast<std::size_t>(d), std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexMatrix diag = u.adjoint() * points[k] * u;
        for (Eigen::Index i = 0; i < d; ++i) trajectories[static_cast<std::size_t>(i)][k] = diag(i, i).real();
    }
    std::vector<double> rhs_log(n, -std::numeric_limits<double>::infinity());
    for (const auto& traj : trajectories) {
        detail::CompensatedSum sum;
        for (std::size_t k = 0; k < n; ++k) {
            sum.add(std::log(std::abs(f.derivative(traj[k]))));
            rhs_log[k] = std::max(rhs_log[k], sum.value());
        }
    }

    SupFormulaReport r;
    r.n = n;
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = lhs_samples[k].log_norm - rhs_log[k];
        r.max_identity_defect = std::max(r.max_identity_defect, std::abs(std::expm1(diff)));
    }
    r.lhs = lhs_samples.back().log_norm / static_cast<double>(n);
    r.rhs = rhs_log.back() / static_cast<double>(n);
    r.defect = std::abs(r.lhs - r.rhs);
    return r;
}

}  // namespace qlyap
