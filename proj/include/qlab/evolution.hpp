#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "qlab/error.hpp"
#include "qlab/geometry.hpp"
#include "qlab/linalg.hpp"

namespace qlab {

inline constexpr std::size_t kCesaroWindow = 100;
inline constexpr double kCesaroTol = 1e-6;
inline constexpr double kDivergenceGuard = 1e12;

/// Pairwise interaction pattern: a real n x n coefficient matrix.
class InteractionSystem {
public:
    explicit InteractionSystem(Matrix j) : j_(std::move(j)) {
        require_square(j_, "InteractionSystem");
        for (std::size_t i = 0; i < j_.rows(); ++i)
            for (std::size_t k = 0; k < j_.cols(); ++k)
                if (j_(i, k).imag() != 0.0)
                    throw PreconditionError("InteractionSystem: coefficients must be real");
    }

    const Matrix& coefficients() const { return j_; }
    std::size_t dim() const { return j_.rows(); }

    /// J0 = (J + J^T)/2
    Matrix symmetric_part() const {
        Matrix s(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t k = 0; k < dim(); ++k)
                s(i, k) = 0.5 * (j_(i, k).real() + j_(k, i).real());
        return s;
    }

    /// J1 = (J - J^T)/2
    Matrix skew_part() const {
        Matrix s(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t k = 0; k < dim(); ++k)
                s(i, k) = 0.5 * (j_(i, k).real() - j_(k, i).real());
        return s;
    }

private:
    Matrix j_;
};

/// J0 + i J1: the hermitian image of a real interaction matrix. The map is a
/// linear bijection between real and hermitian n x n matrices.
inline Matrix hermitian_lift(const InteractionSystem& sys) {
    const std::size_t n = sys.dim();
    const Matrix& j = sys.coefficients();
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double a = j(i, k).real(), b = j(k, i).real();
            h(i, k) = cplx(0.5 * (a + b), 0.5 * (a - b));
        }
    return h;
}

/// x* A x: total interaction value at intensity levels x. The imaginary part
/// vanishes for hermitian A and is asserted below 1e-12 before discarding.
inline double interaction_value(const Matrix& a, const std::vector<cplx>& x,
                                double tol = kSpectralTol) {
    if (!is_hermitian(a, tol))
        throw PreconditionError("interaction_value: matrix is not hermitian");
    if (a.cols() != x.size())
        throw DimensionError("interaction_value: vector length differs from dimension");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            acc += std::conj(x[i]) * a(i, j) * x[j];
    if (std::abs(acc.imag()) > 1e-12)
        throw NumericalError("interaction_value: imaginary residue exceeds 1e-12");
    return acc.real();
}

struct ConvergenceVerdict {
    bool converged = false;
    double limit_estimate = 0.0;
};

/// Windowed oscillation detector on the Cesàro averages of a value sequence:
/// converged iff the last `window` averages pairwise differ by at most `tol`.
inline ConvergenceVerdict cesaro_converged(const std::vector<double>& values, std::size_t window,
                                           double tol) {
    if (window == 0 || values.size() < 2 * window)
        throw PreconditionError("cesaro_converged: sequence shorter than twice the window");
    std::vector<double> cesaro(values.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
        sum += values[t];
        cesaro[t] = sum / static_cast<double>(t + 1);
    }
    double lo = cesaro.back(), hi = cesaro.back();
    for (std::size_t t = values.size() - window; t < values.size(); ++t) {
        lo = std::min(lo, cesaro[t]);
        hi = std::max(hi, cesaro[t]);
    }
    return {hi - lo <= tol, cesaro.back()};
}

/// phi_0..phi_T with running Cesàro averages and the convergence verdict.
struct EvolutionTrace {
    std::vector<double> values;
    std::vector<double> cesaro;
    bool converged = false;
    bool diverged = false;
    double limit_estimate = 0.0;
};

/// Schrödinger-picture iteration x_{t+1} = T x_t with phi_t = x_t* A x_t for
/// t = 0..steps. Aborts with the divergence flag once the Hilbert norm of the
/// iterate exceeds the guard. Convergence of the Cesàro averages is detected
/// with the windowed oscillation rule when the trace is long enough.
inline EvolutionTrace evolve(const Matrix& a, const Isometry& t, const StateVector& x,
                             std::size_t steps, std::size_t window = kCesaroWindow,
                             double tol = kCesaroTol) {
    if (!is_hermitian(a, kSpectralTol))
        throw PreconditionError("evolve: interaction matrix is not hermitian");
    if (a.rows() != x.dim() || t.space().dim() != x.dim())
        throw DimensionError("evolve: dimensions do not agree");

    EvolutionTrace trace;
    trace.values.reserve(steps + 1);
    trace.cesaro.reserve(steps + 1);

    std::vector<cplx> current = x.coords;
    double sum = 0.0;
    for (std::size_t u = 0; u <= steps; ++u) {
        double norm2 = 0.0;
        for (const auto& c : current) norm2 += std::norm(c);
        if (std::sqrt(norm2) > kDivergenceGuard) {
            trace.diverged = true;
            break;
        }
        const double phi = interaction_value(a, current, kSpectralTol);
        sum += phi;
        trace.values.push_back(phi);
        trace.cesaro.push_back(sum / static_cast<double>(u + 1));
        if (u < steps) current = t.matrix() * current;
    }

    if (!trace.cesaro.empty()) trace.limit_estimate = trace.cesaro.back();
    if (!trace.diverged && window > 0 && trace.values.size() >= 2 * window) {
        const ConvergenceVerdict v = cesaro_converged(trace.values, window, tol);
        trace.converged = v.converged;
        trace.limit_estimate = v.limit_estimate;
    }
    return trace;
}

/// Heisenberg-picture recomputation of the same sequence: A_{t+1} = T* A_t T
/// against the constant state. Used as an independent cross-check on evolve.
inline std::vector<double> heisenberg_values(const Matrix& a, const Isometry& t,
                                             const StateVector& x, std::size_t steps) {
    if (!is_hermitian(a, kSpectralTol))
        throw PreconditionError("heisenberg_values: interaction matrix is not hermitian");
    if (a.rows() != x.dim() || t.space().dim() != x.dim())
        throw DimensionError("heisenberg_values: dimensions do not agree");

    std::vector<double> values;
    values.reserve(steps + 1);
    Matrix at = a;
    const Matrix& tm = t.matrix();
    const Matrix tadj = tm.adjoint();
    for (std::size_t u = 0; u <= steps; ++u) {
        // at drifts off exact hermiticity by rounding; symmetrize for the check
        Matrix sym(at.rows(), at.cols());
        for (std::size_t i = 0; i < at.rows(); ++i)
            for (std::size_t j = 0; j < at.cols(); ++j)
                sym(i, j) = 0.5 * (at(i, j) + std::conj(at(j, i)));
        values.push_back(interaction_value(sym, x.coords, 1e-8));
        if (u < steps) at = tadj * at * tm;
    }
    return values;
}

}  // namespace qlab
