#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qlab/error.hpp"
#include "qlab/geometry.hpp"
#include "qlab/measurement.hpp"
#include "qlab/simplex.hpp"

namespace qlab {

inline constexpr double kBellTol = 1e-9;

/// |W|_inf: the largest eigenvalue magnitude of the instrument.
inline double bell_number(const EigenvalueMatrix& w) {
    if (w.rows() == 0 || w.cols() == 0)
        throw DimensionError("bell_number: empty eigenvalue matrix");
    double m = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) m = std::max(m, std::abs(w(i, j)));
    return m;
}

/// sum_v v_a v_b q(v) over a density on outcome triples.
inline double pair_expectation(const SignedDensity& d, std::size_t a, std::size_t b) {
    if (d.arity() != 3)
        throw DimensionError("pair_expectation: density is not over outcome triples");
    if (a >= 3 || b >= 3) throw DimensionError("pair_expectation: column index out of range");
    if (a == b) throw PreconditionError("pair_expectation: columns must differ");
    double e = 0.0;
    for (std::size_t v = 0; v < d.size(); ++v) e += d.support[v][a] * d.support[v][b] * d.weights[v];
    return e;
}

/// Everything the Bell inequality |E(XY)-E(YZ)| + E(XZ) <= |W|_inf^2 needs,
/// together with the nonnegativity facts that decide whether the bound is
/// guaranteed to hold.
struct BellReport {
    double exy = 0.0;
    double eyz = 0.0;
    double exz = 0.0;
    double lhs = 0.0;
    double bound = 0.0;
    bool triple_density_nonneg = false;
    std::array<bool, 3> pairwise_nonneg{};  // XY, YZ, XZ
    bool satisfied = false;
};

namespace detail {

inline BellReport report_from_density(const SignedDensity& d, double bound_value, double tol) {
    BellReport r;
    r.exy = pair_expectation(d, 0, 1);
    r.eyz = pair_expectation(d, 1, 2);
    r.exz = pair_expectation(d, 0, 2);
    r.lhs = std::abs(r.exy - r.eyz) + r.exz;
    r.bound = bound_value;
    r.triple_density_nonneg = d.min_weight() >= -tol;
    r.satisfied = r.lhs <= r.bound + tol;
    return r;
}

inline SignedDensity pair_density(const StateVector& x, const EigenvalueMatrix& w,
                                  std::size_t a, std::size_t b) {
    return density(x, w.select_columns({a, b}));
}

}  // namespace detail

/// Bell inequality check for a three-observable instrument H(W, T) in the
/// state x. The density (and hence every expectation) is evaluated at Tx.
inline BellReport bell_check(const EigenvalueMatrix& w, const StateVector& x, const Isometry& t,
                             double tol = kBellTol, double state_tol = kStateTol) {
    if (w.cols() != 3) throw DimensionError("bell_check: eigenvalue matrix must have 3 columns");
    if (!is_state(x, state_tol))
        throw PreconditionError("bell_check: x is not a relativistic quantum state");

    const StateVector y = t.apply(x);
    BellReport r = detail::report_from_density(density(y, w),
                                               bell_number(w) * bell_number(w), tol);
    const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {1, 2}, {0, 2}}};
    for (std::size_t k = 0; k < 3; ++k)
        r.pairwise_nonneg[k] =
            detail::pair_density(y, w, pairs[k].first, pairs[k].second).min_weight() >= -tol;
    return r;
}

/// The stochastic reinterpretation of the same measurement: W is rescaled to
/// W^x, the state to x/||x||_2 in the Hilbert space of equal dimension. The
/// resulting density is a bona fide probability distribution, so the report
/// always comes back satisfied (against the rescaled bound |W^x|_inf^2).
inline BellReport hilbert_rescaled_check(const EigenvalueMatrix& w, const StateVector& x,
                                         double tol = kBellTol) {
    if (w.cols() != 3)
        throw DimensionError("hilbert_rescaled_check: eigenvalue matrix must have 3 columns");
    const Reinterpretation re = reinterpret(w, x);  // rejects the zero vector

    const double h = std::sqrt(x.hilbert_norm_sq());
    std::vector<cplx> coords(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) coords[i] = x.coords[i] / h;
    const StateVector rescaled(std::move(coords), GeometricSpace::hilbert(x.dim()));

    const SignedDensity d = density(rescaled, re.w_x);
    BellReport r = detail::report_from_density(d, bell_number(re.w_x) * bell_number(re.w_x), tol);
    const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {1, 2}, {0, 2}}};
    for (std::size_t k = 0; k < 3; ++k)
        r.pairwise_nonneg[k] =
            detail::pair_density(rescaled, re.w_x, pairs[k].first, pairs[k].second).min_weight() >=
            -tol;
    return r;
}

/// Linear nonnegativity constraints imposed on the weight vector during the
/// witness search.
enum class DensityConstraint { None, MarginalsNonneg, PairwiseNonneg, TripleNonneg };

/// A certified Bell violation: ±1 eigenvalue columns, nonnegative weights
/// |s_i|^2 forming a valid state, and the recomputed report.
struct Witness {
    GeometricSpace signature;
    EigenvalueMatrix columns;      // n x 3, entries ±1
    std::vector<double> weights;   // |s_i|^2, sum_i g_i weights_i = 1
    double norm_cap = 0.0;
    std::uint64_t pattern = 0;     // sign-pattern encoding, for reproducibility
    BellReport report;

    StateVector state() const {
        std::vector<cplx> coords(weights.size());
        for (std::size_t i = 0; i < weights.size(); ++i)
            coords[i] = std::sqrt(std::max(0.0, weights[i]));
        return StateVector(std::move(coords), signature);
    }
};

namespace detail {

inline EigenvalueMatrix pattern_matrix(std::uint64_t pattern, std::size_t n) {
    EigenvalueMatrix w(n, 3);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < n; ++i)
            w(i, j) = (pattern >> (j * n + i)) & 1u ? 1.0 : -1.0;
    return w;
}

inline std::uint64_t swap_xz(std::uint64_t pattern, std::size_t n) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    const std::uint64_t x = pattern & mask;
    const std::uint64_t y = (pattern >> n) & mask;
    const std::uint64_t z = (pattern >> (2 * n)) & mask;
    return z | (y << n) | (x << (2 * n));
}

// One density-nonnegativity row (>= 0) per outcome group of `w`.
inline void add_nonneg_rows(LpProblem& lp, const EigenvalueMatrix& w,
                            const GeometricSpace& space) {
    for (const auto& g : eigen_groups(w)) {
        std::vector<double> row(space.dim(), 0.0);
        for (std::size_t i : g.indices) row[i] = -static_cast<double>(space.sign(i));
        lp.add_le(std::move(row), 0.0);  // -(group weight) <= 0
    }
}

}  // namespace detail

/// Exhaustive search for Bell-violation witnesses over all ±1 sign-column
/// triples (up to the X/Z exchange, which leaves the inequality invariant).
/// For each pattern the left-hand side is maximized over weight vectors
/// p >= 0 with sum g_i p_i = 1 and sum p_i <= norm_cap, subject to the chosen
/// nonnegativity constraints; the absolute value splits into two LPs.
inline std::vector<Witness> violation_search(const GeometricSpace& space, double norm_cap,
                                             DensityConstraint constraints,
                                             double tol = kBellTol) {
    const std::size_t n = space.dim();
    if (n > 8) throw DimensionError("violation_search: dimension above 8");
    // Hilbert signatures are admitted and provably return an empty list.
    if (!space.is_minkowski() && !space.is_hilbert())
        throw GeometryError("violation_search: space must be Minkowski-like or Hilbert");
    if (norm_cap < 1.0) throw PreconditionError("violation_search: norm_cap must be >= 1");

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(space.sign(i));

    std::vector<Witness> found;
    const std::uint64_t limit = std::uint64_t{1} << (3 * n);
    for (std::uint64_t pattern = 0; pattern < limit; ++pattern) {
        if (detail::swap_xz(pattern, n) < pattern) continue;  // canonical representative only

        const EigenvalueMatrix w = detail::pattern_matrix(pattern, n);
        const double bound = 1.0;  // |W|_inf = 1 for ±1 columns

        // Row products entering the objective.
        std::vector<double> pxy(n), pyz(n), pxz(n);
        for (std::size_t i = 0; i < n; ++i) {
            pxy[i] = g[i] * w(i, 0) * w(i, 1);
            pyz[i] = g[i] * w(i, 1) * w(i, 2);
            pxz[i] = g[i] * w(i, 0) * w(i, 2);
        }

        LpProblem base(n);
        base.add_eq(g, 1.0);                            // quadric norm 1
        base.add_le(std::vector<double>(n, 1.0), norm_cap);  // Hilbert norm cap
        switch (constraints) {
            case DensityConstraint::None:
                break;
            case DensityConstraint::MarginalsNonneg:
                for (std::size_t j = 0; j < 3; ++j)
                    detail::add_nonneg_rows(base, w.select_columns({j}), space);
                break;
            case DensityConstraint::PairwiseNonneg:
                detail::add_nonneg_rows(base, w.select_columns({0, 1}), space);
                detail::add_nonneg_rows(base, w.select_columns({1, 2}), space);
                detail::add_nonneg_rows(base, w.select_columns({0, 2}), space);
                break;
            case DensityConstraint::TripleNonneg:
                detail::add_nonneg_rows(base, w, space);
                break;
        }

        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> best_p;
        for (int branch = 0; branch < 2; ++branch) {
            const double sgn = branch == 0 ? 1.0 : -1.0;  // sign of (exy - eyz)
            std::vector<double> objective(n), branch_row(n);
            for (std::size_t i = 0; i < n; ++i) {
                objective[i] = sgn * (pxy[i] - pyz[i]) + pxz[i];
                branch_row[i] = -sgn * (pxy[i] - pyz[i]);  // enforces sgn*(exy-eyz) >= 0
            }
            LpProblem lp = base;
            lp.add_le(std::move(branch_row), 0.0);
            const LpResult res = lp_maximize(objective, lp);
            if (res.status == LpStatus::Optimal && res.objective > best) {
                best = res.objective;
                best_p = res.x;
            }
        }

        if (best_p.empty() || best <= bound + tol) continue;

        Witness wit{space, w, std::move(best_p), norm_cap, pattern, BellReport{}};
        wit.report = bell_check(w, wit.state(), Isometry::identity(space), tol);
        found.push_back(std::move(wit));
    }

    std::stable_sort(found.begin(), found.end(), [](const Witness& a, const Witness& b) {
        if (a.report.lhs != b.report.lhs) return a.report.lhs > b.report.lhs;
        return a.pattern < b.pattern;
    });
    return found;
}

/// One probability constraint: either a marginal value of a single observable
/// or a full joint outcome tuple.
struct OutcomeTarget {
    std::optional<std::size_t> column;  // set -> marginal target on this observable
    std::vector<double> outcome;        // length 1 (marginal) or k (joint)
    double probability = 0.0;
};

struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> p;  // certificate when feasible
};

/// Is there a Hilbert-space probability vector over the ground states that
/// reproduces the requested outcome probabilities? Solved as an LP
/// feasibility problem {p >= 0, sum p = 1, linear outcome constraints}.
inline FeasibilityResult hilbert_feasibility(const EigenvalueMatrix& table,
                                             const std::vector<OutcomeTarget>& targets,
                                             double eps = kLpTol) {
    const std::size_t n = table.rows();
    if (targets.empty())
        return {true, std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0)};

    LpProblem lp(n);
    lp.add_eq(std::vector<double>(n, 1.0), 1.0);
    for (const auto& t : targets) {
        if (t.probability < 0.0 || t.probability > 1.0)
            throw PreconditionError("hilbert_feasibility: probability outside [0, 1]");
        std::vector<double> row(n, 0.0);
        if (t.column) {
            if (*t.column >= table.cols() || t.outcome.size() != 1)
                throw PreconditionError("hilbert_feasibility: malformed marginal target");
            for (std::size_t i = 0; i < n; ++i)
                if (table(i, *t.column) == t.outcome[0]) row[i] = 1.0;
        } else {
            if (t.outcome.size() != table.cols())
                throw PreconditionError("hilbert_feasibility: malformed joint target");
            for (std::size_t i = 0; i < n; ++i)
                if (detail::outcome_equal(table.row(i), t.outcome, 0.0)) row[i] = 1.0;
        }
        lp.add_eq(std::move(row), t.probability);
    }

    const LpResult res = lp_maximize(std::vector<double>(n, 0.0), lp, eps);
    if (res.status != LpStatus::Optimal) return {false, {}};
    return {true, res.x};
}

}  // namespace qlab
