#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "qlab/error.hpp"

namespace qlab {

inline constexpr double kLpTol = 1e-9;

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// maximize c.x  subject to  a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.
struct LpProblem {
    explicit LpProblem(std::size_t num_vars) : n(num_vars) {}

    void add_le(std::vector<double> row, double rhs) {
        check(row);
        a_ub.push_back(std::move(row));
        b_ub.push_back(rhs);
    }

    void add_eq(std::vector<double> row, double rhs) {
        check(row);
        a_eq.push_back(std::move(row));
        b_eq.push_back(rhs);
    }

    std::size_t n;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;

private:
    void check(const std::vector<double>& row) const {
        if (row.size() != n) throw DimensionError("LpProblem: row length differs from num_vars");
    }
};

namespace detail {

// Dense two-phase simplex with Bland's rule. Sized for a handful of
// variables and constraints; no factorization, the full tableau is kept.
class SimplexTableau {
public:
    SimplexTableau(const LpProblem& p, double eps) : eps_(eps), n_(p.n) {
        const std::size_t m = p.a_ub.size() + p.a_eq.size();
        num_slack_ = p.a_ub.size();
        total_ = n_ + num_slack_ + m;  // structural + slack + artificial (worst case)
        rows_.assign(m, std::vector<double>(total_ + 1, 0.0));
        basis_.assign(m, SIZE_MAX);

        std::size_t art = n_ + num_slack_;
        for (std::size_t i = 0; i < p.a_ub.size(); ++i) {
            auto& row = rows_[i];
            double sign = p.b_ub[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) row[j] = sign * p.a_ub[i][j];
            row[total_] = sign * p.b_ub[i];
            row[n_ + i] = sign;  // slack (surplus when the row was flipped)
            if (sign > 0.0) {
                basis_[i] = n_ + i;
            } else {
                row[art] = 1.0;
                basis_[i] = art;
                artificials_.push_back(art);
                ++art;
            }
        }
        for (std::size_t e = 0; e < p.a_eq.size(); ++e) {
            const std::size_t i = p.a_ub.size() + e;
            auto& row = rows_[i];
            double sign = p.b_eq[e] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) row[j] = sign * p.a_eq[e][j];
            row[total_] = sign * p.b_eq[e];
            row[art] = 1.0;
            basis_[i] = art;
            artificials_.push_back(art);
            ++art;
        }
        first_artificial_ = n_ + num_slack_;
    }

    LpResult solve(const std::vector<double>& c) {
        // Phase 1: maximize -(sum of artificials).
        if (!artificials_.empty()) {
            std::vector<double> obj(total_ + 1, 0.0);
            for (std::size_t a : artificials_) obj[a] = -1.0;
            reduce(obj);
            if (!iterate(obj, /*allow_artificial=*/true)) return {LpStatus::Unbounded, {}, 0.0};
            // obj[total_] tracks the negated phase-1 objective (sum of artificials).
            if (obj[total_] > eps_) return {LpStatus::Infeasible, {}, 0.0};
            expel_artificials();
        }

        // Phase 2: the caller's objective; artificial columns stay out.
        std::vector<double> obj(total_ + 1, 0.0);
        for (std::size_t j = 0; j < n_; ++j) obj[j] = c[j];
        reduce(obj);
        if (!iterate(obj, /*allow_artificial=*/false)) return {LpStatus::Unbounded, {}, 0.0};

        LpResult res;
        res.status = LpStatus::Optimal;
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (basis_[i] < n_) res.x[basis_[i]] = rows_[i][total_];
        res.objective = 0.0;
        for (std::size_t j = 0; j < n_; ++j) res.objective += c[j] * res.x[j];
        return res;
    }

private:
    // Express the objective in terms of the current nonbasic variables.
    void reduce(std::vector<double>& obj) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double coef = obj[basis_[i]];
            if (coef == 0.0) continue;
            for (std::size_t j = 0; j <= total_; ++j) obj[j] -= coef * rows_[i][j];
        }
    }

    // Bland's rule on both the entering and the leaving choice. The pivot cap
    // bounds the degenerate stalls that floating-point tolerances can let
    // through.
    bool iterate(std::vector<double>& obj, bool allow_artificial) {
        const std::size_t max_pivots = 1000 + 100 * total_;
        for (std::size_t pivots = 0;; ++pivots) {
            if (pivots > max_pivots)
                throw NumericalError("simplex: pivot cap exceeded");
            std::size_t enter = SIZE_MAX;
            const std::size_t limit = allow_artificial ? total_ : first_artificial_;
            for (std::size_t j = 0; j < limit; ++j) {
                if (obj[j] > eps_) { enter = j; break; }
            }
            if (enter == SIZE_MAX) return true;  // optimal

            std::size_t leave = SIZE_MAX;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                const double aij = rows_[i][enter];
                if (aij <= eps_) continue;
                const double ratio = rows_[i][total_] / aij;
                if (ratio < best_ratio - eps_ ||
                    (ratio < best_ratio + eps_ &&
                     (leave == SIZE_MAX || basis_[i] < basis_[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave == SIZE_MAX) return false;  // unbounded
            pivot(leave, enter);

            const double coef = obj[enter];
            if (coef != 0.0)
                for (std::size_t j = 0; j <= total_; ++j) obj[j] -= coef * rows_[leave][j];
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        auto& r = rows_[row];
        const double piv = r[col];
        for (double& v : r) v /= piv;
        r[col] = 1.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == row) continue;
            const double f = rows_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= total_; ++j) rows_[i][j] -= f * r[j];
            rows_[i][col] = 0.0;
        }
        basis_[row] = col;
    }

    // Pivot zero-level artificials out of the basis where possible.
    void expel_artificials() {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (basis_[i] < first_artificial_) continue;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (std::abs(rows_[i][j]) > eps_) {
                    pivot(i, j);
                    break;
                }
            }
            // A row with no eligible pivot is redundant; its artificial stays
            // basic at level zero and never re-enters in phase 2.
        }
    }

    double eps_;
    std::size_t n_;
    std::size_t num_slack_ = 0;
    std::size_t total_ = 0;
    std::size_t first_artificial_ = 0;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> artificials_;
};

}  // namespace detail

inline LpResult lp_maximize(const std::vector<double>& c, const LpProblem& p,
                            double eps = kLpTol) {
    if (c.size() != p.n) throw DimensionError("lp_maximize: objective length differs");
    detail::SimplexTableau tableau(p, eps);
    return tableau.solve(c);
}

}  // namespace qlab
