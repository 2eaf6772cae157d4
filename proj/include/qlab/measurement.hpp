#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "qlab/error.hpp"
#include "qlab/geometry.hpp"
#include "qlab/linalg.hpp"

namespace qlab {

/// Real n x k matrix of instrument eigenvalues; row i is the tuple of values
/// the k observables return on ground state i.
class EigenvalueMatrix {
public:
    EigenvalueMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    EigenvalueMatrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw DimensionError("EigenvalueMatrix: ragged initializer rows");
            data_.insert(data_.end(), r.begin(), r.end());
        }
        validate();
    }

    /// Build from per-observable columns (each of length n).
    static EigenvalueMatrix from_columns(const std::vector<std::vector<double>>& cols) {
        if (cols.empty()) return EigenvalueMatrix(0, 0);
        EigenvalueMatrix w(cols.front().size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != w.rows_)
                throw DimensionError("EigenvalueMatrix: columns differ in length");
            for (std::size_t i = 0; i < w.rows_; ++i) w(i, j) = cols[j][i];
        }
        w.validate();
        return w;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<double> row(std::size_t i) const {
        return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    EigenvalueMatrix select_columns(const std::vector<std::size_t>& js) const {
        EigenvalueMatrix w(rows_, js.size());
        for (std::size_t j = 0; j < js.size(); ++j) {
            if (js[j] >= cols_) throw DimensionError("select_columns: index out of range");
            for (std::size_t i = 0; i < rows_; ++i) w(i, j) = (*this)(i, js[j]);
        }
        return w;
    }

    void validate() const {
        for (double v : data_)
            if (!std::isfinite(v))
                throw PreconditionError("EigenvalueMatrix: entries must be finite");
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Indices {0..n-1} sharing one distinct row of W, labeled by that row.
struct OutcomeGroup {
    std::vector<double> outcome;
    std::vector<std::size_t> indices;
};

namespace detail {

inline bool outcome_equal(const std::vector<double>& a, const std::vector<double>& b,
                          double tol) {
    for (std::size_t c = 0; c < a.size(); ++c) {
        if (tol == 0.0 ? (a[c] != b[c]) : (std::abs(a[c] - b[c]) > tol)) return false;
    }
    return true;
}

}  // namespace detail

/// Partition of the row indices of `w` by distinct rows, in first-occurrence
/// order. Rows are treated as exact labels; a positive `outcome_tol` merges
/// near-equal rows instead.
inline std::vector<OutcomeGroup> eigen_groups(const EigenvalueMatrix& w,
                                              double outcome_tol = 0.0) {
    std::vector<OutcomeGroup> groups;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        auto row = w.row(i);
        bool merged = false;
        for (auto& g : groups) {
            if (detail::outcome_equal(g.outcome, row, outcome_tol)) {
                g.indices.push_back(i);
                merged = true;
                break;
            }
        }
        if (!merged) groups.push_back({std::move(row), {i}});
    }
    return groups;
}

inline std::vector<OutcomeGroup> eigen_groups(const StateVector& x, const EigenvalueMatrix& w,
                                              double outcome_tol = 0.0) {
    if (x.dim() != w.rows())
        throw DimensionError("eigen_groups: state dimension differs from eigenvalue rows");
    return eigen_groups(w, outcome_tol);
}

/// Finite signed measure on distinct outcome tuples; weights may be negative
/// and sum to the quadric norm of the generating state.
struct SignedDensity {
    std::vector<std::vector<double>> support;
    std::vector<double> weights;

    std::size_t size() const { return support.size(); }
    std::size_t arity() const { return support.empty() ? 0 : support.front().size(); }

    double total() const {
        double t = 0.0;
        for (double w : weights) t += w;
        return t;
    }

    double min_weight() const {
        double m = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            m = (i == 0) ? weights[0] : std::min(m, weights[i]);
        return m;
    }
};

/// q_x(w) = sum over the rows equal to w of g_i |x_i|^2.
inline SignedDensity density(const StateVector& x, const EigenvalueMatrix& w,
                             double outcome_tol = 0.0) {
    if (x.dim() != w.rows())
        throw DimensionError("density: state dimension differs from eigenvalue rows");
    if (x.space.has_zero_directions())
        throw GeometryError("density: zero-signature directions are unsupported");

    SignedDensity d;
    for (auto& g : eigen_groups(w, outcome_tol)) {
        double weight = 0.0;
        for (std::size_t i : g.indices)
            weight += static_cast<double>(x.space.sign(i)) * std::norm(x.coords[i]);
        d.support.push_back(std::move(g.outcome));
        d.weights.push_back(weight);
    }
    return d;
}

/// Aggregate a joint density onto its j-th outcome coordinate.
inline SignedDensity marginal(const SignedDensity& d, std::size_t j) {
    if (j >= d.arity() && !(d.support.empty() && j == 0))
        throw DimensionError("marginal: column index out of range");
    SignedDensity m;
    for (std::size_t v = 0; v < d.size(); ++v) {
        const double outcome = d.support[v][j];
        bool merged = false;
        for (std::size_t u = 0; u < m.size(); ++u) {
            if (m.support[u][0] == outcome) {
                m.weights[u] += d.weights[v];
                merged = true;
                break;
            }
        }
        if (!merged) {
            m.support.push_back({outcome});
            m.weights.push_back(d.weights[v]);
        }
    }
    return m;
}

/// Measuring instrument H(W, T): eigenvalue matrix plus isometry.
class Instrument {
public:
    Instrument(EigenvalueMatrix w, Isometry t) : w_(std::move(w)), t_(std::move(t)) {
        if (w_.rows() != t_.space().dim())
            throw DimensionError("Instrument: eigenvalue rows differ from space dimension");
        if (t_.space().has_zero_directions())
            throw GeometryError("Instrument: zero-signature directions are unsupported");
        w_.validate();
    }

    const EigenvalueMatrix& w() const { return w_; }
    const Isometry& t() const { return t_; }
    const GeometricSpace& space() const { return t_.space(); }
    std::size_t arity() const { return w_.cols(); }

private:
    EigenvalueMatrix w_;
    Isometry t_;
};

/// h(x) = W(Tx): the k simultaneously measured values.
inline std::vector<double> measure(const Instrument& inst, const StateVector& x) {
    if (!(x.space == inst.space()))
        throw GeometryError("measure: state lives in a different space");
    const StateVector y = inst.t().apply(x);
    std::vector<double> h(inst.arity(), 0.0);
    for (std::size_t i = 0; i < y.dim(); ++i) {
        const double gi_wi = static_cast<double>(y.space.sign(i)) * std::norm(y.coords[i]);
        for (std::size_t j = 0; j < h.size(); ++j) h[j] += gi_wi * inst.w()(i, j);
    }
    return h;
}

/// Hermitian matrix T* G Lambda^(j) T of the j-th marginal observable; the
/// metric is folded in so that x* A x reproduces the measured value in any
/// signature (and reduces to T* Lambda T in Hilbert space).
inline Matrix observable_matrix(const Instrument& inst, std::size_t j) {
    if (j >= inst.arity()) throw DimensionError("observable_matrix: column index out of range");
    const std::size_t n = inst.space().dim();
    Matrix lam(n, n);
    for (std::size_t i = 0; i < n; ++i)
        lam(i, i) = static_cast<double>(inst.space().sign(i)) * inst.w()(i, j);
    return inst.t().matrix().adjoint() * lam * inst.t().matrix();
}

/// In Hilbert space, pairwise commutativity characterizes complete sets of
/// common observables.
inline bool jointly_observable_hilbert(const std::vector<Matrix>& matrices,
                                       double tol = kSpectralTol) {
    for (const auto& m : matrices) {
        require_square(m, "jointly_observable_hilbert");
        if (m.rows() != matrices.front().rows())
            throw DimensionError("jointly_observable_hilbert: dimensions differ");
        if (!is_hermitian(m, tol))
            throw PreconditionError("jointly_observable_hilbert: matrix is not hermitian");
    }
    for (std::size_t a = 0; a < matrices.size(); ++a)
        for (std::size_t b = a + 1; b < matrices.size(); ++b)
            if (!commute(matrices[a], matrices[b], tol)) return false;
    return true;
}

/// H(W,T) is positive semidefinite in x iff the density of Tx is nonnegative.
inline bool is_psd_in_state(const Instrument& inst, const StateVector& x, double tol = kStateTol) {
    const SignedDensity d = density(inst.t().apply(x), inst.w());
    return d.min_weight() >= -tol;
}

/// State-dependent rescaling: W^x rows with probabilities p_i(x).
struct Reinterpretation {
    EigenvalueMatrix w_x;
    std::vector<double> p;
};

/// W^x_i = ||x||_2^2 W_i on V+ rows and -||x||_2^2 W_i on V- rows, with
/// p_i = |x_i|^2 / ||x||_2^2; then sum_i W^x_i p_i is the measured value.
inline Reinterpretation reinterpret(const EigenvalueMatrix& w, const StateVector& x) {
    if (x.dim() != w.rows())
        throw DimensionError("reinterpret: state dimension differs from eigenvalue rows");
    if (x.space.has_zero_directions())
        throw GeometryError("reinterpret: zero-signature directions are unsupported");
    const double h2 = x.hilbert_norm_sq();
    if (h2 == 0.0) throw PreconditionError("reinterpret: zero vector");

    Reinterpretation r{EigenvalueMatrix(w.rows(), w.cols()), std::vector<double>(w.rows())};
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const double scale = static_cast<double>(x.space.sign(i)) * h2;
        for (std::size_t j = 0; j < w.cols(); ++j) r.w_x(i, j) = scale * w(i, j);
        r.p[i] = std::norm(x.coords[i]) / h2;
    }
    return r;
}

}  // namespace qlab
