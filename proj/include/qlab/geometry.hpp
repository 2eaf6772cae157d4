#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "qlab/error.hpp"
#include "qlab/linalg.hpp"

namespace qlab {

inline constexpr double kStateTol    = 1e-9;
inline constexpr double kIsometryTol = 1e-9;

/// Orthogonal geometry given by a diagonal metric with entries +1, -1, 0.
/// The basis is pre-sorted: all +1 directions first, then -1, then 0.
/// Unsorted input is rejected, not permuted.
class GeometricSpace {
public:
    explicit GeometricSpace(std::vector<int> signature) : g_(std::move(signature)) {
        int prev = 2;  // ranks: +1 -> 2, -1 -> 1, 0 -> 0
        for (int gi : g_) {
            int rank;
            switch (gi) {
                case +1: rank = 2; ++r_; ++s_; break;
                case -1: rank = 1; ++s_; break;
                case 0:  rank = 0; break;
                default: throw GeometryError("signature entries must be +1, -1 or 0");
            }
            if (rank > prev)
                throw GeometryError("signature must list +1 entries, then -1, then 0");
            prev = rank;
        }
    }

    static GeometricSpace hilbert(std::size_t n) {
        return GeometricSpace(std::vector<int>(n, +1));
    }

    /// n-1 spacelike directions followed by the time direction.
    static GeometricSpace minkowski(std::size_t n) {
        if (n == 0) throw GeometryError("minkowski: dimension must be positive");
        std::vector<int> g(n, +1);
        g.back() = -1;
        return GeometricSpace(std::move(g));
    }

    std::size_t dim() const { return g_.size(); }
    std::size_t plus_count() const { return r_; }     // r
    std::size_t nonzero_count() const { return s_; }  // s
    const std::vector<int>& signature() const { return g_; }
    int sign(std::size_t i) const { return g_[i]; }

    bool is_hilbert() const { return r_ == g_.size(); }
    bool is_minkowski() const { return s_ == g_.size() && r_ + 1 == s_ && s_ >= 1; }
    bool has_zero_directions() const { return s_ < g_.size(); }

    Matrix metric_matrix() const {
        Matrix m(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i) m(i, i) = static_cast<double>(g_[i]);
        return m;
    }

    friend bool operator==(const GeometricSpace& a, const GeometricSpace& b) {
        return a.g_ == b.g_;
    }

private:
    std::vector<int> g_;
    std::size_t r_ = 0;
    std::size_t s_ = 0;
};

/// Complex coordinate vector bound to its geometry.
struct StateVector {
    std::vector<cplx> coords;
    GeometricSpace space;

    StateVector(std::vector<cplx> c, GeometricSpace sp)
        : coords(std::move(c)), space(std::move(sp)) {
        if (coords.size() != space.dim())
            throw DimensionError("StateVector: coordinate count differs from dimension");
    }

    std::size_t dim() const { return coords.size(); }

    /// Squared Euclidean (Hilbert) norm of the coordinates.
    double hilbert_norm_sq() const {
        double s = 0.0;
        for (const auto& c : coords) s += std::norm(c);
        return s;
    }
};

inline void require_same_space(const StateVector& x, const StateVector& y, const char* op) {
    if (!(x.space == y.space))
        throw GeometryError(std::string(op) + ": vectors live in different spaces");
}

/// Indefinite scalar product sum_i g_i conj(x_i) y_i.
inline cplx inner(const StateVector& x, const StateVector& y) {
    require_same_space(x, y, "inner");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i)
        acc += static_cast<double>(x.space.sign(i)) * std::conj(x.coords[i]) * y.coords[i];
    return acc;
}

/// (x|x); real by construction, the vanishing imaginary part is asserted.
inline double quadric_norm(const StateVector& x) {
    const cplx q = inner(x, x);
    if (std::abs(q.imag()) > 1e-14)
        throw NumericalError("quadric_norm: imaginary residue exceeds 1e-14");
    return q.real();
}

inline bool is_state(const StateVector& x, double tol = kStateTol) {
    return std::abs(quadric_norm(x) - 1.0) <= tol;
}

struct SignedParts {
    StateVector plus;
    StateVector minus;
    StateVector zero;
};

/// Coordinatewise split x = x+ + x- + x0 along the signature classes.
inline SignedParts signed_parts(const StateVector& x) {
    const std::size_t n = x.dim();
    std::vector<cplx> p(n, 0.0), m(n, 0.0), z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        switch (x.space.sign(i)) {
            case +1: p[i] = x.coords[i]; break;
            case -1: m[i] = x.coords[i]; break;
            default: z[i] = x.coords[i]; break;
        }
    }
    return {StateVector(std::move(p), x.space), StateVector(std::move(m), x.space),
            StateVector(std::move(z), x.space)};
}

/// Metric preservation ||T* G T - G||_max <= tol.
inline bool is_isometry(const Matrix& t, const GeometricSpace& space, double tol = kIsometryTol) {
    if (t.rows() != space.dim() || t.cols() != space.dim())
        throw GeometryError("is_isometry: operator dimension differs from the space");
    const Matrix g = space.metric_matrix();
    return max_abs_diff(t.adjoint() * g * t, g) <= tol;
}

/// Metric-preserving operator; validated on construction.
class Isometry {
public:
    Isometry(Matrix m, GeometricSpace space, double tol = kIsometryTol)
        : matrix_(std::move(m)), space_(std::move(space)) {
        if (!is_isometry(matrix_, space_, tol))
            throw PreconditionError("Isometry: matrix does not preserve the metric");
    }

    static Isometry identity(const GeometricSpace& space) {
        return Isometry(Matrix::identity(space.dim()), space, 0.0);
    }

    const Matrix& matrix() const { return matrix_; }
    const GeometricSpace& space() const { return space_; }

    StateVector apply(const StateVector& x) const {
        if (!(x.space == space_))
            throw GeometryError("Isometry::apply: vector lives in a different space");
        return StateVector(matrix_ * x.coords, space_);
    }

private:
    Matrix matrix_;
    GeometricSpace space_;
};

/// Block-diagonal isometry acting as `u_plus` on V+ and `u_minus` on V-.
/// Requires s = n (no zero directions) and unitary blocks.
inline Isometry block_unitary_isometry(const Matrix& u_plus, const Matrix& u_minus,
                                       const GeometricSpace& space,
                                       double tol = kUnitaryTol) {
    if (space.has_zero_directions())
        throw GeometryError("block_unitary_isometry: space has zero-signature directions");
    const std::size_t r = space.plus_count();
    const std::size_t m = space.nonzero_count() - r;
    if (u_plus.rows() != r || u_plus.cols() != r || u_minus.rows() != m || u_minus.cols() != m)
        throw DimensionError("block_unitary_isometry: block sizes do not match the signature");
    if ((r > 0 && !is_unitary(u_plus, tol)) || (m > 0 && !is_unitary(u_minus, tol)))
        throw PreconditionError("block_unitary_isometry: block is not unitary");

    Matrix t(space.dim(), space.dim());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) t(i, j) = u_plus(i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) t(r + i, r + j) = u_minus(i, j);
    return Isometry(std::move(t), space);
}

/// True iff the two events carry the same time tag. Minkowski spaces only.
inline bool same_time_slice(const StateVector& x, const StateVector& y, double tol = kStateTol) {
    require_same_space(x, y, "same_time_slice");
    if (!x.space.is_minkowski())
        throw GeometryError("same_time_slice: space is not Minkowski");
    return std::abs(x.coords.back() - y.coords.back()) <= tol;
}

}  // namespace qlab
