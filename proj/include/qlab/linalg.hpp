#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "qlab/error.hpp"

namespace qlab {

using cplx = std::complex<double>;

inline constexpr double kUnitaryTol  = 1e-10;
inline constexpr double kSpectralTol = 1e-10;

/// Dense complex matrix, row-major storage, value semantics.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

    Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw DimensionError("Matrix: ragged initializer rows");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(const std::vector<double>& d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return data_; }

    Matrix adjoint() const {
        Matrix a(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                a(j, i) = std::conj((*this)(i, j));
        return a;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        check_same_shape(a, b, "operator+");
        Matrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
        return c;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        check_same_shape(a, b, "operator-");
        Matrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
        return c;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("operator*: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator*(const cplx& s, const Matrix& a) {
        Matrix c = a;
        for (auto& v : c.data_) v *= s;
        return c;
    }

    friend std::vector<cplx> operator*(const Matrix& a, const std::vector<cplx>& x) {
        if (a.cols_ != x.size())
            throw DimensionError("operator*: matrix/vector dimensions differ");
        std::vector<cplx> y(a.rows_, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j)
                y[i] += a(i, j) * x[j];
        return y;
    }

    /// Largest entry magnitude (max norm).
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    static void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw DimensionError(std::string(op) + ": shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline Matrix adjoint(const Matrix& m) { return m.adjoint(); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

inline void require_square(const Matrix& m, const char* op) {
    if (!m.square()) throw DimensionError(std::string(op) + ": matrix is not square");
}

inline bool is_hermitian(const Matrix& m, double tol = kSpectralTol) {
    require_square(m, "is_hermitian");
    return max_abs_diff(m, m.adjoint()) <= tol;
}

inline bool is_unitary(const Matrix& m, double tol = kUnitaryTol) {
    require_square(m, "is_unitary");
    return max_abs_diff(m.adjoint() * m, Matrix::identity(m.rows())) <= tol;
}

inline bool commute(const Matrix& a, const Matrix& b, double tol = kSpectralTol) {
    require_square(a, "commute");
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("commute: dimensions differ");
    return max_abs_diff(a * b, b * a) <= tol;
}

inline cplx trace(const Matrix& m) {
    require_square(m, "trace");
    cplx t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

/// Eigenvalues (real, ascending) and unitary eigenvector matrix of a
/// hermitian matrix; column i of `eigenvectors` belongs to `eigenvalues[i]`.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;

    Matrix reconstruct() const {
        return eigenvectors * Matrix::diagonal(eigenvalues) * eigenvectors.adjoint();
    }
};

namespace detail {

// One Jacobi rotation annihilating the (p,q) entry of the hermitian working
// copy `a`; the rotation is accumulated into `v` (v <- v * R).
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const cplx apq = a(p, q);
    const double beta = std::abs(apq);
    if (beta == 0.0) return;
    const cplx omega = apq / beta;

    const double alpha = a(p, p).real();
    const double gamma = a(q, q).real();
    const double tau = (gamma - alpha) / (2.0 * beta);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const std::size_t n = a.rows();
    // a <- R* a (rows p, q)
    for (std::size_t j = 0; j < n; ++j) {
        const cplx apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj - s * omega * aqj;
        a(q, j) = s * std::conj(omega) * apj + c * aqj;
    }
    // a <- a R (columns p, q)
    for (std::size_t i = 0; i < n; ++i) {
        const cplx aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip - s * std::conj(omega) * aiq;
        a(i, q) = s * omega * aip + c * aiq;
    }
    // exact zero off the diagonal, real diagonal
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = cplx(a(p, p).real(), 0.0);
    a(q, q) = cplx(a(q, q).real(), 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip - s * std::conj(omega) * viq;
        v(i, q) = s * omega * vip + c * viq;
    }
}

inline double max_offdiag(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j)));
    return m;
}

}  // namespace detail

/// Cyclic Jacobi diagonalization of a hermitian matrix. Eigenvalues are
/// sorted ascending, ties keep the working-index order. Throws
/// PreconditionError if `a` is not hermitian within `tol` and NumericalError
/// if the sweep cap is exceeded.
inline SpectralDecomposition spectral_decompose(const Matrix& a, double tol = kSpectralTol) {
    require_square(a, "spectral_decompose");
    if (!is_hermitian(a, tol))
        throw PreconditionError("spectral_decompose: matrix is not hermitian");

    const std::size_t n = a.rows();
    // Symmetrized working copy: real diagonal, exactly hermitian.
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

    Matrix v = Matrix::identity(n);
    const double scale = std::max(1.0, w.max_abs());
    const double stop = 1e-15 * scale;
    constexpr int kMaxSweeps = 100;

    int sweep = 0;
    while (detail::max_offdiag(w) > stop) {
        if (++sweep > kMaxSweeps)
            throw NumericalError("spectral_decompose: no convergence after 100 sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(w(p, q)) > stop) detail::jacobi_rotate(w, v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return w(i, i).real() < w(j, j).real(); });

    SpectralDecomposition dec;
    dec.eigenvalues.resize(n);
    dec.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        dec.eigenvalues[k] = w(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) dec.eigenvectors(i, k) = v(i, order[k]);
    }
    return dec;
}

}  // namespace qlab
