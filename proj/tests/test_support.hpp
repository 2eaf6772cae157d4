#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qlab/qlab.hpp"

// Seeded generators shared by the test suites. Everything is deterministic
// per seed; tests assert properties, not generator-dependent constants.
namespace testsup {

using qlab::cplx;
using qlab::GeometricSpace;
using qlab::Matrix;
using qlab::StateVector;

inline cplx random_cplx(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double re = u(g), im = u(g);
    return {re, im};
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& g) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_cplx(g);
    return m;
}

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& g) {
    const Matrix m = random_matrix(n, n, g);
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return h;
}

/// Modified Gram-Schmidt on a random complex matrix; redraws on (measure
/// zero) near-singular input.
inline Matrix random_unitary(std::size_t n, std::mt19937_64& g) {
    for (;;) {
        Matrix m = random_matrix(n, n, g);
        bool ok = true;
        for (std::size_t c = 0; c < n && ok; ++c) {
            for (std::size_t p = 0; p < c; ++p) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(m(i, p)) * m(i, c);
                for (std::size_t i = 0; i < n; ++i) m(i, c) -= proj * m(i, p);
            }
            double norm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm2 += std::norm(m(i, c));
            if (norm2 < 1e-12) {
                ok = false;
                break;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (std::size_t i = 0; i < n; ++i) m(i, c) *= inv;
        }
        if (ok) return m;
    }
}

/// Sorted ±1 signature with at least one +1 direction.
inline std::vector<int> random_signature(std::size_t n, std::mt19937_64& g) {
    std::uniform_int_distribution<std::size_t> u(1, n);
    const std::size_t r = u(g);
    std::vector<int> sig(n, -1);
    for (std::size_t i = 0; i < r; ++i) sig[i] = +1;
    return sig;
}

/// Random vector on the characteristic surface: the +block is rescaled so the
/// quadric norm lands on 1. Draws with a tiny +block are rejected to keep the
/// rescaling factor (and with it the floating-point error budget) moderate.
inline StateVector random_state(const GeometricSpace& space, std::mt19937_64& g) {
    const std::size_t n = space.dim();
    for (;;) {
        std::vector<cplx> coords(n);
        for (auto& c : coords) c = random_cplx(g);

        double plus = 0.0, minus = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (space.sign(i) > 0)
                plus += std::norm(coords[i]);
            else
                minus += std::norm(coords[i]);
        }
        if (plus < 0.2) continue;
        const double f = std::sqrt((1.0 + minus) / plus);
        for (std::size_t i = 0; i < n; ++i)
            if (space.sign(i) > 0) coords[i] *= f;
        return StateVector(std::move(coords), space);
    }
}

inline qlab::EigenvalueMatrix random_eigenvalue_matrix(std::size_t n, std::size_t k, double lo,
                                                       double hi, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(lo, hi);
    qlab::EigenvalueMatrix w(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) w(i, j) = u(g);
    return w;
}

}  // namespace testsup
