#include <catch2/catch_amalgamated.hpp>

#include "qlab/linalg.hpp"

#include "test_support.hpp"

using namespace qlab;
using Catch::Approx;

namespace {
const cplx I{0.0, 1.0};
}

TEST_CASE("adjoint transposes and conjugates") {
    Matrix m = {{0.0, 1.0}, {0.0, 0.0}};
    Matrix a = adjoint(m);
    CHECK(a(0, 0) == cplx(0.0));
    CHECK(a(0, 1) == cplx(0.0));
    CHECK(a(1, 0) == cplx(1.0));
    CHECK(a(1, 1) == cplx(0.0));

    Matrix one = {{I}};
    CHECK(adjoint(one)(0, 0) == -I);

    Matrix herm = {{cplx(2.0), I}, {-I, cplx(-1.0)}};
    CHECK(max_abs_diff(adjoint(herm), herm) == 0.0);
}

TEST_CASE("adjoint is an involution, exactly") {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix m = testsup::random_matrix(4, 3, g);
        CHECK(max_abs_diff(adjoint(adjoint(m)), m) == 0.0);
    }
}

TEST_CASE("is_hermitian") {
    CHECK(is_hermitian(Matrix::diagonal({-1.0, -1.0, 1.0, 1.0}), 0.0));
    CHECK(is_hermitian(Matrix{{0.0, I}, {-I, 0.0}}, 0.0));
    CHECK_FALSE(is_hermitian(Matrix{{0.0, 1.0}, {0.0, 0.0}}, 1e-12));
    CHECK_THROWS_AS(is_hermitian(Matrix(2, 3), 1e-12), DimensionError);
}

TEST_CASE("is_unitary") {
    CHECK(is_unitary(Matrix::identity(3), 0.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(is_unitary(Matrix{{s, s}, {s, -s}}, 1e-12));
    CHECK_FALSE(is_unitary(Matrix::diagonal({2.0, 1.0}), 1e-12));
    CHECK_THROWS_AS(is_unitary(Matrix(1, 2), 1e-12), DimensionError);
}

TEST_CASE("commute") {
    CHECK(commute(Matrix::diagonal({1.0, 2.0}), Matrix::diagonal({-3.0, 0.5}), 0.0));
    CHECK_FALSE(commute(Matrix{{0.0, 1.0}, {1.0, 0.0}},
                        Matrix{{1.0, 0.0}, {0.0, -1.0}}, 1e-12));
    CHECK_THROWS_AS(commute(Matrix::identity(2), Matrix::identity(3), 1e-12), DimensionError);
}

TEST_CASE("matrices conjugated by a common unitary commute") {
    std::mt19937_64 g(23);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix t = testsup::random_unitary(5, g);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::vector<double> d1(5), d2(5);
        for (auto& v : d1) v = u(g);
        for (auto& v : d2) v = u(g);
        const Matrix a = t.adjoint() * Matrix::diagonal(d1) * t;
        const Matrix b = t.adjoint() * Matrix::diagonal(d2) * t;
        CHECK(commute(a, b, 1e-10));
        CHECK(commute(b, a, 1e-10));  // symmetric in its arguments
    }
}

TEST_CASE("spectral decomposition of an already diagonal matrix") {
    const auto dec = spectral_decompose(Matrix::diagonal({3.0, 1.0, 2.0}));
    REQUIRE(dec.eigenvalues.size() == 3);
    CHECK(dec.eigenvalues[0] == Approx(1.0));
    CHECK(dec.eigenvalues[1] == Approx(2.0));
    CHECK(dec.eigenvalues[2] == Approx(3.0));
    // permutation matrix: one unit entry per column
    for (std::size_t j = 0; j < 3; ++j) {
        int nonzero = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double a = std::abs(dec.eigenvectors(i, j));
            if (a > 0.5) {
                CHECK(a == Approx(1.0));
                ++nonzero;
            } else {
                CHECK(a == Approx(0.0).margin(1e-14));
            }
        }
        CHECK(nonzero == 1);
    }
}

TEST_CASE("spectral decomposition of the symmetric flip") {
    const Matrix a = {{0.0, 1.0}, {1.0, 0.0}};
    const auto dec = spectral_decompose(a);
    CHECK(dec.eigenvalues[0] == Approx(-1.0));
    CHECK(dec.eigenvalues[1] == Approx(1.0));
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(dec.eigenvectors(i, j)) == Approx(s));  // up to phase
    CHECK(max_abs_diff(a, dec.reconstruct()) <= 1e-12);
}

TEST_CASE("random hermitian matrices reconstruct") {
    std::mt19937_64 g(37);
    for (int rep = 0; rep < 25; ++rep) {
        const Matrix a = testsup::random_hermitian(8, g);
        const auto dec = spectral_decompose(a);
        CHECK(max_abs_diff(a, dec.reconstruct()) <= 1e-10);
        CHECK(is_unitary(dec.eigenvectors, 1e-10));
        for (std::size_t i = 1; i < dec.eigenvalues.size(); ++i)
            CHECK(dec.eigenvalues[i - 1] <= dec.eigenvalues[i]);
        double sum = 0.0;
        for (double lam : dec.eigenvalues) sum += lam;
        CHECK(std::abs(sum - trace(a).real()) <= 1e-10);
    }
}

TEST_CASE("spectral decomposition rejects non-hermitian input") {
    CHECK_THROWS_AS(spectral_decompose(Matrix{{0.0, 1.0}, {0.0, 0.0}}), PreconditionError);
}
