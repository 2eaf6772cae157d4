#include <catch2/catch_amalgamated.hpp>

#include "qlab/bell.hpp"

#include "test_support.hpp"

using namespace qlab;
using Catch::Approx;

namespace {

StateVector m5_state() {
    const double c = std::sqrt(3.0) / 3.0;
    return StateVector({c, c, c, c, c}, GeometricSpace::minkowski(5));
}

EigenvalueMatrix m5_w() {
    return EigenvalueMatrix{{-1, -1, -1}, {1, 1, -1}, {1, -1, -1}, {1, -1, 1}, {1, 1, 1}};
}

StateVector m3_state() {
    return StateVector({1.0, std::sqrt(0.5), std::sqrt(0.5)}, GeometricSpace::minkowski(3));
}

EigenvalueMatrix m3_w() { return EigenvalueMatrix{{1, 1, 1}, {1, 1, 1}, {1, 1, -1}}; }

}  // namespace

TEST_CASE("bell number") {
    CHECK(bell_number(m5_w()) == 1.0);
    EigenvalueMatrix rescaled(5, 3);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j) rescaled(i, j) = (i % 2 ? 5.0 : -5.0) / 3.0;
    CHECK(bell_number(rescaled) == Approx(5.0 / 3.0));
    CHECK(bell_number(EigenvalueMatrix(2, 2)) == 0.0);
    CHECK_THROWS_AS(bell_number(EigenvalueMatrix(0, 0)), DimensionError);
}

TEST_CASE("pair expectations of the m5 example") {
    const SignedDensity d = density(m5_state(), m5_w());
    CHECK(pair_expectation(d, 0, 1) == Approx(-1.0 / 3.0).margin(1e-12));
    CHECK(pair_expectation(d, 0, 2) == Approx(-1.0 / 3.0).margin(1e-12));
    CHECK(pair_expectation(d, 1, 2) == Approx(-1.0 / 3.0).margin(1e-12));

    SignedDensity point{{{1.0, 1.0, 1.0}}, {1.0}};
    CHECK(pair_expectation(point, 0, 1) == 1.0);
    CHECK(pair_expectation(point, 1, 2) == 1.0);

    CHECK_THROWS_AS(pair_expectation(d, 0, 3), DimensionError);
    CHECK_THROWS_AS(pair_expectation(d, 1, 1), PreconditionError);
    SignedDensity two{{{1.0, 1.0}}, {1.0}};
    CHECK_THROWS_AS(pair_expectation(two, 0, 1), DimensionError);
}

TEST_CASE("bell check on the m5 example") {
    const BellReport r = bell_check(m5_w(), m5_state(),
                                    Isometry::identity(GeometricSpace::minkowski(5)));
    CHECK(r.exy == Approx(-1.0 / 3.0).margin(1e-12));
    CHECK(r.eyz == Approx(-1.0 / 3.0).margin(1e-12));
    CHECK(r.exz == Approx(-1.0 / 3.0).margin(1e-12));
    CHECK(r.lhs == Approx(-1.0 / 3.0).margin(1e-12));
    CHECK(r.bound == 1.0);
    CHECK(r.satisfied);
    CHECK_FALSE(r.triple_density_nonneg);        // weight -1/3 on the last row
    CHECK(r.pairwise_nonneg[0]);                 // (X,Y)
    CHECK_FALSE(r.pairwise_nonneg[1]);           // (Y,Z) carries -1/3 at (+1,+1)
    CHECK(r.pairwise_nonneg[2]);                 // (X,Z)
}

TEST_CASE("bell check on the m3 witness") {
    const BellReport r = bell_check(m3_w(), m3_state(),
                                    Isometry::identity(GeometricSpace::minkowski(3)));
    CHECK(r.exy == Approx(1.0).margin(1e-12));
    CHECK(r.eyz == Approx(2.0).margin(1e-12));
    CHECK(r.exz == Approx(2.0).margin(1e-12));
    CHECK(r.lhs == Approx(3.0).margin(1e-12));
    CHECK(r.bound == 1.0);
    CHECK_FALSE(r.satisfied);
}

TEST_CASE("bell check rejects wrong shapes and non-states") {
    const GeometricSpace m3 = GeometricSpace::minkowski(3);
    CHECK_THROWS_AS(bell_check(EigenvalueMatrix(3, 2), m3_state(), Isometry::identity(m3)),
                    DimensionError);
    CHECK_THROWS_AS(bell_check(m3_w(), StateVector({2.0, 0.0, 0.0}, m3), Isometry::identity(m3)),
                    PreconditionError);
}

TEST_CASE("row triplets obey the squared-bound inequality") {
    std::mt19937_64 g(73);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 2000; ++rep) {
        const double m = 2.0 * std::abs(u(g)) + 0.1;
        const double x = m * u(g), y = m * u(g), z = m * u(g);
        CHECK(std::abs(x * y - y * z) + x * z <= m * m + 1e-12);
    }
}

TEST_CASE("nonnegative densities always satisfy the inequality") {
    std::mt19937_64 g(79);
    std::uniform_int_distribution<std::size_t> dim(2, 6);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = dim(g);
        const GeometricSpace sp = GeometricSpace::hilbert(n);
        const StateVector x = testsup::random_state(sp, g);
        const EigenvalueMatrix w = testsup::random_eigenvalue_matrix(n, 3, -2.0, 2.0, g);
        const BellReport r = bell_check(w, x, Isometry::identity(sp));
        CHECK(r.triple_density_nonneg);
        CHECK(r.lhs <= r.bound + 1e-9);
        CHECK(r.satisfied);
    }
}

TEST_CASE("exchanging the X and Z roles leaves the inequality unchanged") {
    std::mt19937_64 g(83);
    for (int rep = 0; rep < 30; ++rep) {
        const GeometricSpace sp(testsup::random_signature(5, g));
        const StateVector x = testsup::random_state(sp, g);
        std::uniform_int_distribution<int> pm(0, 1);
        EigenvalueMatrix w(5, 3);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 3; ++j) w(i, j) = pm(g) ? 1.0 : -1.0;
        const EigenvalueMatrix rev = w.select_columns({2, 1, 0});
        const BellReport a = bell_check(w, x, Isometry::identity(sp));
        const BellReport b = bell_check(rev, x, Isometry::identity(sp));
        CHECK(a.exz == b.exz);
        CHECK(a.exy == b.eyz);
        CHECK(a.eyz == b.exy);
        CHECK(a.lhs == b.lhs);
        CHECK(a.satisfied == b.satisfied);
    }
}

TEST_CASE("hilbert rescaled check on the m5 example") {
    const BellReport r = hilbert_rescaled_check(m5_w(), m5_state());
    CHECK(r.exy == Approx(5.0 / 9.0).margin(1e-12));
    CHECK(r.eyz == Approx(5.0 / 9.0).margin(1e-12));
    CHECK(r.exz == Approx(5.0 / 9.0).margin(1e-12));
    CHECK(r.bound == Approx(25.0 / 9.0).margin(1e-12));
    CHECK(r.lhs == Approx(5.0 / 9.0).margin(1e-12));
    CHECK(r.satisfied);
    CHECK(r.triple_density_nonneg);
}

TEST_CASE("hilbert rescaled check is always satisfied") {
    std::mt19937_64 g(89);
    // the feynman state with arbitrary ±1 columns
    const StateVector feyn({std::sqrt(5.0 / 8.0), std::sqrt(1.0 / 8.0), std::sqrt(3.0 / 8.0),
                            std::sqrt(1.0 / 8.0)},
                           GeometricSpace::minkowski(4));
    std::uniform_int_distribution<int> pm(0, 1);
    for (int rep = 0; rep < 50; ++rep) {
        EigenvalueMatrix w(4, 3);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 3; ++j) w(i, j) = pm(g) ? 1.0 : -1.0;
        const BellReport r = hilbert_rescaled_check(w, feyn);
        CHECK(r.triple_density_nonneg);
        CHECK(r.satisfied);
    }
}

TEST_CASE("hilbert rescaling is the identity for unit Hilbert states") {
    std::mt19937_64 g(97);
    const GeometricSpace h4 = GeometricSpace::hilbert(4);
    const StateVector x = testsup::random_state(h4, g);
    std::uniform_int_distribution<int> pm(0, 1);
    EigenvalueMatrix w(4, 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) w(i, j) = pm(g) ? 1.0 : -1.0;
    const BellReport plain = bell_check(w, x, Isometry::identity(h4));
    const BellReport rescaled = hilbert_rescaled_check(w, x);
    CHECK(rescaled.exy == Approx(plain.exy).margin(1e-12));
    CHECK(rescaled.eyz == Approx(plain.eyz).margin(1e-12));
    CHECK(rescaled.exz == Approx(plain.exz).margin(1e-12));
    CHECK(rescaled.bound == Approx(plain.bound).margin(1e-12));
}

TEST_CASE("violation search finds the m3 witness") {
    const auto witnesses =
        violation_search(GeometricSpace::minkowski(3), 2.0, DensityConstraint::None);
    REQUIRE_FALSE(witnesses.empty());
    const Witness& top = witnesses.front();
    CHECK(top.report.lhs == Approx(3.0).margin(1e-9));
    CHECK(top.report.lhs > top.report.bound + 1e-9);

    // witness invariants: valid state, nonnegative weights, report re-verifies
    double qnorm = 0.0, hnorm = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(top.weights[i] >= -1e-12);
        qnorm += static_cast<double>(top.signature.sign(i)) * top.weights[i];
        hnorm += top.weights[i];
    }
    CHECK(qnorm == Approx(1.0).margin(1e-9));
    CHECK(hnorm <= 2.0 + 1e-9);

    const BellReport redo = bell_check(top.columns, top.state(),
                                       Isometry::identity(top.signature));
    CHECK(redo.lhs == Approx(top.report.lhs).margin(1e-9));

    // descending and deterministic order
    for (std::size_t i = 1; i < witnesses.size(); ++i) {
        const bool sorted = witnesses[i - 1].report.lhs > witnesses[i].report.lhs ||
                            (witnesses[i - 1].report.lhs == witnesses[i].report.lhs &&
                             witnesses[i - 1].pattern < witnesses[i].pattern);
        CHECK(sorted);
    }
}

TEST_CASE("search optimum matches vertex enumeration of the weight polytope") {
    // Independent oracle: the objective |exy - eyz| + exz is convex in the
    // weights, so its maximum over {p >= 0, sum g_i p_i = 1, sum p_i <= cap}
    // sits on a vertex. Vertices are basic solutions of three active
    // constraints from {equality, cap, p_i = 0}; enumerate them all, for all
    // 2^9 sign patterns, and take the best.
    const GeometricSpace m3 = GeometricSpace::minkowski(3);
    const double cap = 2.0;
    const std::array<double, 3> g = {1.0, 1.0, -1.0};

    double best = -1e300;
    for (unsigned pattern = 0; pattern < 512; ++pattern) {
        std::array<std::array<double, 3>, 3> w{};  // [row][column]
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i)
                w[i][j] = (pattern >> (j * 3 + i)) & 1u ? 1.0 : -1.0;

        // candidate vertices: intersect the equality with {cap} or {p_i = 0}
        // pairs, and with pairs of {p_i = 0}
        std::vector<std::array<double, 3>> candidates;
        for (std::size_t z1 = 0; z1 < 3; ++z1)
            for (std::size_t z2 = z1 + 1; z2 < 3; ++z2) {
                // p_{z1} = p_{z2} = 0, equality pins the third
                std::array<double, 3> p{};
                const std::size_t free = 3 - z1 - z2;
                if (g[free] > 0.0) {
                    p[free] = 1.0;
                    candidates.push_back(p);
                }
            }
        for (std::size_t z = 0; z < 3; ++z)
            for (std::size_t a = 0; a < 3; ++a) {
                if (a == z) continue;
                const std::size_t b = 3 - z - a;
                // p_z = 0, g_a p_a + g_b p_b = 1, p_a + p_b = cap
                const double det = g[a] - g[b];
                if (det == 0.0) continue;
                std::array<double, 3> p{};
                p[a] = (1.0 - g[b] * cap) / det;
                p[b] = cap - p[a];
                if (p[a] < -1e-12 || p[b] < -1e-12) continue;
                candidates.push_back(p);
            }
        for (const auto& p : candidates) {
            double sum = 0.0, qsum = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                sum += p[i];
                qsum += g[i] * p[i];
            }
            if (sum > cap + 1e-9 || std::abs(qsum - 1.0) > 1e-9) continue;
            double exy = 0.0, eyz = 0.0, exz = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                exy += g[i] * w[i][0] * w[i][1] * p[i];
                eyz += g[i] * w[i][1] * w[i][2] * p[i];
                exz += g[i] * w[i][0] * w[i][2] * p[i];
            }
            best = std::max(best, std::abs(exy - eyz) + exz);
        }
    }

    const auto witnesses = violation_search(m3, cap, DensityConstraint::None);
    REQUIRE_FALSE(witnesses.empty());
    CHECK(witnesses.front().report.lhs == Approx(best).margin(1e-9));
    CHECK(best == Approx(3.0).margin(1e-12));
}

TEST_CASE("violation search is empty in Hilbert space") {
    CHECK(violation_search(GeometricSpace::hilbert(3), 2.0, DensityConstraint::None).empty());
}

TEST_CASE("violation search rejects bad inputs") {
    CHECK_THROWS_AS(violation_search(GeometricSpace::minkowski(9), 2.0, DensityConstraint::None),
                    DimensionError);
    CHECK_THROWS_AS(violation_search(GeometricSpace({1, 1, -1, -1}), 2.0,
                                     DensityConstraint::None),
                    GeometryError);
    CHECK_THROWS_AS(violation_search(GeometricSpace::minkowski(3), 0.5, DensityConstraint::None),
                    PreconditionError);
}

TEST_CASE("triple nonnegativity forbids violations") {
    CHECK(violation_search(GeometricSpace::minkowski(3), 2.0, DensityConstraint::TripleNonneg)
              .empty());
}

TEST_CASE("constrained search results re-verify") {
    const auto witnesses = violation_search(GeometricSpace::minkowski(5), 5.0 / 3.0,
                                            DensityConstraint::PairwiseNonneg);
    for (const Witness& wit : witnesses) {
        const BellReport redo =
            bell_check(wit.columns, wit.state(), Isometry::identity(wit.signature));
        CHECK(redo.lhs == Approx(wit.report.lhs).margin(1e-9));
        CHECK(redo.pairwise_nonneg[0]);
        CHECK(redo.pairwise_nonneg[1]);
        CHECK(redo.pairwise_nonneg[2]);
        CHECK(redo.lhs > redo.bound + 1e-9);
    }
}

TEST_CASE("hilbert feasibility of the feynman marginals") {
    const EigenvalueMatrix table{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    const std::vector<OutcomeTarget> targets = {
        {0, {1.0}, 0.25},  // Pr{X = +1} = 1/4
        {1, {1.0}, 0.0},   // Pr{Y = +1} = 0
    };
    const FeasibilityResult res = hilbert_feasibility(table, targets);
    REQUIRE(res.feasible);
    // verify the certificate by substitution
    double total = 0.0, px = 0.0, py = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(res.p[i] >= -1e-9);
        total += res.p[i];
        if (table(i, 0) == 1.0) px += res.p[i];
        if (table(i, 1) == 1.0) py += res.p[i];
    }
    CHECK(total == Approx(1.0).margin(1e-9));
    CHECK(px == Approx(0.25).margin(1e-9));
    CHECK(py == Approx(0.0).margin(1e-9));
}

TEST_CASE("contradictory joint targets are infeasible") {
    const EigenvalueMatrix table{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    const std::vector<OutcomeTarget> targets = {
        {std::nullopt, {-1.0, -1.0}, 1.0},
        {std::nullopt, {1.0, 1.0}, 1.0},
    };
    CHECK_FALSE(hilbert_feasibility(table, targets).feasible);
}

TEST_CASE("empty target list is trivially feasible") {
    const EigenvalueMatrix table{{-1, -1}, {1, 1}};
    const FeasibilityResult res = hilbert_feasibility(table, {});
    REQUIRE(res.feasible);
    CHECK(res.p == std::vector<double>{0.5, 0.5});
}

TEST_CASE("malformed targets are rejected") {
    const EigenvalueMatrix table{{-1, -1}, {1, 1}};
    CHECK_THROWS_AS(hilbert_feasibility(table, {{0, {1.0}, 1.5}}), PreconditionError);
    CHECK_THROWS_AS(hilbert_feasibility(table, {{std::nullopt, {1.0}, 0.5}}), PreconditionError);
    CHECK_THROWS_AS(hilbert_feasibility(table, {{5, {1.0}, 0.5}}), PreconditionError);
}
