#include <doctest.h>

#include <random>

#include "feynpde/linalg.hpp"

using namespace feynpde;

namespace {

RationalMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    RationalMatrix m(static_cast<int>(rows.size()),
                     rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

std::vector<Rational> matvec(const RationalMatrix& a, const std::vector<Rational>& x) {
    std::vector<Rational> y(a.rows(), Rational(0));
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) y[r] += a.at(r, c) * x[c];
    return y;
}

} // namespace

TEST_CASE("rref: identity and simple rank deficiency") {
    auto id = RationalMatrix::identity(3);
    auto r = rref(id);
    CHECK(r.matrix == id);
    CHECK(r.pivot_columns == std::vector<int>{0, 1, 2});

    auto m = from_rows({{2, 4}, {1, 2}});
    auto r2 = rref(m);
    CHECK(r2.pivot_columns == std::vector<int>{0});
    CHECK(r2.matrix.at(0, 0) == 1);
    CHECK(r2.matrix.at(0, 1) == 2);
    CHECK(r2.matrix.at(1, 0) == 0);
    CHECK(r2.matrix.at(1, 1) == 0);
}

TEST_CASE("rref: random 5x7 built with rank 3") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<long> d(-5, 5);
    RationalMatrix left(5, 3), right(3, 7);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 3; ++c) left.at(r, c) = d(rng);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 7; ++c) right.at(r, c) = d(rng);
    RationalMatrix prod(5, 7);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 7; ++c)
            for (int k = 0; k < 3; ++k) prod.at(r, c) += left.at(r, k) * right.at(k, c);
    CHECK(rref(prod).rank() == 3);
}

TEST_CASE("nullspace: examples") {
    CHECK(nullspace(RationalMatrix::identity(4)).empty());

    RationalMatrix zero(2, 3);
    auto basis = nullspace(zero);
    REQUIRE(basis.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(basis[i][i] == 1);

    auto m = from_rows({{1, 1, 0}, {0, 0, 1}});
    auto ns = nullspace(m);
    REQUIRE(ns.size() == 1);
    CHECK(ns[0] == std::vector<Rational>{-1, 1, 0});
}

TEST_CASE("nullspace vectors are exact kernel elements; rank-nullity") {
    std::mt19937_64 rng(11119);
    std::uniform_int_distribution<long> d(-4, 4);
    std::uniform_int_distribution<long> den(1, 3);
    for (int trial = 0; trial < 20; ++trial) {
        RationalMatrix m(4, 6);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 6; ++c) m.at(r, c) = Rational(d(rng)) / Rational(den(rng));
        auto ns = nullspace(m);
        CHECK(static_cast<int>(ns.size()) + rref(m).rank() == 6);
        for (const auto& v : ns)
            for (const auto& y : matvec(m, v)) CHECK(y == 0);
    }
}

TEST_CASE("rref invariant under row permutation") {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<long> d(-4, 4);
    for (int trial = 0; trial < 10; ++trial) {
        RationalMatrix m(5, 5);
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) m.at(r, c) = d(rng);
        RationalMatrix shuffled(5, 5);
        std::vector<int> perm{3, 0, 4, 2, 1};
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) shuffled.at(r, c) = m.at(perm[r], c);
        CHECK(rref(m).matrix == rref(shuffled).matrix);
    }
}

TEST_CASE("solve: examples") {
    auto id = RationalMatrix::identity(3);
    std::vector<Rational> b{Rational(1, 2), 3, -7};
    auto x = solve(id, b);
    REQUIRE(x.has_value());
    CHECK(*x == b);

    auto inconsistent = from_rows({{1}, {1}});
    CHECK_FALSE(solve(inconsistent, {0, 1}).has_value());

    // Underdetermined: free variables pinned to zero.
    auto wide = from_rows({{1, 1, 0}});
    auto y = solve(wide, {5});
    REQUIRE(y.has_value());
    CHECK(matvec(wide, *y)[0] == 5);
    CHECK((*y)[1] == 0);
    CHECK((*y)[2] == 0);
}

TEST_CASE("solve returns exact solutions on random consistent systems") {
    std::mt19937_64 rng(160901);
    std::uniform_int_distribution<long> d(-5, 5);
    for (int trial = 0; trial < 20; ++trial) {
        RationalMatrix a(4, 5);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 5; ++c) a.at(r, c) = d(rng);
        std::vector<Rational> x0(5);
        for (auto& v : x0) v = Rational(d(rng)) / Rational(3);
        auto b = matvec(a, x0);
        auto x = solve(a, b);
        REQUIRE(x.has_value());
        CHECK(matvec(a, *x) == b);
    }
}

TEST_CASE("determinant") {
    CHECK(determinant(RationalMatrix::identity(5)) == 1);
    auto m = from_rows({{0, 1}, {1, 0}});
    CHECK(determinant(m) == -1);
    auto sing = from_rows({{1, 2}, {2, 4}});
    CHECK(determinant(sing) == 0);
    RationalMatrix q(2, 2);
    q.at(0, 0) = Rational(1, 2);
    q.at(0, 1) = Rational(1, 3);
    q.at(1, 0) = Rational(1, 4);
    q.at(1, 1) = Rational(1, 5);
    CHECK(determinant(q) == Rational(1, 10) - Rational(1, 12));
}

TEST_CASE("incremental solver matches the dense kernel and solve") {
    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<long> d(-4, 4);
    for (int trial = 0; trial < 15; ++trial) {
        RationalMatrix m(6, 5);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 5; ++c) m.at(r, c) = d(rng);

        IncrementalSolver inc(5);
        for (int r = 0; r < 6; ++r) {
            SparseRow row;
            for (int c = 0; c < 5; ++c)
                if (m.at(r, c) != 0) row.emplace_back(c, m.at(r, c));
            inc.add_row(row, Rational(0));
        }
        auto dense_ns = nullspace(m);
        auto inc_ns = inc.nullspace();
        REQUIRE(dense_ns.size() == inc_ns.size());
        for (std::size_t i = 0; i < dense_ns.size(); ++i) CHECK(dense_ns[i] == inc_ns[i]);
        CHECK(inc.rank() == rref(m).rank());
    }
}

TEST_CASE("incremental solver detects inconsistency") {
    IncrementalSolver inc(2);
    CHECK(inc.add_row({{0, Rational(1)}, {1, Rational(1)}}, Rational(2)));
    CHECK_FALSE(inc.add_row({{0, Rational(1)}, {1, Rational(1)}}, Rational(3)));
    CHECK_FALSE(inc.consistent());
    CHECK_FALSE(inc.solve().has_value());
    auto best = inc.solve(true);
    REQUIRE(best.has_value()); // best-effort candidate from the consistent part
    CHECK((*best)[0] + (*best)[1] == 2);
}
