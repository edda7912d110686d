#include <doctest.h>

#include <random>

#include "feynpde/polynomial.hpp"
#include "oracles.hpp"

using namespace feynpde;

namespace {

AlphabetPtr alpha2() { return make_alphabet(2, 0, 0); }

Poly a(const AlphabetPtr& al, int i) { return Poly::variable(al, al->alpha_var(i)); }

} // namespace

TEST_CASE("rational parsing") {
    CHECK(rational_from_string("3/6") == Rational(1, 2));
    CHECK(rational_from_string("-4") == Rational(-4));
    CHECK(rational_to_string(Rational(-1, 3)) == "-1/3");
    CHECK_THROWS_AS((void)rational_from_string("x/y"), Error);
    CHECK_THROWS_AS((void)rational_from_string(""), Error);
}

TEST_CASE("ring operations on small examples") {
    auto al = alpha2();
    Poly a1 = a(al, 0), a2 = a(al, 1);

    CHECK((a1 + a2) * (a1 - a2) == a1 * a1 - a2 * a2);
    CHECK((a1 + Poly::zero(al)) == a1);
    CHECK(a1.scale(Rational(1, 2)) * a2.scale(Rational(2, 3)) ==
          (a1 * a2).scale(Rational(1, 3)));
}

TEST_CASE("alphabet mismatch is rejected") {
    Poly p = a(alpha2(), 0);
    Poly q = Poly::variable(make_alphabet(3, 0, 0), 0);
    CHECK_THROWS_AS((void)(p + q), Error);
    CHECK_THROWS_AS((void)(p * q), Error);
}

TEST_CASE("ring axioms on random polynomials") {
    auto al = make_alphabet(2, 1, 2);
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 40; ++i) {
        Poly p = oracles::random_poly(al, rng, 4, 3);
        Poly q = oracles::random_poly(al, rng, 4, 3);
        Poly r = oracles::random_poly(al, rng, 4, 3);
        CHECK(p + q == q + p);
        CHECK(p * q == q * p);
        CHECK((p + q) + r == p + (q + r));
        CHECK((p * q) * r == p * (q * r));
        CHECK(p * (q + r) == p * q + p * r);
        CHECK(p - p == Poly::zero(al));
    }
}

TEST_CASE("partial derivative basics and bubble oracle") {
    auto al = alpha2();
    Poly a1 = a(al, 0), a2 = a(al, 1);
    CHECK((a1 * a1 * a2).partial_derivative(0) == (a1 * a2).scale(2));

    auto full = make_alphabet(2, 1, 2); // bubble alphabet
    Poly s1 = Poly::variable(full, full->s_var(0));
    Poly b2 = Poly::variable(full, full->alpha_var(1));
    CHECK((s1 * b2).partial_derivative(full->alpha_var(0)).is_zero());

    // dQ/da1 for the bubble, expanded by hand from
    // Q = s1 a1 a2 - (a1+a2)(a1 z1 + a2 z2).
    Poly b1 = Poly::variable(full, full->alpha_var(0));
    Poly z1 = Poly::variable(full, full->z_var(0));
    Poly z2 = Poly::variable(full, full->z_var(1));
    Poly q = s1 * b1 * b2 - (b1 + b2) * (b1 * z1 + b2 * z2);
    Poly expected = s1 * b2 - (b1 * z1).scale(2) - b2 * z1 - b2 * z2;
    CHECK(q.partial_derivative(full->alpha_var(0)) == expected);

    CHECK_THROWS_AS((void)q.partial_derivative(99), Error);
}

TEST_CASE("derivative is linear and Leibniz on random products") {
    auto al = make_alphabet(3, 1, 1);
    std::mt19937_64 rng(777001);
    for (int i = 0; i < 30; ++i) {
        Poly p = oracles::random_poly(al, rng, 4, 3);
        Poly q = oracles::random_poly(al, rng, 4, 3);
        for (int v = 0; v < al->size(); ++v) {
            CHECK((p + q).partial_derivative(v) ==
                  p.partial_derivative(v) + q.partial_derivative(v));
            CHECK((p * q).partial_derivative(v) ==
                  p.partial_derivative(v) * q + p * q.partial_derivative(v));
        }
    }
}

TEST_CASE("homogeneity queries") {
    auto al = make_alphabet(2, 1, 2);
    Poly a1 = Poly::variable(al, 0), a2 = Poly::variable(al, 1);

    CHECK((a1 + a2).is_homogeneous(Block::alpha) == 1);
    CHECK((a1 + a1 * a2).is_homogeneous(Block::alpha) == std::nullopt);

    Poly s1 = Poly::variable(al, al->s_var(0));
    Poly z1 = Poly::variable(al, al->z_var(0));
    CHECK((s1 * a1 + z1 * a2).is_homogeneous(Block::sz) == 1);
    CHECK((s1 * a1 + z1 * a2).is_homogeneous(Block::alpha) == 1);
    CHECK(Poly::zero(al).is_homogeneous(Block::alpha) == 0);
}

TEST_CASE("divisibility by a variable") {
    auto al = make_alphabet(4, 0, 0);
    Poly a2 = Poly::variable(al, 1), a4 = Poly::variable(al, 3);
    Poly p = a2 * a4;
    CHECK(p.divisible_by_var(1));
    CHECK(p.divide_by_var(1) == a4);
    Poly q = Poly::variable(al, 0) + a2;
    CHECK_FALSE(q.divisible_by_var(0));
    CHECK_THROWS_AS((void)q.divide_by_var(0), Error);
}

TEST_CASE("divisibility roundtrip property") {
    auto al = make_alphabet(3, 0, 1);
    std::mt19937_64 rng(99003);
    for (int i = 0; i < 40; ++i) {
        Poly p = oracles::random_poly(al, rng, 5, 3);
        for (int v = 0; v < al->size(); ++v) {
            if (!p.divisible_by_var(v)) continue;
            CHECK(Poly::variable(al, v) * p.divide_by_var(v) == p);
        }
        Poly vp = Poly::variable(al, 0) * p;
        if (!p.is_zero()) {
            CHECK(vp.divisible_by_var(0));
            CHECK(vp.divide_by_var(0) == p);
        }
    }
}

TEST_CASE("substitute and evaluate") {
    auto al = alpha2();
    Poly a1 = a(al, 0);
    std::map<int, Poly> shift{{0, a1 + Poly::constant(al, 1)}};
    CHECK((a1 * a1).substitute(shift) ==
          a1 * a1 + a1.scale(2) + Poly::constant(al, 1));

    Poly a2 = a(al, 1);
    CHECK_THROWS_AS((void)(a1 * a2).substitute(shift), Error);

    Diagram d = oracles::bubble();
    auto ctx = build_diagram_polys(d, default_basis(d));
    std::vector<Rational> pt(ctx.alph->size(), Rational(0));
    pt[ctx.alph->alpha_var(0)] = 1;
    pt[ctx.alph->alpha_var(1)] = 1;
    CHECK(ctx.u.evaluate(pt) == 2);

    pt[ctx.alph->alpha_var(0)] = Rational(1, 2);
    pt[ctx.alph->alpha_var(1)] = Rational(1, 2);
    pt[ctx.alph->s_var(0)] = -1;
    pt[ctx.alph->z_var(0)] = 1;
    pt[ctx.alph->z_var(1)] = 1;
    CHECK(ctx.q.poly.evaluate(pt) == Rational(-5, 4));
}

TEST_CASE("monomial enumeration in graded-lex order") {
    auto al = make_alphabet(2, 0, 0);
    auto d1 = monomials_of_degree(*al, Block::alpha, 1);
    REQUIRE(d1.size() == 2);
    CHECK(d1[0] == Exponents{1, 0});
    CHECK(d1[1] == Exponents{0, 1});

    auto d2 = monomials_of_degree(*al, Block::alpha, 2);
    REQUIRE(d2.size() == 3);
    CHECK(d2[0] == Exponents{2, 0});
    CHECK(d2[1] == Exponents{1, 1});
    CHECK(d2[2] == Exponents{0, 2});

    auto al3 = make_alphabet(3, 0, 0);
    auto d0 = monomials_of_degree(*al3, Block::alpha, 0);
    REQUIRE(d0.size() == 1);
    CHECK(d0[0] == Exponents{0, 0, 0});
}

TEST_CASE("rendering") {
    auto al = make_alphabet(2, 1, 2);
    Poly a1 = Poly::variable(al, 0), a2 = Poly::variable(al, 1);
    Poly s1 = Poly::variable(al, al->s_var(0));
    Poly z1 = Poly::variable(al, al->z_var(0));
    // Canonical descending graded-lex: a1^2*z1 leads a1*a2*s1.
    CHECK((s1 * a1 * a2 - a1 * a1 * z1).render() == "-a1^2*z1 + a1*a2*s1");
    CHECK(Poly::zero(al).render() == "0");
    CHECK(Poly::constant(al, Rational(-3, 2)).render() == "-3/2");
    CHECK((a1.scale(Rational(1, 3))).render() == "1/3*a1");
}

TEST_CASE("exponent overflow is checked") {
    auto al = make_alphabet(1, 0, 0);
    Exponents big(1, 60000);
    Poly p = Poly::monomial(al, big, 1);
    CHECK_THROWS_AS((void)(p * p), Error);
}
