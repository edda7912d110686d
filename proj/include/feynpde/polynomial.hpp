#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "feynpde/error.hpp"

namespace feynpde {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p", "-p" or "p/q" into a canonical rational.
Rational rational_from_string(const std::string& s);
std::string rational_to_string(const Rational& r);

// Variable blocks of the working alphabet: a1..aN | s1..sr | z1..zN.
enum class Block { alpha, s, z, sz, all };

class VarAlphabet {
public:
    VarAlphabet(int n_alpha, int n_s, int n_z);

    int size() const { return n_alpha_ + n_s_ + n_z_; }
    int alpha_count() const { return n_alpha_; }
    int s_count() const { return n_s_; }
    int z_count() const { return n_z_; }

    int alpha_var(int i) const;   // i-th alpha variable, 0-based
    int s_var(int i) const;
    int z_var(int i) const;

    Block block_of(int var) const;
    bool in_block(int var, Block b) const;
    std::string name(int var) const;

    bool operator==(const VarAlphabet& o) const {
        return n_alpha_ == o.n_alpha_ && n_s_ == o.n_s_ && n_z_ == o.n_z_;
    }

private:
    int n_alpha_, n_s_, n_z_;
};

using AlphabetPtr = std::shared_ptr<const VarAlphabet>;

AlphabetPtr make_alphabet(int n_alpha, int n_s, int n_z);

// Exponent vector, one entry per alphabet variable.
using Exponents = std::vector<std::uint16_t>;

// Graded-lexicographic term order: total degree first, then the earlier
// variable with the larger exponent wins. a1^2 > a1*a2 > a2^2.
struct GrlexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

// Sparse multivariate polynomial with exact rational coefficients.
// Terms are kept in canonical grlex order with no zero coefficients.
class Poly {
public:
    using TermMap = std::map<Exponents, Rational, GrlexLess>;

    Poly() = default; // zero polynomial over an empty alphabet; assign before use
    explicit Poly(AlphabetPtr alph) : alph_(std::move(alph)) {}

    static Poly zero(AlphabetPtr alph) { return Poly(std::move(alph)); }
    static Poly constant(AlphabetPtr alph, const Rational& c);
    static Poly variable(AlphabetPtr alph, int var);
    static Poly monomial(AlphabetPtr alph, Exponents e, const Rational& c);

    const AlphabetPtr& alphabet() const { return alph_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly scale(const Rational& c) const;
    Poly pow(unsigned e) const;

    // Multiply by a single monomial c * x^shift (exponent shift, no term merge).
    Poly mul_monomial(const Exponents& shift, const Rational& c) const;

    Poly partial_derivative(int var) const;

    // Total degree within a block; -1 for the zero polynomial.
    int degree(Block b = Block::all) const;
    std::optional<int> is_homogeneous(Block b) const;

    bool divisible_by_var(int var) const;
    Poly divide_by_var(int var) const;

    // Substitutes polynomials for variables. Every variable occurring in
    // *this must be covered by the assignment.
    Poly substitute(const std::map<int, Poly>& assignment) const;

    // Exact evaluation at a full point (one rational per variable).
    Rational evaluate(const std::vector<Rational>& point) const;

    Rational coeff(const Exponents& e) const;
    void add_term(const Exponents& e, const Rational& c);

    // Human-readable rendering, leading term first: "s1*a1*a2 - a1^2*z1".
    std::string render() const;

private:
    void check_compatible(const Poly& o) const;
    int block_degree_of(const Exponents& e, Block b) const;

    AlphabetPtr alph_;
    TermMap terms_;
};

// All exponent vectors of total degree d supported on the given block,
// in descending lex order (a1^2, a1*a2, a2^2).
std::vector<Exponents> monomials_of_degree(const VarAlphabet& alph, Block b, int d);

// Same, but total degree at most d (degrees d, d-1, ..., 0 in that order).
std::vector<Exponents> monomials_up_to_degree(const VarAlphabet& alph, Block b, int d);

} // namespace feynpde
