#include "feynpde/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace feynpde {

Rational rational_from_string(const std::string& s) {
    require(!s.empty(), "empty rational literal");
    mpq_class q;
    if (q.set_str(s, 10) != 0) fail("malformed rational literal: '" + s + "'");
    q.canonicalize();
    return q;
}

std::string rational_to_string(const Rational& r) {
    return r.get_str();
}

VarAlphabet::VarAlphabet(int n_alpha, int n_s, int n_z)
    : n_alpha_(n_alpha), n_s_(n_s), n_z_(n_z) {
    require(n_alpha >= 0 && n_s >= 0 && n_z >= 0, "negative alphabet block size");
}

int VarAlphabet::alpha_var(int i) const {
    require(i >= 0 && i < n_alpha_, "alpha variable index out of range");
    return i;
}

int VarAlphabet::s_var(int i) const {
    require(i >= 0 && i < n_s_, "s variable index out of range");
    return n_alpha_ + i;
}

int VarAlphabet::z_var(int i) const {
    require(i >= 0 && i < n_z_, "z variable index out of range");
    return n_alpha_ + n_s_ + i;
}

Block VarAlphabet::block_of(int var) const {
    require(var >= 0 && var < size(), "variable index out of range");
    if (var < n_alpha_) return Block::alpha;
    if (var < n_alpha_ + n_s_) return Block::s;
    return Block::z;
}

bool VarAlphabet::in_block(int var, Block b) const {
    Block ours = block_of(var);
    switch (b) {
        case Block::all: return true;
        case Block::sz: return ours == Block::s || ours == Block::z;
        default: return ours == b;
    }
}

std::string VarAlphabet::name(int var) const {
    Block b = block_of(var);
    if (b == Block::alpha) return "a" + std::to_string(var + 1);
    if (b == Block::s) return "s" + std::to_string(var - n_alpha_ + 1);
    return "z" + std::to_string(var - n_alpha_ - n_s_ + 1);
}

AlphabetPtr make_alphabet(int n_alpha, int n_s, int n_z) {
    return std::make_shared<const VarAlphabet>(n_alpha, n_s, n_z);
}

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
    long da = 0, db = 0;
    for (auto e : a) da += e;
    for (auto e : b) db += e;
    if (da != db) return da < db;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return a.size() < b.size();
}

Poly Poly::constant(AlphabetPtr alph, const Rational& c) {
    Poly p(std::move(alph));
    if (c != 0) p.terms_.emplace(Exponents(p.alph_->size(), 0), c);
    return p;
}

Poly Poly::variable(AlphabetPtr alph, int var) {
    Exponents e(alph->size(), 0);
    require(var >= 0 && var < alph->size(), "variable index out of range");
    e[var] = 1;
    return monomial(std::move(alph), std::move(e), 1);
}

Poly Poly::monomial(AlphabetPtr alph, Exponents e, const Rational& c) {
    require(static_cast<int>(e.size()) == alph->size(), "exponent vector length mismatch");
    Poly p(std::move(alph));
    if (c != 0) p.terms_.emplace(std::move(e), c);
    return p;
}

void Poly::check_compatible(const Poly& o) const {
    if (alph_ == o.alph_) return;
    require(alph_ && o.alph_ && *alph_ == *o.alph_, "polynomial alphabet mismatch");
}

Poly Poly::operator-() const {
    Poly r(alph_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    r -= o;
    return r;
}

void Poly::add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator*(const Poly& o) const {
    check_compatible(o);
    Poly r(alph_);
    if (terms_.empty() || o.terms_.empty()) return r;
    const int n = alph_->size();
    Exponents e(n);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (int i = 0; i < n; ++i) {
                unsigned sum = static_cast<unsigned>(ea[i]) + eb[i];
                require(sum <= 0xFFFF, "exponent overflow in multiplication");
                e[i] = static_cast<std::uint16_t>(sum);
            }
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

bool Poly::operator==(const Poly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    auto it = terms_.begin();
    auto jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt)
        if (it->first != jt->first || it->second != jt->second) return false;
    return true;
}

Poly Poly::scale(const Rational& c) const {
    Poly r(alph_);
    if (c == 0) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

Poly Poly::pow(unsigned e) const {
    Poly result = Poly::constant(alph_, 1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1u) result = result * base;
        base = (e >>= 1) ? base * base : base;
    }
    return result;
}

Poly Poly::mul_monomial(const Exponents& shift, const Rational& c) const {
    require(static_cast<int>(shift.size()) == alph_->size(), "exponent vector length mismatch");
    Poly r(alph_);
    if (c == 0) return r;
    const int n = alph_->size();
    for (const auto& [e, v] : terms_) {
        Exponents ne(n);
        for (int i = 0; i < n; ++i) {
            unsigned sum = static_cast<unsigned>(e[i]) + shift[i];
            require(sum <= 0xFFFF, "exponent overflow in monomial shift");
            ne[i] = static_cast<std::uint16_t>(sum);
        }
        r.terms_.emplace(std::move(ne), v * c);
    }
    return r;
}

Poly Poly::partial_derivative(int var) const {
    require(alph_ && var >= 0 && var < alph_->size(), "unknown variable in partial_derivative");
    Poly r(alph_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents ne = e;
        ne[var] -= 1;
        r.terms_.emplace(std::move(ne), c * e[var]);
    }
    return r;
}

int Poly::block_degree_of(const Exponents& e, Block b) const {
    int d = 0;
    for (int i = 0; i < static_cast<int>(e.size()); ++i)
        if (e[i] != 0 && alph_->in_block(i, b)) d += e[i];
    return d;
}

int Poly::degree(Block b) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, block_degree_of(e, b));
    return d;
}

std::optional<int> Poly::is_homogeneous(Block b) const {
    if (terms_.empty()) return 0; // zero is homogeneous of every degree
    std::optional<int> d;
    for (const auto& [e, c] : terms_) {
        int t = block_degree_of(e, b);
        if (!d) d = t;
        else if (*d != t) return std::nullopt;
    }
    return d;
}

bool Poly::divisible_by_var(int var) const {
    require(alph_ && var >= 0 && var < alph_->size(), "unknown variable");
    for (const auto& [e, c] : terms_)
        if (e[var] == 0) return false;
    return true;
}

Poly Poly::divide_by_var(int var) const {
    require(divisible_by_var(var), "polynomial not divisible by " + alph_->name(var));
    Poly r(alph_);
    for (const auto& [e, c] : terms_) {
        Exponents ne = e;
        ne[var] -= 1;
        r.terms_.emplace(std::move(ne), c);
    }
    return r;
}

Poly Poly::substitute(const std::map<int, Poly>& assignment) const {
    Poly result(alph_);
    for (const auto& [e, c] : terms_) {
        Poly term = Poly::constant(alph_, c);
        for (int i = 0; i < static_cast<int>(e.size()); ++i) {
            if (e[i] == 0) continue;
            auto it = assignment.find(i);
            if (it == assignment.end()) {
                fail("substitute: no assignment for variable " + alph_->name(i));
            }
            term = term * it->second.pow(e[i]);
        }
        result += term;
    }
    return result;
}

Rational Poly::evaluate(const std::vector<Rational>& point) const {
    require(static_cast<int>(point.size()) == (alph_ ? alph_->size() : 0),
            "evaluation point length mismatch");
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < static_cast<int>(e.size()); ++i)
            for (int k = 0; k < e[i]; ++k) t *= point[i];
        acc += t;
    }
    return acc;
}

Rational Poly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

std::string Poly::render() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) { out << "-"; a = -a; }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_vars = false;
        for (auto x : e) has_vars = has_vars || x != 0;
        std::ostringstream vars;
        bool firstv = true;
        for (int i = 0; i < static_cast<int>(e.size()); ++i) {
            if (e[i] == 0) continue;
            if (!firstv) vars << "*";
            firstv = false;
            vars << alph_->name(i);
            if (e[i] > 1) vars << "^" << e[i];
        }
        if (!has_vars) {
            out << rational_to_string(a);
        } else if (a == 1) {
            out << vars.str();
        } else {
            out << rational_to_string(a) << "*" << vars.str();
        }
    }
    return out.str();
}

namespace {

void enum_degree(const std::vector<int>& vars, std::size_t pos, int remaining,
                 Exponents& scratch, std::vector<Exponents>& out) {
    if (pos + 1 == vars.size()) {
        scratch[vars[pos]] = static_cast<std::uint16_t>(remaining);
        out.push_back(scratch);
        scratch[vars[pos]] = 0;
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        scratch[vars[pos]] = static_cast<std::uint16_t>(e);
        enum_degree(vars, pos + 1, remaining - e, scratch, out);
    }
    scratch[vars[pos]] = 0;
}

std::vector<int> block_vars(const VarAlphabet& alph, Block b) {
    std::vector<int> vars;
    for (int i = 0; i < alph.size(); ++i)
        if (alph.in_block(i, b)) vars.push_back(i);
    return vars;
}

} // namespace

std::vector<Exponents> monomials_of_degree(const VarAlphabet& alph, Block b, int d) {
    require(d >= 0, "monomials_of_degree: negative degree");
    std::vector<Exponents> out;
    if (d == 0) {
        out.emplace_back(alph.size(), 0);
        return out;
    }
    std::vector<int> vars = block_vars(alph, b);
    if (vars.empty()) return out;
    Exponents scratch(alph.size(), 0);
    enum_degree(vars, 0, d, scratch, out);
    return out;
}

std::vector<Exponents> monomials_up_to_degree(const VarAlphabet& alph, Block b, int d) {
    std::vector<Exponents> out;
    for (int t = d; t >= 0; --t) {
        auto part = monomials_of_degree(alph, b, t);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

} // namespace feynpde
