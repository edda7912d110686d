#include "feynpde/pde.hpp"

#include <algorithm>
#include <sstream>

#include "feynpde/verify.hpp"

namespace feynpde {

void DiffOperator::add_term(const Exponents& key, const Poly& coeff) {
    require(static_cast<int>(key.size()) == alph_->size(), "derivative key length mismatch");
    for (int i = 0; i < alph_->size(); ++i)
        require(key[i] == 0 || alph_->in_block(i, Block::sz),
                "derivative multi-index must live on the s,z blocks");
    require(coeff.degree(Block::alpha) <= 0, "operator coefficients must not involve alpha");
    if (coeff.is_zero()) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

int DiffOperator::order() const {
    int o = -1;
    for (const auto& [k, c] : terms_) {
        int t = 0;
        for (auto e : k) t += e;
        o = std::max(o, t);
    }
    return o;
}

std::optional<int> DiffOperator::homogeneous_order() const {
    std::optional<int> o;
    for (const auto& [k, c] : terms_) {
        int t = 0;
        for (auto e : k) t += e;
        if (!o)
            o = t;
        else if (*o != t)
            return std::nullopt;
    }
    return o; // no value for the zero operator
}

DiffOperator DiffOperator::operator+(const DiffOperator& o) const {
    DiffOperator r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
}

DiffOperator DiffOperator::scale(const Rational& c) const {
    DiffOperator r(alph_);
    if (c == 0) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v.scale(c));
    return r;
}

DiffOperator DiffOperator::compose_derivative(int var) const {
    require(alph_->in_block(var, Block::sz), "can only compose with d/ds or d/dz");
    DiffOperator r(alph_);
    for (const auto& [k, c] : terms_) {
        Exponents nk = k;
        nk[var] += 1;
        r.terms_.emplace(std::move(nk), c);
    }
    return r;
}

std::string DiffOperator::render() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [k, c] = *it;
        if (!first) out << " + ";
        first = false;
        out << "(" << c.render() << ")";
        for (int i = 0; i < alph_->size(); ++i) {
            if (k[i] == 0) continue;
            out << "*d" << alph_->name(i);
            if (k[i] > 1) out << "^" << k[i];
        }
    }
    return out.str();
}

DiffOperator alpha_to_z_operator(const Poly& p) {
    const AlphabetPtr& alph = p.alphabet();
    DiffOperator op(alph);
    for (const auto& [e, c] : p.terms()) {
        Exponents key(alph->size(), 0);
        Exponents coeff_exp(alph->size(), 0);
        for (int i = 0; i < alph->size(); ++i) {
            if (e[i] == 0) continue;
            if (alph->in_block(i, Block::alpha)) {
                const int zv = alph->z_var(i); // alpha and z blocks share indexing
                key[zv] = e[i];
            } else {
                coeff_exp[i] = e[i];
            }
        }
        op.add_term(key, Poly::monomial(alph, std::move(coeff_exp), c));
    }
    return op;
}

Integer rising_factorial(int k, int p) {
    require(k >= 1 && p >= 0, "rising_factorial needs k >= 1, p >= 0");
    Integer r = 1;
    for (int i = 0; i < p; ++i) r *= k + i;
    return r;
}

SubstitutedOperator substitute_operator(const DiffOperator& op, const DiagramPolys& ctx) {
    require(ctx.regime.valid(),
            "exponent regime violated: need N-(D/2)h >= 1 and N-(D/2)(h+1) >= 0 (k=" +
                std::to_string(ctx.regime.k) + ", a=" + std::to_string(ctx.regime.a) + ")");
    const AlphabetPtr& alph = ctx.alph;
    SubstitutedOperator out;
    out.r = Poly(alph);
    if (op.is_zero()) {
        out.p = 0;
        out.sign = 1;
        return out;
    }
    auto order = op.homogeneous_order();
    require(order.has_value(), "substitute_operator needs a homogeneous-order operator");
    out.p = *order;
    out.sign = (out.p % 2 == 0) ? 1 : -1;

    // Cache of U powers: U^a is always needed; higher powers appear with |J|.
    std::vector<Poly> u_pow{Poly::constant(alph, 1)};
    auto u_power = [&](int e) -> const Poly& {
        while (static_cast<int>(u_pow.size()) <= e) u_pow.push_back(u_pow.back() * ctx.u);
        return u_pow[e];
    };

    for (const auto& [key, coeff] : op.terms()) {
        Poly term = coeff;
        int j_total = 0;
        Exponents alpha_shift(alph->size(), 0);
        for (int i = 0; i < alph->s_count(); ++i) {
            const int sv = alph->s_var(i);
            for (int rep = 0; rep < key[sv]; ++rep) term = term * ctx.s_deriv[i];
        }
        for (int j = 0; j < alph->z_count(); ++j) {
            const int zv = alph->z_var(j);
            if (key[zv] == 0) continue;
            j_total += key[zv];
            alpha_shift[alph->alpha_var(j)] = key[zv];
        }
        const Rational sign = (j_total % 2 == 0) ? 1 : -1;
        term = term.mul_monomial(alpha_shift, sign);
        if (j_total > 0) term = term * u_power(j_total);
        out.r += term;
    }
    out.r = out.r * u_power(ctx.regime.a);
    return out;
}

namespace {

OperatorPair finish_pair(const DiagramPolys& ctx, DiffOperator principal, DiffOperator tail,
                         std::string label) {
    OperatorPair pair;
    pair.order_p = principal.order();
    pair.principal = std::move(principal);
    pair.tail = std::move(tail);
    pair.c_p = rising_factorial(ctx.regime.k, pair.order_p);
    pair.c_pm1 = rising_factorial(ctx.regime.k, pair.order_p - 1);
    pair.label = std::move(label);
    return pair;
}

GriffithsCertificate certify_or_throw(const Diagram& d, const DiagramPolys& ctx,
                                      const OperatorPair& pair) {
    CertifyResult res = certify(d, ctx, pair);
    if (!res.ok())
        fail("internal certification failed for " + pair.label + ": " + res.failure);
    return std::move(*res.certificate);
}

} // namespace

CertifiedSystem theorem1_system_certified(const Diagram& d, const DiagramPolys& ctx) {
    require(ctx.regime.valid(), "exponent regime violated for this diagram/dimension");
    const AlphabetPtr& alph = ctx.alph;
    const int aq = ctx.regime.a + ctx.regime.q;

    CertifiedSystem out;
    for (int i = 0; i < d.line_count(); ++i) {
        // principal: Q_{a_i}(d/dz) . d/dz_i
        DiffOperator principal = alpha_to_z_operator(ctx.q_alpha[i]).compose_derivative(alph->z_var(i));
        // tail: -U(d/dz) - (a+q) d/dz_i . U_{a_i}(d/dz)
        DiffOperator tail = alpha_to_z_operator(ctx.u).scale(-1);
        Poly u_i = ctx.u.partial_derivative(alph->alpha_var(i));
        tail = tail + alpha_to_z_operator(u_i).compose_derivative(alph->z_var(i)).scale(-aq);

        OperatorPair pair = finish_pair(ctx, std::move(principal), std::move(tail),
                                        "thm1[" + d.lines()[i].name + "]");
        out.certificates.push_back(certify_or_throw(d, ctx, pair));
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

std::vector<OperatorPair> theorem1_system(const Diagram& d, const DiagramPolys& ctx) {
    return theorem1_system_certified(d, ctx).pairs;
}

std::vector<OperatorPair> theorem1_system(const Diagram& d, const InvariantBasis& basis) {
    return theorem1_system(d, build_diagram_polys(d, basis));
}

std::vector<std::pair<int, int>> eligible_pairs(const Diagram& d, const DiagramPolys& ctx) {
    PropertyPReport prop = check_property_p(d, ctx.basis);
    if (!prop.holds) {
        std::string msg = "property (P) fails; offending subsets:";
        for (ExtSubset chi : prop.offenders) msg += " " + chi_to_string(d, chi);
        fail(msg);
    }
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < ctx.basis.size(); ++i) {
        if (ctx.s_deriv[i].is_zero()) continue;
        for (int j = 0; j < d.line_count(); ++j)
            if (ctx.s_deriv[i].divisible_by_var(ctx.alph->alpha_var(j))) out.emplace_back(i, j);
    }
    return out;
}

std::vector<std::pair<int, int>> eligible_pairs(const Diagram& d, const InvariantBasis& basis) {
    return eligible_pairs(d, build_diagram_polys(d, basis));
}

CertifiedSystem theorem2_system_certified(const Diagram& d, const DiagramPolys& ctx) {
    require(ctx.regime.valid(), "exponent regime violated for this diagram/dimension");
    const AlphabetPtr& alph = ctx.alph;
    const int c = ctx.regime.a + ctx.regime.q - 1;

    CertifiedSystem out;
    for (const auto& [i, j] : eligible_pairs(d, ctx)) {
        // principal: Q_{a_j}(d/dz) . d/ds_i
        DiffOperator principal = alpha_to_z_operator(ctx.q_alpha[j]).compose_derivative(alph->s_var(i));
        // tail: W_{i,a_j}(d/dz) - (a+q-1) U_{a_j}(d/dz) . d/ds_i
        // (the sign the reduction actually certifies; see module docs)
        Poly w_ij = ctx.s_deriv[i].partial_derivative(alph->alpha_var(j));
        Poly u_j = ctx.u.partial_derivative(alph->alpha_var(j));
        DiffOperator tail = alpha_to_z_operator(w_ij);
        tail = tail + alpha_to_z_operator(u_j).compose_derivative(alph->s_var(i)).scale(-c);

        OperatorPair pair = finish_pair(ctx, std::move(principal), std::move(tail),
                                        "thm2[s" + std::to_string(i + 1) + "," +
                                            d.lines()[j].name + "]");
        out.certificates.push_back(certify_or_throw(d, ctx, pair));
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

std::vector<OperatorPair> theorem2_system(const Diagram& d, const DiagramPolys& ctx) {
    return theorem2_system_certified(d, ctx).pairs;
}

std::vector<OperatorPair> theorem2_system(const Diagram& d, const InvariantBasis& basis) {
    return theorem2_system(d, build_diagram_polys(d, basis));
}

// ---- general order-p derivation ----

DeriveSystem build_derive_system(const Diagram& d, const DiagramPolys& ctx, int order_p,
                                 int coeff_degree) {
    require(order_p >= 1, "derivation order must be >= 1");
    require(coeff_degree >= 0, "coefficient degree bound must be >= 0");
    require(ctx.regime.valid(), "exponent regime violated for this diagram/dimension");
    {
        PropertyPReport prop = check_property_p(d, ctx.basis);
        require(prop.holds, "property (P) fails for this diagram/basis");
    }

    const AlphabetPtr& alph = ctx.alph;
    const int n_alpha = alph->alpha_count();
    const int h = ctx.regime.q - 1;
    const int deg_r = ctx.regime.a * h + ctx.regime.q * order_p;
    const int lambda_deg = deg_r - ctx.regime.q + 1; // includes the a_nu factor
    const int lambda_sz = std::max(coeff_degree - 1, 0);

    DeriveSystem sys;
    sys.order_p = order_p;
    sys.coeff_degree = coeff_degree;
    sys.principal_keys = monomials_of_degree(*alph, Block::sz, order_p);
    sys.tail_keys = monomials_of_degree(*alph, Block::sz, order_p - 1);
    sys.principal_monos = monomials_up_to_degree(*alph, Block::sz, coeff_degree);
    sys.tail_monos = monomials_up_to_degree(*alph, Block::sz, std::max(coeff_degree - 1, 0));
    sys.lambda_monos = monomials_of_degree(*alph, Block::alpha, lambda_deg - 1);
    sys.lambda_sz_monos = monomials_up_to_degree(*alph, Block::sz, lambda_sz);
    sys.n_principal = static_cast<int>(sys.principal_keys.size() * sys.principal_monos.size());
    sys.n_tail = static_cast<int>(sys.tail_keys.size() * sys.tail_monos.size());
    sys.n_lambda = static_cast<int>(n_alpha * sys.lambda_monos.size() * sys.lambda_sz_monos.size());

    // Substituted base polynomial per derivative key: S^I (-alpha)^J U^{|J|+a}.
    std::vector<Poly> u_pow{Poly::constant(alph, 1)};
    auto u_power = [&](int e) -> const Poly& {
        while (static_cast<int>(u_pow.size()) <= e) u_pow.push_back(u_pow.back() * ctx.u);
        return u_pow[e];
    };
    auto substituted_base = [&](const Exponents& key) {
        Poly term = Poly::constant(alph, 1);
        int j_total = 0;
        Exponents alpha_shift(alph->size(), 0);
        for (int i = 0; i < alph->s_count(); ++i)
            for (int rep = 0; rep < key[alph->s_var(i)]; ++rep) term = term * ctx.s_deriv[i];
        for (int j = 0; j < alph->z_count(); ++j) {
            const int zv = alph->z_var(j);
            j_total += key[zv];
            alpha_shift[alph->alpha_var(j)] = key[zv];
        }
        term = term.mul_monomial(alpha_shift, (j_total % 2 == 0) ? Rational(1) : Rational(-1));
        return term * u_power(j_total + ctx.regime.a);
    };

    using RowKey = std::pair<int, Exponents>;
    struct RowKeyLess {
        GrlexLess lex;
        bool operator()(const RowKey& a, const RowKey& b) const {
            if (a.first != b.first) return a.first < b.first;
            return lex(a.second, b.second);
        }
    };
    std::map<RowKey, SparseRow, RowKeyLess> rows;
    auto add_entries = [&](int block, const Poly& poly, const Exponents& shift1,
                           const Exponents& shift2, const Rational& scale, int col) {
        if (scale == 0) return;
        const int n = alph->size();
        for (const auto& [e, cv] : poly.terms()) {
            Exponents key(n);
            for (int x = 0; x < n; ++x) {
                unsigned sum = static_cast<unsigned>(e[x]) + shift1[x] + shift2[x];
                require(sum <= 0xFFFF, "exponent overflow in derivation assembly");
                key[x] = static_cast<std::uint16_t>(sum);
            }
            rows[{block, std::move(key)}].emplace_back(col, cv * scale);
        }
    };

    const Exponents zero(alph->size(), 0);
    int col = 0;
    // Block A rows: R(a) - sum lambda Q_alpha = 0; block B: sum dlambda - R~(b) = 0.
    for (const auto& key : sys.principal_keys) {
        const Poly base = substituted_base(key);
        for (const auto& m : sys.principal_monos) add_entries(0, base, m, zero, 1, col++);
    }
    for (const auto& key : sys.tail_keys) {
        const Poly base = substituted_base(key);
        for (const auto& m : sys.tail_monos) add_entries(1, base, m, zero, -1, col++);
    }
    for (int nu = 0; nu < n_alpha; ++nu) {
        const int avar = alph->alpha_var(nu);
        const Poly a_nu = Poly::variable(alph, avar);
        const Poly cond1_core = a_nu * ctx.q_alpha[nu];
        for (const auto& k : sys.lambda_monos) {
            for (const auto& m : sys.lambda_sz_monos) {
                add_entries(0, cond1_core, k, m, -1, col);
                // d(a_nu a^K)/da_nu = (K_nu + 1) a^K
                add_entries(1, Poly::monomial(alph, k, 1), m, zero, k[avar] + 1, col);
                ++col;
            }
        }
    }
    require(col == sys.cols(), "derive system column count mismatch");

    sys.rows.reserve(rows.size());
    for (auto& [key, row] : rows) {
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseRow merged;
        for (auto& [c, v] : row) {
            if (!merged.empty() && merged.back().first == c)
                merged.back().second += v;
            else
                merged.emplace_back(c, std::move(v));
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const auto& e) { return e.second == 0; }),
                     merged.end());
        if (!merged.empty()) sys.rows.push_back(std::move(merged));
    }
    return sys;
}

namespace {

// Scale to primitive integer entries with positive leading coefficient.
void content_normalize(std::vector<Rational>& v) {
    Integer lcm = 1, gcd_num = 0;
    for (const Rational& x : v) {
        if (x == 0) continue;
        Integer den = x.get_den();
        lcm = lcm / gcd(lcm, den) * den;
    }
    for (Rational& x : v) x *= Rational(lcm);
    for (const Rational& x : v) {
        if (x == 0) continue;
        gcd_num = gcd(gcd_num, Integer(x.get_num()));
    }
    if (gcd_num == 0) return;
    for (Rational& x : v) x /= Rational(gcd_num);
    for (const Rational& x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (Rational& y : v) y = -y;
        break;
    }
}

} // namespace

std::vector<Rational> vectorize_pair(const DiagramPolys& ctx, const DeriveSystem& sys,
                                     const OperatorPair& pair, const std::vector<Poly>& lambdas) {
    const AlphabetPtr& alph = ctx.alph;
    std::vector<Rational> v(sys.cols(), Rational(0));

    auto place_operator = [&](const DiffOperator& op, const std::vector<Exponents>& keys,
                              const std::vector<Exponents>& monos, int offset, const char* what) {
        for (const auto& [key, coeff] : op.terms()) {
            auto kit = std::find(keys.begin(), keys.end(), key);
            require(kit != keys.end(), std::string(what) + ": derivative key outside the ansatz");
            const int kidx = static_cast<int>(kit - keys.begin());
            for (const auto& [e, c] : coeff.terms()) {
                auto mit = std::find(monos.begin(), monos.end(), e);
                require(mit != monos.end(),
                        std::string(what) + ": coefficient monomial outside the ansatz");
                const int midx = static_cast<int>(mit - monos.begin());
                v[offset + kidx * static_cast<int>(monos.size()) + midx] = c;
            }
        }
    };
    place_operator(pair.principal, sys.principal_keys, sys.principal_monos, 0, "principal");
    place_operator(pair.tail, sys.tail_keys, sys.tail_monos, sys.n_principal, "tail");

    require(static_cast<int>(lambdas.size()) == alph->alpha_count(), "one lambda per line expected");
    const int lam_per_nu =
        static_cast<int>(sys.lambda_monos.size() * sys.lambda_sz_monos.size());
    for (int nu = 0; nu < alph->alpha_count(); ++nu) {
        const int avar = alph->alpha_var(nu);
        if (lambdas[nu].is_zero()) continue;
        Poly mu = lambdas[nu].divide_by_var(avar);
        for (const auto& [e, c] : mu.terms()) {
            Exponents alpha_part(alph->size(), 0), sz_part(alph->size(), 0);
            for (int i = 0; i < alph->size(); ++i)
                (alph->in_block(i, Block::alpha) ? alpha_part[i] : sz_part[i]) = e[i];
            auto kit = std::find(sys.lambda_monos.begin(), sys.lambda_monos.end(), alpha_part);
            require(kit != sys.lambda_monos.end(), "lambda: alpha-monomial outside the ansatz");
            auto mit = std::find(sys.lambda_sz_monos.begin(), sys.lambda_sz_monos.end(), sz_part);
            require(mit != sys.lambda_sz_monos.end(), "lambda: (s,z)-monomial outside the ansatz");
            const int idx = sys.n_principal + sys.n_tail + nu * lam_per_nu +
                            static_cast<int>(kit - sys.lambda_monos.begin()) *
                                static_cast<int>(sys.lambda_sz_monos.size()) +
                            static_cast<int>(mit - sys.lambda_sz_monos.begin());
            v[idx] = c;
        }
    }
    return v;
}

DeriveResult derive_general(const Diagram& d, const DiagramPolys& ctx, int order_p,
                            int coeff_degree) {
    DeriveSystem sys = build_derive_system(d, ctx, order_p, coeff_degree);

    IncrementalSolver solver(sys.cols());
    for (const SparseRow& row : sys.rows) solver.add_row(row, Rational(0));
    std::vector<std::vector<Rational>> kernel = solver.nullspace();

    DeriveResult result;
    result.kernel_dimension = static_cast<int>(kernel.size());

    const AlphabetPtr& alph = ctx.alph;
    for (auto& vec : kernel) {
        bool principal_nonzero = false;
        for (int i = 0; i < sys.n_principal && !principal_nonzero; ++i)
            principal_nonzero = vec[i] != 0;
        if (!principal_nonzero) continue; // 0 = 0 tail identities are dropped
        content_normalize(vec);

        DiffOperator principal(alph), tail(alph);
        int col = 0;
        for (const auto& key : sys.principal_keys)
            for (const auto& m : sys.principal_monos) {
                if (vec[col] != 0) principal.add_term(key, Poly::monomial(alph, m, vec[col]));
                ++col;
            }
        for (const auto& key : sys.tail_keys)
            for (const auto& m : sys.tail_monos) {
                if (vec[col] != 0) tail.add_term(key, Poly::monomial(alph, m, vec[col]));
                ++col;
            }

        // The principal block of a kernel vector can still assemble to the
        // zero operator only if coefficients cancel; add_term already merged,
        // so re-check.
        if (principal.is_zero()) continue;

        OperatorPair pair = finish_pair(ctx, std::move(principal), std::move(tail),
                                        "derive[p=" + std::to_string(order_p) + ",#" +
                                            std::to_string(result.pairs.size() + 1) + "]");
        result.certificates.push_back(certify_or_throw(d, ctx, pair));
        result.pairs.push_back(std::move(pair));
    }
    return result;
}

DeriveResult derive_general(const Diagram& d, const InvariantBasis& basis, int order_p,
                            int coeff_degree) {
    return derive_general(d, build_diagram_polys(d, basis), order_p, coeff_degree);
}

} // namespace feynpde
