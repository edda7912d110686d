#include "feynpde/reduction.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

namespace feynpde {

bool check_certificate(const GriffithsCertificate& cert, const std::vector<Poly>& q_alpha) {
    if (cert.lambdas.size() != q_alpha.size()) return false;
    const AlphabetPtr& alph = cert.target_r.alphabet();
    Poly sum(alph), divergence(alph);
    for (std::size_t nu = 0; nu < q_alpha.size(); ++nu) {
        sum += cert.lambdas[nu] * q_alpha[nu];
        divergence += cert.lambdas[nu].partial_derivative(alph->alpha_var(static_cast<int>(nu)));
    }
    if (sum != cert.target_r || divergence != cert.reduced) return false;
    if (cert.stokes) {
        for (std::size_t nu = 0; nu < cert.lambdas.size(); ++nu)
            if (!cert.lambdas[nu].is_zero() &&
                !cert.lambdas[nu].divisible_by_var(alph->alpha_var(static_cast<int>(nu))))
                return false;
    }
    return true;
}

PoleForm make_pole_form(Poly numerator, int pole_order, QPolynomial denominator) {
    require(pole_order >= 1, "pole order must be >= 1");
    const int n_alpha = numerator.alphabet()->alpha_count();
    auto deg = numerator.is_homogeneous(Block::alpha);
    require(deg.has_value(), "pole form numerator must be alpha-homogeneous");
    int p = numerator.is_zero() ? pole_order * denominator.degree_q - n_alpha : *deg;
    require(pole_order * denominator.degree_q == p + n_alpha,
            "projective balance k*q = deg + N violated");
    return PoleForm{std::move(numerator), pole_order, std::move(denominator)};
}

namespace {

int sz_max_degree(const Poly& p) {
    return std::max(0, p.degree(Block::sz));
}

struct UnknownLayout {
    // lambda unknown (nu, K, m): base polynomial exponent shifts
    struct LambdaUnknown {
        int nu;
        Exponents alpha_part; // K
        Exponents sz_part;    // m
    };
    std::vector<LambdaUnknown> unknowns;
};

// One sorted source of matrix entries: the terms of `poly`, shifted by
// `offset`, scaled by `scale`, feeding column `col` of condition `block`.
// Column -1 carries the right-hand side.
struct EntryStream {
    const Poly* poly;
    Exponents offset;
    Rational scale;
    int block;
    int col;
    Poly::TermMap::const_iterator it;
};

struct MergeCursor {
    int stream;
    int block;
    Exponents key;
};

struct CursorGreater {
    GrlexLess lex;
    bool operator()(const MergeCursor& a, const MergeCursor& b) const {
        if (a.block != b.block) return a.block > b.block;
        if (lex(b.key, a.key)) return true;
        if (lex(a.key, b.key)) return false;
        return a.stream > b.stream;
    }
};

} // namespace

MembershipResult membership_solve(const Poly& r, const Poly* r_tilde,
                                  const std::vector<Poly>& q_alpha, int q_degree,
                                  const MembershipOptions& opts) {
    MembershipResult result;
    const AlphabetPtr& alph = r.alphabet();
    const int n_alpha = alph->alpha_count();
    require(static_cast<int>(q_alpha.size()) == n_alpha, "one Jacobian generator per line expected");

    auto r_deg = r.is_homogeneous(Block::alpha);
    require(r_deg.has_value(), "membership target must be alpha-homogeneous");

    // Degree of the lambda ansatz, fixed by alpha-homogeneity of the two
    // conditions. For a zero target the tail condition fixes it instead.
    int lambda_deg;
    if (!r.is_zero()) {
        lambda_deg = *r_deg - q_degree + 1;
        if (lambda_deg < 0) return result;
        if (r_tilde && !r_tilde->is_zero()) {
            auto t_deg = r_tilde->is_homogeneous(Block::alpha);
            if (!t_deg || *t_deg != lambda_deg - 1) return result; // degrees cannot match
        }
    } else if (r_tilde && !r_tilde->is_zero()) {
        auto t_deg = r_tilde->is_homogeneous(Block::alpha);
        if (!t_deg) return result;
        lambda_deg = *t_deg + 1;
    } else {
        // Both targets zero: the all-zero witness.
        GriffithsCertificate cert;
        cert.target_r = r;
        cert.lambdas.assign(n_alpha, Poly::zero(alph));
        cert.reduced = Poly::zero(alph);
        cert.stokes = opts.alpha_divisibility;
        result.certificate = std::move(cert);
        return result;
    }

    // Per-nu structured base: (a_nu if divisibility) * (U^t if given).
    std::vector<Poly> base(n_alpha, Poly::constant(alph, 1));
    for (int nu = 0; nu < n_alpha; ++nu) {
        if (opts.alpha_divisibility)
            base[nu] = Poly::variable(alph, alph->alpha_var(nu));
        if (opts.u_factor) base[nu] = base[nu] * *opts.u_factor;
    }
    const int base_deg = base[0].degree(Block::alpha);
    const int mu_deg = lambda_deg - base_deg;
    if (mu_deg < 0) return result;

    // Per-nu column cores.
    std::vector<Poly> cond1_core(n_alpha, Poly(alph)); // base * dQ/da_nu
    std::vector<Poly> dbase(n_alpha, Poly(alph));      // d base / d a_nu
    for (int nu = 0; nu < n_alpha; ++nu) {
        cond1_core[nu] = base[nu] * q_alpha[nu];
        dbase[nu] = base[nu].partial_derivative(alph->alpha_var(nu));
    }

    const auto k_monos = monomials_of_degree(*alph, Block::alpha, mu_deg);
    const auto sz_monos = monomials_up_to_degree(*alph, Block::sz, opts.sz_degree_bound);

    UnknownLayout layout;
    for (int nu = 0; nu < n_alpha; ++nu)
        for (const auto& k : k_monos)
            for (const auto& m : sz_monos)
                layout.unknowns.push_back({nu, k, m});
    const int ncols = static_cast<int>(layout.unknowns.size());
    const bool collect = opts.collect_residual && ncols <= opts.residual_cap;

    // Lazy row assembly: every column is a union of up to three shifted
    // polynomial streams; rows materialize through a k-way merge in canonical
    // (block, grlex) order, so nothing is stored beyond what elimination sees.
    std::vector<EntryStream> streams;
    auto add_stream = [&](int block, const Poly& p, Exponents offset, Rational scale, int col) {
        if (p.is_zero() || scale == 0) return;
        streams.push_back({&p, std::move(offset), std::move(scale), block, col, p.terms().begin()});
    };
    auto combine = [&](const Exponents& a, const Exponents& b) {
        Exponents e = a;
        for (int i = 0; i < alph->size(); ++i) {
            unsigned sum = static_cast<unsigned>(e[i]) + b[i];
            require(sum <= 0xFFFF, "exponent overflow in membership assembly");
            e[i] = static_cast<std::uint16_t>(sum);
        }
        return e;
    };

    for (int col = 0; col < ncols; ++col) {
        const auto& u = layout.unknowns[col];
        const Exponents shift = combine(u.alpha_part, u.sz_part);
        // Condition 1: sum lambda_nu dQ/da_nu - R = 0
        add_stream(0, cond1_core[u.nu], shift, 1, col);
        if (r_tilde) {
            // Condition 2: sum d lambda_nu/da_nu - R~ = 0, with
            // d(base*K)/da_nu = dbase*K + K_nu * base * K/a_nu.
            add_stream(1, dbase[u.nu], shift, 1, col);
            const int avar = alph->alpha_var(u.nu);
            if (u.alpha_part[avar] > 0) {
                Exponents shift2 = shift;
                shift2[avar] -= 1;
                add_stream(1, base[u.nu], std::move(shift2), u.alpha_part[avar], col);
            }
        }
    }
    const Exponents zero_shift(alph->size(), 0);
    add_stream(0, r, zero_shift, 1, -1);
    if (r_tilde) add_stream(1, *r_tilde, zero_shift, 1, -1);

    std::priority_queue<MergeCursor, std::vector<MergeCursor>, CursorGreater> heap;
    for (int s = 0; s < static_cast<int>(streams.size()); ++s)
        heap.push({s, streams[s].block, combine(streams[s].it->first, streams[s].offset)});

    // Candidate extraction and exact verification; verification is the
    // arbiter, the linear algebra is only the search.
    auto build_lambdas = [&](const std::vector<Rational>& x) {
        std::vector<Poly> lambdas(n_alpha, Poly(alph));
        for (int col = 0; col < ncols; ++col) {
            if (x[col] == 0) continue;
            const auto& u = layout.unknowns[col];
            lambdas[u.nu] += base[u.nu].mul_monomial(combine(u.alpha_part, u.sz_part), x[col]);
        }
        return lambdas;
    };

    // Cheap necessary condition before the full symbolic re-expansion: both
    // identities evaluated at fixed integer points. A true witness always
    // passes; impostors are rejected without polynomial arithmetic.
    const int nvars = alph->size();
    std::vector<std::vector<Rational>> eval_points;
    eval_points.emplace_back(nvars);
    eval_points.emplace_back(nvars);
    for (int v = 0; v < nvars; ++v) {
        eval_points[0][v] = v + 2;
        eval_points[1][v] = 2 * v + 3;
    }
    struct PointData {
        std::vector<Rational> col1, col2; // per-column evaluations
        Rational rhs1, rhs2;
    };
    std::vector<PointData> pd(eval_points.size());
    for (std::size_t pi = 0; pi < eval_points.size(); ++pi) {
        const auto& pt = eval_points[pi];
        std::vector<Rational> core1(n_alpha), dbase_e(n_alpha), base_e(n_alpha);
        for (int nu = 0; nu < n_alpha; ++nu) {
            core1[nu] = cond1_core[nu].evaluate(pt);
            dbase_e[nu] = dbase[nu].evaluate(pt);
            base_e[nu] = base[nu].evaluate(pt);
        }
        auto mono_eval = [&](const Exponents& e) {
            Rational m = 1;
            for (int v = 0; v < nvars; ++v)
                for (int rep = 0; rep < e[v]; ++rep) m *= pt[v];
            return m;
        };
        pd[pi].col1.resize(ncols);
        pd[pi].col2.resize(ncols);
        for (int col = 0; col < ncols; ++col) {
            const auto& u = layout.unknowns[col];
            const Rational shift_val = mono_eval(combine(u.alpha_part, u.sz_part));
            pd[pi].col1[col] = core1[u.nu] * shift_val;
            if (r_tilde) {
                Rational d = dbase_e[u.nu] * shift_val;
                const int avar = alph->alpha_var(u.nu);
                if (u.alpha_part[avar] > 0)
                    d += Rational(u.alpha_part[avar]) * base_e[u.nu] * shift_val / pt[avar];
                pd[pi].col2[col] = d;
            }
        }
        pd[pi].rhs1 = r.evaluate(pt);
        pd[pi].rhs2 = r_tilde ? r_tilde->evaluate(pt) : Rational(0);
    }
    auto quick_check = [&](const std::vector<Rational>& x) {
        for (const auto& p : pd) {
            Rational s1 = 0, s2 = 0;
            for (int col = 0; col < ncols; ++col) {
                if (x[col] == 0) continue;
                s1 += x[col] * p.col1[col];
                if (r_tilde) s2 += x[col] * p.col2[col];
            }
            if (s1 != p.rhs1) return false;
            if (r_tilde && s2 != p.rhs2) return false;
        }
        return true;
    };
    auto verify_candidate = [&](const std::vector<Rational>& x, std::vector<Poly>& lambdas,
                                Poly& sum, Poly& divergence) {
        lambdas = build_lambdas(x);
        // Reuse the precomputed cond1 cores: sum = sum_cols x * shifted core.
        sum = Poly(alph);
        divergence = Poly(alph);
        for (int col = 0; col < ncols; ++col) {
            if (x[col] == 0) continue;
            const auto& u = layout.unknowns[col];
            sum += cond1_core[u.nu].mul_monomial(combine(u.alpha_part, u.sz_part), x[col]);
        }
        for (int nu = 0; nu < n_alpha; ++nu)
            divergence += lambdas[nu].partial_derivative(alph->alpha_var(nu));
        const bool ok1 = sum == r;
        const bool ok2 = r_tilde == nullptr || divergence == *r_tilde;
        return ok1 && ok2;
    };

    IncrementalSolver solver(ncols);
    long plateau = 0, verify_after = std::max(256L, 2L * ncols);
    bool had_inconsistency = false;

    SparseRow row;
    while (!heap.empty()) {
        // Gather every stream entry sharing the minimal (block, key).
        const int block = heap.top().block;
        const Exponents key = heap.top().key;
        row.clear();
        Rational rhs = 0;
        while (!heap.empty() && heap.top().block == block && heap.top().key == key) {
            const int s = heap.top().stream;
            heap.pop();
            EntryStream& st = streams[s];
            const Rational v = st.it->second * st.scale;
            if (st.col < 0)
                rhs += v;
            else
                row.emplace_back(st.col, v);
            if (++st.it != st.poly->terms().end())
                heap.push({s, st.block, combine(st.it->first, st.offset)});
        }
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

        const int rank_before = solver.rank();
        if (!solver.add_row(merged, rhs)) {
            if (!collect) return result;
            had_inconsistency = true;
        }
        plateau = (solver.rank() == rank_before) ? plateau + 1 : 0;

        if (!collect && !had_inconsistency && plateau >= verify_after) {
            auto x = solver.solve();
            if (x && quick_check(*x)) {
                std::vector<Poly> lambdas;
                Poly sum, divergence;
                if (verify_candidate(*x, lambdas, sum, divergence)) {
                    GriffithsCertificate cert;
                    cert.target_r = r;
                    cert.lambdas = std::move(lambdas);
                    cert.reduced = std::move(divergence);
                    cert.stokes = opts.alpha_divisibility;
                    result.certificate = std::move(cert);
                    return result;
                }
            }
            plateau = 0;
            verify_after *= 2;
        }
    }

    auto x = solver.solve(collect);
    if (!x && !collect) return result;

    std::vector<Poly> lambdas;
    Poly sum(alph), divergence(alph);
    bool verified = false;
    if (x && (quick_check(*x) || collect)) {
        verified = verify_candidate(*x, lambdas, sum, divergence);
    } else {
        lambdas.assign(n_alpha, Poly(alph));
    }
    if (verified) {
        GriffithsCertificate cert;
        cert.target_r = r;
        cert.lambdas = std::move(lambdas);
        cert.reduced = std::move(divergence);
        cert.stokes = opts.alpha_divisibility;
        result.certificate = std::move(cert);
        return result;
    }
    if (collect) {
        result.residual_r = r - sum;
        if (r_tilde) result.residual_reduced = *r_tilde - divergence;
    }
    return result;
}

std::optional<GriffithsCertificate> ideal_membership(const Poly& r, const QPolynomial& q,
                                                     bool alpha_divisibility,
                                                     int sz_degree_bound) {
    const AlphabetPtr& alph = r.alphabet();
    std::vector<Poly> q_alpha;
    for (int nu = 0; nu < alph->alpha_count(); ++nu)
        q_alpha.push_back(q.poly.partial_derivative(alph->alpha_var(nu)));

    MembershipOptions opts;
    opts.alpha_divisibility = alpha_divisibility;
    opts.sz_degree_bound = std::max(sz_degree_bound, std::max(0, sz_max_degree(r) - 1));
    return membership_solve(r, nullptr, q_alpha, q.degree_q, opts).certificate;
}

ReductionStep griffiths_reduce(const GriffithsCertificate& cert, int k) {
    require(k >= 2, "griffiths_reduce needs pole order k >= 2");
    const AlphabetPtr& alph = cert.target_r.alphabet();
    Poly divergence(alph);
    for (std::size_t nu = 0; nu < cert.lambdas.size(); ++nu)
        divergence += cert.lambdas[nu].partial_derivative(alph->alpha_var(static_cast<int>(nu)));
    require(divergence == cert.reduced, "certificate reduced part does not match its lambdas");
    return ReductionStep{std::move(divergence), k - 1, Rational(1, k - 1)};
}

DphiReport expand_dphi(const GriffithsCertificate& cert, const std::vector<Poly>& q_alpha, int k) {
    require(k >= 2, "expand_dphi needs pole order k >= 2");
    const AlphabetPtr& alph = cert.target_r.alphabet();
    DphiReport report;
    Poly sum(alph), divergence(alph);
    for (std::size_t nu = 0; nu < q_alpha.size(); ++nu) {
        sum += cert.lambdas[nu] * q_alpha[nu];
        divergence += cert.lambdas[nu].partial_derivative(alph->alpha_var(static_cast<int>(nu)));
    }
    report.ideal_residual = sum - cert.target_r;
    report.divergence_residual = divergence - cert.reduced;
    report.ok = report.ideal_residual.is_zero() && report.divergence_residual.is_zero();
    return report;
}

long macaulay_threshold(const std::vector<int>& degrees, int n) {
    long sum = std::accumulate(degrees.begin(), degrees.end(), 0L);
    return sum - n;
}

} // namespace feynpde
