#include "feynpde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace feynpde {

// ---- symbolic certification ----

CertifyResult certify(const Diagram&, const DiagramPolys& ctx, const OperatorPair& pair) {
    CertifyResult result;
    require(ctx.regime.valid(), "exponent regime violated for this diagram/dimension");

    auto p_order = pair.principal.homogeneous_order();
    if (pair.principal.is_zero() || !p_order || *p_order < 1) {
        result.failure = "principal operator must be homogeneous of order >= 1";
        return result;
    }
    const int p = *p_order;
    if (!pair.tail.is_zero()) {
        auto t_order = pair.tail.homogeneous_order();
        if (!t_order || *t_order != p - 1) {
            result.failure = "tail operator must be zero or homogeneous of order p-1";
            return result;
        }
    }
    if (pair.order_p != p) {
        result.failure = "declared order does not match the principal operator";
        return result;
    }
    // Prefactor bookkeeping: c_p / (k+p-1) = c_{p-1} makes the reduced
    // integrals cancel; both values are pinned by k and p.
    if (pair.c_p != rising_factorial(ctx.regime.k, p) ||
        pair.c_pm1 != rising_factorial(ctx.regime.k, p - 1)) {
        result.failure = "prefactors do not match (k+p-1)!/(k-1)! bookkeeping";
        return result;
    }

    const SubstitutedOperator sub_r = substitute_operator(pair.principal, ctx);
    const SubstitutedOperator sub_t = substitute_operator(pair.tail, ctx);

    const int sz_bound = std::max(
        {0, sub_r.r.degree(Block::sz) - 1, sub_t.r.degree(Block::sz)});

    MembershipOptions opts;
    opts.alpha_divisibility = true;
    opts.sz_degree_bound = sz_bound;

    // Tier walk: lambda_nu = a_nu U^t mu_nu from the deepest structured ansatz
    // down to the fully general one (t = 0).
    const int h = ctx.regime.q - 1;
    const int lambda_deg = sub_r.r.is_zero()
                               ? (sub_t.r.is_zero() ? 0 : sub_t.r.degree(Block::alpha) + 1)
                               : sub_r.r.degree(Block::alpha) - ctx.regime.q + 1;
    int t_max = (h >= 1 && lambda_deg >= 1) ? (lambda_deg - 1) / h : 0;

    std::vector<Poly> u_pow{Poly::constant(ctx.alph, 1)};
    for (int t = 1; t <= t_max; ++t) u_pow.push_back(u_pow.back() * ctx.u);

    for (int t = t_max; t >= 0; --t) {
        opts.u_factor = (t > 0) ? &u_pow[t] : nullptr;
        opts.collect_residual = (t == 0);
        MembershipResult mem =
            membership_solve(sub_r.r, &sub_t.r, ctx.q_alpha, ctx.regime.q, opts);
        if (mem.certificate) {
            result.certificate = std::move(mem.certificate);
            return result;
        }
        if (t == 0) {
            result.failure = "no Stokes-divisible witness: the joint linear system is inconsistent";
            result.residual_r = std::move(mem.residual_r);
            result.residual_reduced = std::move(mem.residual_reduced);
        }
    }
    return result;
}

CertifyResult certify(const Diagram& d, const InvariantBasis& basis, const OperatorPair& pair) {
    return certify(d, build_diagram_polys(d, basis), pair);
}

// ---- numeric layer (floating point quarantined below this line) ----

namespace {

std::vector<Rational> full_point(const DiagramPolys& ctx, const NumericConfig& cfg,
                                 const std::vector<Rational>& alpha) {
    const AlphabetPtr& alph = ctx.alph;
    require(static_cast<int>(cfg.s_point.size()) == alph->s_count(),
            "numeric point: one s value per invariant expected");
    require(static_cast<int>(cfg.z_point.size()) == alph->z_count(),
            "numeric point: one z value per line expected");
    std::vector<Rational> point(alph->size(), Rational(0));
    for (int i = 0; i < alph->alpha_count(); ++i) point[alph->alpha_var(i)] = alpha[i];
    for (int i = 0; i < alph->s_count(); ++i) point[alph->s_var(i)] = cfg.s_point[i];
    for (int i = 0; i < alph->z_count(); ++i) point[alph->z_var(i)] = cfg.z_point[i];
    return point;
}

// alpha(k) = k/m over all compositions of m into N parts, plus vertices and
// edge midpoints of the simplex.
std::vector<std::vector<Rational>> simplex_lattice(int n, int m) {
    std::vector<std::vector<Rational>> points;
    std::vector<int> k(n, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos + 1 == n) {
            k[pos] = remaining;
            std::vector<Rational> alpha(n);
            for (int i = 0; i < n; ++i) alpha[i] = Rational(k[i]) / Rational(m);
            points.push_back(std::move(alpha));
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            k[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, m);
    for (int i = 0; i < n; ++i) {
        std::vector<Rational> v(n, Rational(0));
        v[i] = 1;
        points.push_back(std::move(v));
        for (int j = i + 1; j < n; ++j) {
            std::vector<Rational> e(n, Rational(0));
            e[i] = Rational(1, 2);
            e[j] = Rational(1, 2);
            points.push_back(std::move(e));
        }
    }
    return points;
}

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0, p1 = 0, dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1;
            p1 = 0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
            }
            dp = n * (t * p0 - p1) / (t * t - 1);
            double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = 0.5 * (1 - t); // descending t -> ascending x
        w[i] = 1.0 / ((1 - t * t) * dp * dp);
    }
}

// Double-precision snapshot of a polynomial in the alpha variables after
// substituting numeric (s,z) values.
struct AlphaPolyD {
    std::vector<std::pair<std::vector<std::uint16_t>, double>> terms; // alpha exponents only
    int n_alpha = 0;

    double eval(const std::vector<double>& alpha) const {
        double acc = 0;
        for (const auto& [e, c] : terms) {
            double t = c;
            for (int i = 0; i < n_alpha; ++i)
                for (int r = 0; r < e[i]; ++r) t *= alpha[i];
            acc += t;
        }
        return acc;
    }
};

// Pairwise tree reduction for reproducible summation.
double pairwise_sum(std::vector<double>& v) {
    if (v.empty()) return 0;
    std::size_t n = v.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) v[i] += v[i + half];
        n = half;
    }
    return v[0];
}

} // namespace

bool pole_free_check(const Diagram& d, const DiagramPolys& ctx, const NumericConfig& cfg) {
    const int n = d.line_count();
    const auto points = simplex_lattice(n, std::max(2, cfg.lattice_resolution));

    // Documented margin: |Q| > (1 + sum|s| + sum|z|) / 10^9, exact.
    Rational scale = 1;
    for (const Rational& s : cfg.s_point) scale += abs(s);
    for (const Rational& z : cfg.z_point) scale += abs(z);
    const Rational margin = scale / Rational(1000000000);

    int sign = 0;
    for (const auto& alpha : points) {
        Rational qv = ctx.q.poly.evaluate(full_point(ctx, cfg, alpha));
        if (qv == 0) return false;
        const int s = qv > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) return false;
        if (abs(qv) <= margin) return false;
    }
    return true;
}

namespace {

// Shared quadrature driver: integrates numerator(alpha)/Q(alpha)^pole over the
// standard simplex via the iterated map from the unit cube; the volume form
// restricts to (-1)^N times Lebesgue measure on the chart.
double simplex_quadrature(const Diagram& d, const DiagramPolys& ctx, const NumericConfig& cfg,
                          const Poly& numerator, int pole, int nodes,
                          const std::vector<double>& s_shift, const std::vector<double>& z_shift) {
    const int n = d.line_count();
    const int dims = n - 1;
    require(n >= 2, "quadrature needs at least two integration parameters");
    require(dims <= 6, "quadrature dimension too large for the tensorized rule");

    // Freeze (s,z) into double coefficients of alpha-only polynomials.
    const AlphabetPtr& alph = ctx.alph;
    std::vector<double> s_val(alph->s_count()), z_val(alph->z_count());
    for (int i = 0; i < alph->s_count(); ++i) s_val[i] = cfg.s_point[i].get_d() + s_shift[i];
    for (int i = 0; i < alph->z_count(); ++i) z_val[i] = cfg.z_point[i].get_d() + z_shift[i];

    auto freeze = [&](const Poly& p) {
        AlphaPolyD out;
        out.n_alpha = n;
        std::map<std::vector<std::uint16_t>, double> acc;
        for (const auto& [e, c] : p.terms()) {
            double v = c.get_d();
            std::vector<std::uint16_t> ae(n, 0);
            for (int i = 0; i < alph->size(); ++i) {
                if (e[i] == 0) continue;
                if (alph->in_block(i, Block::alpha)) {
                    ae[i] = e[i];
                } else if (alph->in_block(i, Block::s)) {
                    const int si = i - alph->s_var(0);
                    for (int r = 0; r < e[i]; ++r) v *= s_val[si];
                } else {
                    const int zi = i - alph->z_var(0);
                    for (int r = 0; r < e[i]; ++r) v *= z_val[zi];
                }
            }
            acc[ae] += v;
        }
        for (auto& [e, v] : acc) out.terms.emplace_back(e, v);
        return out;
    };
    const AlphaPolyD num_d = freeze(numerator);
    const AlphaPolyD q_d = freeze(ctx.q.poly);

    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);

    const long total = static_cast<long>(std::pow(static_cast<double>(nodes), dims) + 0.5);
    std::vector<double> contributions;
    contributions.reserve(total);

    std::vector<int> idx(dims, 0);
    std::vector<double> alpha(n);
    for (long cell = 0; cell < total; ++cell) {
        long rest = cell;
        for (int i = 0; i < dims; ++i) {
            idx[i] = static_cast<int>(rest % nodes);
            rest /= nodes;
        }
        // Iterated simplex map: alpha_i = u_i * prod_{j<i}(1-u_j).
        double weight = 1, remaining = 1;
        for (int i = 0; i < dims; ++i) {
            const double u = gx[idx[i]];
            alpha[i] = u * remaining;
            weight *= gw[idx[i]] * remaining;
            remaining *= 1 - u;
        }
        alpha[dims] = remaining;
        const double qv = q_d.eval(alpha);
        const double nv = num_d.eval(alpha);
        contributions.push_back(weight * nv / std::pow(qv, pole));
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * pairwise_sum(contributions);
}

} // namespace

IntegralValue evaluate_integral(const Diagram& d, const DiagramPolys& ctx,
                                const NumericConfig& cfg) {
    require(ctx.regime.valid(), "exponent regime violated for this diagram/dimension");
    require(d.line_count() >= 2, "integral evaluation needs N >= 2");
    require(pole_free_check(d, ctx, cfg), "pole-free check failed at the numeric point");

    const Poly numerator = ctx.u.pow(static_cast<unsigned>(ctx.regime.a));
    const std::vector<double> zero_s(ctx.alph->s_count(), 0.0);
    const std::vector<double> zero_z(ctx.alph->z_count(), 0.0);
    IntegralValue out;
    const double coarse = simplex_quadrature(d, ctx, cfg, numerator, ctx.regime.k,
                                             cfg.nodes_per_axis, zero_s, zero_z);
    const double fine = simplex_quadrature(d, ctx, cfg, numerator, ctx.regime.k,
                                           cfg.nodes_per_axis * 2, zero_s, zero_z);
    out.value = fine;
    out.error_estimate = std::abs(fine - coarse);
    return out;
}

double integral_of_substituted(const Diagram& d, const DiagramPolys& ctx,
                               const SubstitutedOperator& sub, const NumericConfig& cfg) {
    require(pole_free_check(d, ctx, cfg), "pole-free check failed at the numeric point");
    const std::vector<double> zero_s(ctx.alph->s_count(), 0.0);
    const std::vector<double> zero_z(ctx.alph->z_count(), 0.0);
    const double integral = simplex_quadrature(d, ctx, cfg, sub.r, ctx.regime.k + sub.p,
                                               cfg.nodes_per_axis, zero_s, zero_z);
    const double c_p = rising_factorial(ctx.regime.k, sub.p).get_d();
    return sub.sign * c_p * integral;
}

namespace {

// Central-difference stencils, O(h^2), per single-variable derivative order.
const std::vector<std::pair<int, double>>& stencil(int m) {
    static const std::vector<std::vector<std::pair<int, double>>> table = {
        {{0, 1.0}},
        {{-1, -0.5}, {1, 0.5}},
        {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
        {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
        {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
    };
    require(m >= 0 && m < static_cast<int>(table.size()),
            "finite-difference order too high (max single-variable order 4)");
    return table[m];
}

struct FdContext {
    const Diagram& d;
    const DiagramPolys& ctx;
    const NumericConfig& cfg;
    Poly numerator;
    // Steps are relative to the parameter magnitude: h_v = step * max(1, |v|).
    std::vector<double> step;
    // F values cached per (level, offset vector over s,z variables).
    std::map<std::pair<int, std::vector<int>>, double> cache;

    void init_steps() {
        const AlphabetPtr& alph = ctx.alph;
        step.assign(alph->s_count() + alph->z_count(), 0.0);
        for (int i = 0; i < alph->s_count(); ++i)
            step[i] = cfg.step_s * std::max(1.0, std::abs(cfg.s_point[i].get_d()));
        for (int i = 0; i < alph->z_count(); ++i)
            step[alph->s_count() + i] =
                cfg.step_z * std::max(1.0, std::abs(cfg.z_point[i].get_d()));
    }

    double f_at(int level, const std::vector<int>& offsets) {
        auto key = std::make_pair(level, offsets);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double scale = std::pow(0.5, level);
        const AlphabetPtr& alph = ctx.alph;
        std::vector<double> s_shift(alph->s_count(), 0.0), z_shift(alph->z_count(), 0.0);
        for (int i = 0; i < alph->s_count(); ++i)
            s_shift[i] = offsets[i] * step[i] * scale;
        for (int i = 0; i < alph->z_count(); ++i)
            z_shift[i] = offsets[alph->s_count() + i] * step[alph->s_count() + i] * scale;
        const double v = simplex_quadrature(d, ctx, cfg, numerator, ctx.regime.k,
                                            cfg.nodes_per_axis, s_shift, z_shift);
        cache.emplace(std::move(key), v);
        return v;
    }

    // d^{I,J} F by tensorized central differences at refinement `level`.
    double derivative_at(const Exponents& key, int level) {
        const AlphabetPtr& alph = ctx.alph;
        const int nvars = alph->s_count() + alph->z_count();
        const double scale = std::pow(0.5, level);

        std::vector<std::pair<std::vector<int>, double>> grid{{std::vector<int>(nvars, 0), 1.0}};
        double denom = 1;
        for (int v = 0; v < nvars; ++v) {
            const int var = (v < alph->s_count()) ? alph->s_var(v)
                                                  : alph->z_var(v - alph->s_count());
            const int m = key[var];
            if (m == 0) continue;
            const double h = step[v] * scale;
            denom *= std::pow(h, m);
            std::vector<std::pair<std::vector<int>, double>> next;
            for (const auto& [off, w] : grid) {
                for (const auto& [shift, sw] : stencil(m)) {
                    auto noff = off;
                    noff[v] += shift;
                    next.emplace_back(std::move(noff), w * sw);
                }
            }
            grid = std::move(next);
        }
        double acc = 0;
        for (const auto& [off, w] : grid) acc += w * f_at(level, off);
        return acc / denom;
    }

    double derivative(const Exponents& key) {
        if (!cfg.richardson) return derivative_at(key, 0);
        const double d0 = derivative_at(key, 0);
        const double d1 = derivative_at(key, 1);
        const double d2 = derivative_at(key, 2);
        const double r1 = (4 * d1 - d0) / 3;
        const double r2 = (4 * d2 - d1) / 3;
        return (16 * r2 - r1) / 15;
    }
};

} // namespace

double numeric_residual(const Diagram& d, const DiagramPolys& ctx, const OperatorPair& pair,
                        const NumericConfig& cfg) {
    require(ctx.regime.valid(), "exponent regime violated for this diagram/dimension");
    require(pole_free_check(d, ctx, cfg), "pole-free check failed at the numeric point");

    FdContext fd{d, ctx, cfg, ctx.u.pow(static_cast<unsigned>(ctx.regime.a)), {}, {}};
    fd.init_steps();

    // Evaluate the (s,z) coefficient polynomials exactly at the point.
    std::vector<Rational> point(ctx.alph->size(), Rational(0));
    for (int i = 0; i < ctx.alph->s_count(); ++i) point[ctx.alph->s_var(i)] = cfg.s_point[i];
    for (int i = 0; i < ctx.alph->z_count(); ++i) point[ctx.alph->z_var(i)] = cfg.z_point[i];

    double total = 0, max_term = 0;
    auto apply = [&](const DiffOperator& op) {
        for (const auto& [key, coeff] : op.terms()) {
            const double c = coeff.evaluate(point).get_d();
            const double deriv = fd.derivative(key);
            const double term = c * deriv;
            total += term;
            max_term = std::max(max_term, std::abs(term));
        }
    };
    apply(pair.principal);
    apply(pair.tail);
    if (max_term == 0) return 0;
    return std::abs(total) / max_term;
}

} // namespace feynpde
