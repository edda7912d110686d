#include "feynpde/symanzik.hpp"

#include <algorithm>

namespace feynpde {

Regime regime_of(const Diagram& d) {
    const int h = loop_number(d);
    Regime r;
    r.k = d.line_count() - (d.dimension() / 2) * h;
    r.a = d.line_count() - (d.dimension() / 2) * (h + 1);
    r.q = h + 1;
    return r;
}

AlphabetPtr diagram_alphabet(const Diagram& d, int basis_size) {
    return make_alphabet(d.line_count(), basis_size, d.line_count());
}

namespace {

Poly complement_sum(const Diagram& d, const AlphabetPtr& alph,
                    const std::vector<EdgeSubset>& forests) {
    Poly p(alph);
    for (const EdgeSubset& f : forests) {
        Exponents e(alph->size(), 0);
        for (int l = 0; l < d.line_count(); ++l)
            if (!f.contains(l)) e[alph->alpha_var(l)] = 1;
        p.add_term(e, 1);
    }
    return p;
}

} // namespace

Poly u_polynomial(const Diagram& d, const AlphabetPtr& alph) {
    return complement_sum(d, alph, spanning_trees(d));
}

Poly w_polynomial(const Diagram& d, const AlphabetPtr& alph, ExtSubset chi) {
    return complement_sum(d, alph, spanning_2trees(d, chi));
}

std::vector<Rational> gram_coordinates(const Diagram& d, ExtSubset chi, int reference_external) {
    check_chi(d, chi);
    const int ne = d.external_count();
    require(reference_external >= 0 && reference_external < ne, "bad reference vertex");
    const int m = ne - 1;

    // Coefficients of the independent momenta (externals minus the reference)
    // in sum_{i in chi} p_i, after eliminating p_ref by conservation.
    std::vector<long> t(m, 0);
    bool chi_has_ref = (chi >> reference_external) & 1u;
    int idx = 0;
    for (int pos = 0; pos < ne; ++pos) {
        if (pos == reference_external) continue;
        t[idx] = ((chi >> pos) & 1u) ? 1 : 0;
        if (chi_has_ref) t[idx] -= 1;
        ++idx;
    }

    // s(chi) = sum_j t_j^2 g_jj + sum_{j<k} 2 t_j t_k g_jk
    std::vector<Rational> v;
    v.reserve(static_cast<std::size_t>(m) * (m + 1) / 2);
    for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k)
            v.emplace_back(j == k ? t[j] * t[j] : 2 * t[j] * t[k]);
    return v;
}

InvariantBasis make_basis(const Diagram& d, const std::vector<ExtSubset>& subsets) {
    const int ne = d.external_count();
    require(ne >= 2, "invariant basis needs at least two external vertices");
    const int r = ne * (ne - 1) / 2;
    require(static_cast<int>(subsets.size()) == r,
            "invariant basis must have " + std::to_string(r) + " subsets, got " +
                std::to_string(subsets.size()));

    for (std::size_t i = 0; i < subsets.size(); ++i) {
        check_chi(d, subsets[i]);
        for (std::size_t j = i + 1; j < subsets.size(); ++j) {
            require(subsets[i] != subsets[j], "duplicate subset in invariant basis");
            require(subsets[i] != complement_chi(d, subsets[j]),
                    "invariant basis contains a subset and its complement");
        }
    }

    InvariantBasis basis;
    basis.subsets = subsets;
    basis.reference_external = ne - 1; // highest-labelled external vertex
    basis.gram = RationalMatrix(r, r);
    for (int i = 0; i < r; ++i) {
        auto row = gram_coordinates(d, subsets[i], basis.reference_external);
        for (int j = 0; j < r; ++j) basis.gram.at(i, j) = row[j];
    }
    require(determinant(basis.gram) != 0, "invariant family is linearly dependent");
    return basis;
}

InvariantBasis default_basis(const Diagram& d) {
    const int ne = d.external_count();
    require(ne >= 2, "default basis needs at least two external vertices");
    std::vector<ExtSubset> subsets;
    for (int i = 0; i < ne - 1; ++i) subsets.push_back(ExtSubset(1) << i);
    for (int j = 0; j < ne - 1; ++j)
        for (int k = j + 1; k < ne - 1; ++k)
            subsets.push_back((ExtSubset(1) << j) | (ExtSubset(1) << k));
    return make_basis(d, subsets);
}

InvariantBasis ladder_basis(const Diagram& d) {
    require(d.external_count() == 4,
            "ladder basis needs exactly four external vertices, got " +
                std::to_string(d.external_count()));
    std::vector<ExtSubset> subsets = {
        0b0001, 0b0010, 0b0100, 0b1000, // {1},{2},{3},{4}
        0b0011,                         // {1,2}
        0b0110,                         // {2,3}
    };
    return make_basis(d, subsets);
}

std::vector<Rational> reduce_invariant(const Diagram& d, ExtSubset chi, const InvariantBasis& basis) {
    check_chi(d, chi);
    const int r = basis.size();
    auto target = gram_coordinates(d, chi, basis.reference_external);
    // Solve gram^T c = target, i.e. express target in the rows of gram.
    RationalMatrix gt(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) gt.at(i, j) = basis.gram.at(j, i);
    auto c = solve(gt, target);
    require(c.has_value(), "invariant reduction failed (degenerate basis?)");
    return *c;
}

QPolynomial q_polynomial(const Diagram& d, const AlphabetPtr& alph, const InvariantBasis& basis) {
    require(d.connected(), "q_polynomial: diagram is disconnected");
    require(alph->s_count() == basis.size(), "alphabet s-block does not match basis size");

    Poly q(alph);
    // One term per unordered partition {chi, complement}; chi runs over the
    // masks that are numerically smaller than their complement.
    const ExtSubset full = full_external_set(d);
    for (ExtSubset chi = 1; chi < full; ++chi) {
        if (chi > (full & ~chi)) continue; // keep the canonical representative
        Poly w = w_polynomial(d, alph, chi);
        if (w.is_zero()) continue;
        auto coeffs = reduce_invariant(d, chi, basis);
        Poly s_comb(alph);
        for (int i = 0; i < basis.size(); ++i)
            if (coeffs[i] != 0)
                s_comb += Poly::variable(alph, alph->s_var(i)).scale(coeffs[i]);
        q += s_comb * w;
    }

    Poly u = u_polynomial(d, alph);
    Poly mass_sum(alph);
    for (int l = 0; l < d.line_count(); ++l) {
        Exponents e(alph->size(), 0);
        e[alph->alpha_var(l)] = 1;
        e[alph->z_var(l)] = 1;
        mass_sum.add_term(e, 1);
    }
    q -= u * mass_sum;

    QPolynomial result;
    result.poly = std::move(q);
    result.degree_q = loop_number(d) + 1;

    auto alpha_deg = result.poly.is_homogeneous(Block::alpha);
    require(alpha_deg && *alpha_deg == result.degree_q,
            "Q is not alpha-homogeneous of degree h+1");
    auto sz_deg = result.poly.is_homogeneous(Block::sz);
    require(sz_deg && *sz_deg == 1, "Q is not (s,z)-homogeneous of degree 1");
    return result;
}

PropertyPReport check_property_p(const Diagram& d, const std::vector<ExtSubset>& family) {
    PropertyPReport report;
    const ExtSubset full = full_external_set(d);
    auto in_family = [&](ExtSubset chi) {
        for (ExtSubset f : family)
            if (chi == f || chi == (full & ~f)) return true;
        return false;
    };
    AlphabetPtr alph = diagram_alphabet(d, 0);
    for (ExtSubset chi = 1; chi < full; ++chi) {
        if (chi > (full & ~chi)) continue;
        if (in_family(chi)) continue;
        if (!w_polynomial(d, alph, chi).is_zero()) {
            report.holds = false;
            report.offenders.push_back(chi);
        }
    }
    return report;
}

PropertyPReport check_property_p(const Diagram& d, const InvariantBasis& basis) {
    return check_property_p(d, basis.subsets);
}

DiagramPolys build_diagram_polys(const Diagram& d, const InvariantBasis& basis) {
    DiagramPolys ctx;
    ctx.alph = diagram_alphabet(d, basis.size());
    ctx.basis = basis;
    ctx.regime = regime_of(d);
    ctx.u = u_polynomial(d, ctx.alph);
    ctx.q = q_polynomial(d, ctx.alph, basis);
    for (int i = 0; i < basis.size(); ++i)
        ctx.s_deriv.push_back(ctx.q.poly.partial_derivative(ctx.alph->s_var(i)));
    for (int l = 0; l < d.line_count(); ++l)
        ctx.q_alpha.push_back(ctx.q.poly.partial_derivative(ctx.alph->alpha_var(l)));
    return ctx;
}

} // namespace feynpde
