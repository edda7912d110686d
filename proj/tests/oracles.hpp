// Test-side oracles, kept independent of the library's enumeration and
// assembly paths: brute-force subset filters, adjacency-DFS connectivity,
// Laplacian tree counts, and the shared corpus diagrams.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "feynpde/graph.hpp"
#include "feynpde/linalg.hpp"
#include "feynpde/polynomial.hpp"
#include "feynpde/symanzik.hpp"

namespace oracles {

using namespace feynpde;

// ---- corpus diagrams ----

inline Diagram bubble(int dim = 2) {
    DiagramSpec spec;
    spec.name = "bubble";
    spec.dimension = dim;
    spec.vertices = {{"V1", true}, {"V2", true}};
    spec.lines = {{"l1", "V1", "V2", true}, {"l2", "V1", "V2", true}};
    return build_diagram(spec);
}

inline Diagram single_edge(int dim = 2) {
    DiagramSpec spec;
    spec.name = "edge";
    spec.dimension = dim;
    spec.vertices = {{"V1", true}, {"V2", true}};
    spec.lines = {{"l1", "V1", "V2", true}};
    return build_diagram(spec);
}

inline Diagram triangle(int dim = 2) {
    DiagramSpec spec;
    spec.name = "triangle";
    spec.dimension = dim;
    spec.vertices = {{"V1", true}, {"V2", true}, {"V3", true}};
    spec.lines = {{"l1", "V1", "V2", true}, {"l2", "V2", "V3", true}, {"l3", "V3", "V1", true}};
    return build_diagram(spec);
}

// Four external corners in cyclic order, lines around the cycle.
inline Diagram cyclic_box(int dim = 4) {
    DiagramSpec spec;
    spec.name = "cyclic_box";
    spec.dimension = dim;
    spec.vertices = {{"1", true}, {"2", true}, {"3", true}, {"4", true}};
    spec.lines = {{"l1", "1", "2", true},
                  {"l2", "2", "3", true},
                  {"l3", "3", "4", true},
                  {"l4", "4", "1", true}};
    return build_diagram(spec);
}

// ---- brute-force subset filters (independent of the library enumerator) ----

struct SubsetGraph {
    int n;
    std::vector<std::pair<int, int>> edges;
};

inline SubsetGraph subset_graph(const Diagram& d, std::uint64_t mask) {
    SubsetGraph g{d.vertex_count(), {}};
    for (int l = 0; l < d.line_count(); ++l)
        if ((mask >> l) & 1ull) g.edges.emplace_back(d.lines()[l].a, d.lines()[l].b);
    return g;
}

// Component labels by DFS over the chosen edges.
inline std::vector<int> components_of(const SubsetGraph& g) {
    std::vector<std::vector<int>> adj(g.n);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> comp(g.n, -1);
    int c = 0;
    for (int start = 0; start < g.n; ++start) {
        if (comp[start] != -1) continue;
        std::vector<int> stack{start};
        comp[start] = c;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (comp[w] == -1) {
                    comp[w] = c;
                    stack.push_back(w);
                }
        }
        ++c;
    }
    return comp;
}

inline int component_count(const SubsetGraph& g) {
    auto comp = components_of(g);
    return comp.empty() ? 0 : 1 + *std::max_element(comp.begin(), comp.end());
}

inline bool acyclic(const SubsetGraph& g) {
    // |E| = n - c for a forest.
    return static_cast<int>(g.edges.size()) == g.n - component_count(g);
}

inline std::vector<EdgeSubset> brute_spanning_r_trees(const Diagram& d, int r) {
    std::vector<EdgeSubset> out;
    const int N = d.line_count();
    for (std::uint64_t mask = 0; mask < (1ull << N); ++mask) {
        SubsetGraph g = subset_graph(d, mask);
        if (static_cast<int>(g.edges.size()) != d.vertex_count() - r) continue;
        if (component_count(g) != r) continue;
        if (!acyclic(g)) continue;
        out.push_back({mask});
    }
    std::sort(out.begin(), out.end(), edge_subset_lex_less);
    return out;
}

inline std::vector<EdgeSubset> brute_spanning_trees(const Diagram& d) {
    return brute_spanning_r_trees(d, 1);
}

inline std::vector<EdgeSubset> brute_spanning_2trees(const Diagram& d, ExtSubset chi) {
    std::vector<EdgeSubset> out;
    for (const EdgeSubset& s : brute_spanning_r_trees(d, 2)) {
        auto comp = components_of(subset_graph(d, s.bits));
        int chi_comp = -1, co_comp = -1;
        bool ok = true;
        for (int e = 0; e < d.external_count(); ++e) {
            const int c = comp[d.externals()[e]];
            if ((chi >> e) & 1u) {
                if (chi_comp == -1) chi_comp = c;
                ok = ok && c == chi_comp;
            } else {
                if (co_comp == -1) co_comp = c;
                ok = ok && c == co_comp;
            }
        }
        if (ok && chi_comp != co_comp) out.push_back(s);
    }
    return out;
}

inline Poly complement_monomials(const Diagram& d, const AlphabetPtr& alph,
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

inline Poly brute_u(const Diagram& d, const AlphabetPtr& alph) {
    return complement_monomials(d, alph, brute_spanning_trees(d));
}

inline Poly brute_w(const Diagram& d, const AlphabetPtr& alph, ExtSubset chi) {
    return complement_monomials(d, alph, brute_spanning_2trees(d, chi));
}

// Kirchhoff count: determinant of the Laplacian with row/col `drop` removed.
inline Rational matrix_tree_count(const Diagram& d, int drop) {
    const int n = d.vertex_count();
    RationalMatrix lap(n, n);
    for (const Line& l : d.lines()) {
        if (l.a == l.b) continue;
        lap.at(l.a, l.a) += 1;
        lap.at(l.b, l.b) += 1;
        lap.at(l.a, l.b) -= 1;
        lap.at(l.b, l.a) -= 1;
    }
    RationalMatrix minor(n - 1, n - 1);
    for (int r = 0, rr = 0; r < n; ++r) {
        if (r == drop) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
            if (c == drop) continue;
            minor.at(rr, cc) = lap.at(r, c);
            ++cc;
        }
        ++rr;
    }
    return determinant(minor);
}

// ---- randomized polynomials (fixed-seed generators) ----

inline Poly random_poly(const AlphabetPtr& alph, std::mt19937_64& rng, int max_terms,
                        int max_exp, Block block = Block::all) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> expd(0, max_exp);
    std::uniform_int_distribution<long> numd(-6, 6);
    std::uniform_int_distribution<long> dend(1, 4);
    Poly p(alph);
    const int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        Exponents e(alph->size(), 0);
        for (int v = 0; v < alph->size(); ++v)
            if (alph->in_block(v, block)) e[v] = static_cast<std::uint16_t>(expd(rng));
        long num = numd(rng);
        if (num == 0) num = 1;
        p.add_term(e, Rational(num) / Rational(dend(rng)));
    }
    return p;
}

} // namespace oracles
