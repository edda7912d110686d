#pragma once

#include <vector>

#include "feynpde/graph.hpp"
#include "feynpde/linalg.hpp"
#include "feynpde/polynomial.hpp"

namespace feynpde {

// A maximal linearly independent family of external-momentum invariants
// s_i = s(chi_i), together with the exact Gram-coordinate matrix that lets any
// s(chi) be re-expressed in the family. Gram coordinates are taken over the
// momenta of the externals minus a fixed reference vertex (eliminated by
// momentum conservation).
struct InvariantBasis {
    std::vector<ExtSubset> subsets;  // chi_1..chi_r, masks over external positions
    RationalMatrix gram;             // r x r; row i = gram coordinates of s(chi_i)
    int reference_external = -1;     // position of the eliminated external vertex

    int size() const { return static_cast<int>(subsets.size()); }
};

struct QPolynomial {
    Poly poly;
    int degree_q = 0; // alpha-degree, h+1 for a connected diagram
};

// Integrand exponent bookkeeping: F = int U^a / Q^k with k = N - (D/2) h,
// a = N - (D/2)(h+1), q = deg Q = h+1.
struct Regime {
    int k = 0;
    int a = 0;
    int q = 0;
    bool valid() const { return k >= 1 && a >= 0; }
};

Regime regime_of(const Diagram& d);

// Alphabet a1..aN | s1..sr | z1..zN for a diagram with a chosen basis size.
AlphabetPtr diagram_alphabet(const Diagram& d, int basis_size);

// First Symanzik polynomial: sum over spanning trees of the complement
// monomials. Homogeneous of alpha-degree h.
Poly u_polynomial(const Diagram& d, const AlphabetPtr& alph);

// Second Symanzik polynomial for the split {chi, complement}: sum over
// separating spanning 2-trees of the complement monomials. Zero when no
// separating 2-tree exists. Homogeneous of alpha-degree h+1.
Poly w_polynomial(const Diagram& d, const AlphabetPtr& alph, ExtSubset chi);

// Gram-coordinate row of s(chi), length nE(nE-1)/2, reference vertex
// eliminated by conservation.
std::vector<Rational> gram_coordinates(const Diagram& d, ExtSubset chi, int reference_external);

// Basis from an explicit family of subsets; validates size, distinctness,
// complement-freeness and Gram invertibility.
InvariantBasis make_basis(const Diagram& d, const std::vector<ExtSubset>& subsets);

// The default family {{i}, {j,k} : i,j,k externals != i0} with i0 the
// highest-labelled external vertex.
InvariantBasis default_basis(const Diagram& d);

// The four-corner family {1},{2},{3},{4},{1,2},{2,3} used for ladders.
InvariantBasis ladder_basis(const Diagram& d);

// Coefficients c with s(chi) = sum_i c_i s(chi_i), exact.
std::vector<Rational> reduce_invariant(const Diagram& d, ExtSubset chi, const InvariantBasis& basis);

// Q = sum over unordered partitions {chi, complement} of
// [reduce_invariant(chi) . s] * W_chi  -  U * sum_i alpha_i z_i.
QPolynomial q_polynomial(const Diagram& d, const AlphabetPtr& alph, const InvariantBasis& basis);

struct PropertyPReport {
    bool holds = true;
    std::vector<ExtSubset> offenders; // canonical representatives with W != 0
};

// Property (P): W_chi = 0 for every chi outside the family and its complements.
PropertyPReport check_property_p(const Diagram& d, const std::vector<ExtSubset>& family);
PropertyPReport check_property_p(const Diagram& d, const InvariantBasis& basis);

// Everything pde/verify need about a diagram, computed once.
struct DiagramPolys {
    AlphabetPtr alph;
    InvariantBasis basis;
    Regime regime;
    Poly u;                     // U
    std::vector<Poly> s_deriv;  // dQ/ds_i, pure alpha, one per basis invariant
    QPolynomial q;              // Q
    std::vector<Poly> q_alpha;  // dQ/da_nu, one per line
};

DiagramPolys build_diagram_polys(const Diagram& d, const InvariantBasis& basis);

} // namespace feynpde
