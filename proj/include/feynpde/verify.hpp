#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feynpde/pde.hpp"
#include "feynpde/reduction.hpp"
#include "feynpde/symanzik.hpp"

namespace feynpde {

struct CertifyResult {
    std::optional<GriffithsCertificate> certificate;
    std::string failure;     // empty on success
    Poly residual_r;         // inconsistent part of the ideal condition
    Poly residual_reduced;   // inconsistent part of the divergence condition
    bool ok() const { return certificate.has_value(); }
};

// Independent certification of an operator pair: recomputes R and R~ from the
// operators alone and solves the joint witness problem
//   R = sum lambda_nu dQ/da_nu,  sum d lambda_nu/da_nu = R~,  a_nu | lambda_nu.
// Never consults how the pair was produced. The search walks structured
// ansatz tiers lambda_nu = a_nu U^t mu_nu from the largest t downward; the
// final tier t=0 is the fully general ansatz, so the search is complete.
CertifyResult certify(const Diagram& d, const InvariantBasis& basis, const OperatorPair& pair);
CertifyResult certify(const Diagram& d, const DiagramPolys& ctx, const OperatorPair& pair);

// Euclidean evaluation point and numeric controls. The numeric layer is
// quarantined: floating point is used here and nowhere else.
struct NumericConfig {
    std::vector<Rational> s_point; // one per invariant
    std::vector<Rational> z_point; // one per line (0 for massless)
    int nodes_per_axis = 32;       // Gauss-Legendre nodes per simplex axis
    double step_s = 1e-3;          // finite-difference steps, relative
    double step_z = 1e-3;
    bool richardson = true;        // 3-point Richardson refinement
    int lattice_resolution = 8;    // pole-free sample lattice density
};

// Exact-sign check that Q does not vanish on the integration simplex: Q is
// evaluated in rational arithmetic on the lattice {alpha_i = k_i/m}, all
// vertices and all edge midpoints; every value must carry one sign and clear
// the documented margin |Q| > (1 + sum|s| + sum|z|) / 10^9.
bool pole_free_check(const Diagram& d, const DiagramPolys& ctx, const NumericConfig& cfg);

struct IntegralValue {
    double value = 0;
    double error_estimate = 0; // node-doubling difference
};

// F(s,z) = int_simplex U^a / Q^k over the standard simplex, tensorized
// Gauss-Legendre through the iterated simplex map; the projective volume form
// restricts to (-1)^N times Lebesgue measure on the chart.
IntegralValue evaluate_integral(const Diagram& d, const DiagramPolys& ctx,
                                const NumericConfig& cfg);

// |(principal + tail) F| / max term magnitude, derivatives by central finite
// differences at the configured point.
double numeric_residual(const Diagram& d, const DiagramPolys& ctx, const OperatorPair& pair,
                        const NumericConfig& cfg);

// Quadrature of sign * c_p * int U^a P(S,-alpha U)/Q^{k+p}: the right-hand
// side of the substitution identity, used as an independent cross-check of
// finite differences.
double integral_of_substituted(const Diagram& d, const DiagramPolys& ctx,
                               const SubstitutedOperator& sub, const NumericConfig& cfg);

} // namespace feynpde
