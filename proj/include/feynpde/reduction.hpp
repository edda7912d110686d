#pragma once

#include <optional>
#include <vector>

#include "feynpde/linalg.hpp"
#include "feynpde/polynomial.hpp"
#include "feynpde/symanzik.hpp"

namespace feynpde {

// Witness for R = sum_nu lambda_nu dQ/da_nu. When the Stokes condition was
// imposed, every lambda_nu is divisible by its a_nu, so the exact form dropped
// during pole reduction integrates to zero over a chain with boundary on the
// coordinate hyperplanes.
struct GriffithsCertificate {
    Poly target_r;
    std::vector<Poly> lambdas;  // one per alpha variable
    Poly reduced;               // sum_nu d lambda_nu / d a_nu
    bool stokes = false;        // divisibility a_nu | lambda_nu imposed and verified
};

// Re-expands the certificate against the given Jacobian generators; exact.
bool check_certificate(const GriffithsCertificate& cert, const std::vector<Poly>& q_alpha);

// gamma = numerator / Q^k * omega with the projective balance k q = deg + N.
struct PoleForm {
    Poly numerator;
    int pole_order = 1;
    QPolynomial denominator;
};

PoleForm make_pole_form(Poly numerator, int pole_order, QPolynomial denominator);

// Ansatz and solve controls for the membership search.
struct MembershipOptions {
    bool alpha_divisibility = true; // lambda_nu = a_nu * (unknowns)
    int sz_degree_bound = 0;        // max (s,z)-degree of the unknown coefficients
    const Poly* u_factor = nullptr; // optional structured factor: lambda_nu = a_nu * U^t * mu_nu
    bool collect_residual = false;  // on inconsistency, keep going and report best effort
    // Residual collection processes every row even after an inconsistency;
    // past this unknown count it is turned off and a failure aborts at the
    // first inconsistent row instead (the search itself stays complete).
    int residual_cap = 8192;
};

struct MembershipResult {
    std::optional<GriffithsCertificate> certificate;
    // Populated on failure when collect_residual was set: the parts of R and
    // Rtilde no ansatz element could match.
    Poly residual_r;
    Poly residual_reduced;
};

// Searches for lambda_nu (alpha-homogeneous, the spec'd general ansatz) with
//   R = sum lambda_nu dQ/da_nu                     (always)
//   sum d lambda_nu / d a_nu = *r_tilde            (when r_tilde is given)
// by collecting coefficients of every (alpha,s,z)-monomial into one exact
// homogeneous-linear solve.
MembershipResult membership_solve(const Poly& r, const Poly* r_tilde,
                                  const std::vector<Poly>& q_alpha, int q_degree,
                                  const MembershipOptions& opts);

// Single-condition entry point: certificate for R in the Jacobian ideal of Q.
std::optional<GriffithsCertificate> ideal_membership(const Poly& r, const QPolynomial& q,
                                                     bool alpha_divisibility,
                                                     int sz_degree_bound = 0);

struct ReductionStep {
    Poly reduced;             // R~ = sum d lambda_nu / d a_nu
    int pole_order = 0;       // k - 1
    Rational bookkeeping;     // 1/(k-1), kept separate from the polynomial
};

// One Griffiths reduction step: R/Q^k omega ~ [1/(k-1)] R~ / Q^{k-1} omega
// modulo an exact form.
ReductionStep griffiths_reduce(const GriffithsCertificate& cert, int k);

struct DphiReport {
    Poly ideal_residual;       // sum lambda_nu dQ/da_nu - R
    Poly divergence_residual;  // sum d lambda_nu / d a_nu - reduced
    bool ok = false;
};

// Verifies the two polynomial identities encoded by the exact-form expansion
// of the reduction step; a mismatch signals an implementation bug.
DphiReport expand_dphi(const GriffithsCertificate& cert, const std::vector<Poly>& q_alpha, int k);

// Degree from which on every homogeneous polynomial lies in an ideal generated
// by n+1 forms without common projective zeros: sum(degrees) - n.
long macaulay_threshold(const std::vector<int>& degrees, int n);

} // namespace feynpde
