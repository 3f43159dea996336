#pragma once

#include <vector>

#include "qcl/hurwitz.hpp"

namespace qcl {

// Degree-5 cardinal B-spline with knots 0, 1, ..., 6 (C^4, integral 1).
Rational bspline5(const Rational& x);
double bspline5(double x);

// t -> B(offset + scale * t) for t >= 0.
struct SplineBump {
    Rational offset, scale;
    Rational operator()(const Rational& t) const { return bspline5(offset + scale * t); }
    double eval(double t) const;
    // Knots of the bump in t, clipped to [0, support end].
    std::vector<Rational> knots() const;
    // Exact integral of t * bump(t) over t >= 0.
    Rational first_moment() const;
};

// Phi(x, y) = phi1(nrd x) * phi2(nrd y) at the archimedean place, times the
// indicator of the Hurwitz order in both variables at the finite places.
struct DeltaTestFn {
    SplineBump phi1, phi2;
    Rational rho2;  // both bumps vanish for arguments >= rho2

    // phi1(t) = B(3 + 3t), phi2(t) = B(6t), rho2 = 1.
    static DeltaTestFn standard();
    void validate() const;
    Rational at_norms(const Rational& nx, const Rational& ny) const { return phi1(nx) * phi2(ny); }

    // F_2(Phi)(0, xi) with the trace-pairing character and the measure giving
    // the Hurwitz order covolume 1; depends on nrd(xi) only.
    double F2_zero_pi2_coefficient() const;  // F_2(Phi)(0,0) / pi^2
    double F2_zero() const;
    double F2(double nrd_xi) const;
};

struct DeltaResult {
    HurwitzQuat alpha;
    Rational Q;
    Rational difference;           // exact
    i64 first_terms, second_terms;  // nonzero terms of the two sums
    bool certificate_ok;            // delta -> alpha delta^{-1} pairs the nonzero terms
    // alpha = 0 only:
    double b_term = 0;        // sum over the dual lattice of F_2(Phi)(0, Q xi)
    double F2_zero = 0;
    double ratio = 0;         // Q^{-4} difference / F_2(Phi)(0,0)
    double poisson_residual = 0;  // |b_term - Q^{-4} difference| / |b_term|
};

DeltaResult delta_sum(const HurwitzQuat& alpha, const Rational& Q, const DeltaTestFn& phi = DeltaTestFn::standard(),
                      i64 budget = 200000000);

// b_{Phi,Q}, truncated at frequencies |2 Q xi| <= rho_max.
double b_term(const Rational& Q, const DeltaTestFn& phi = DeltaTestFn::standard(), double rho_max = 120);

// Number of Hurwitz elements of each reduced norm 0..max_norm, by enumeration.
std::vector<i64> norm_histogram(i64 max_norm);

struct DualAudit {
    bool dual_is_inverse_of_one_plus_i;  // O^# = (1+i)^{-1} O
    bool double_dual_is_order;           // O^## = O
    i64 index;                           // [O^# : O]
};
DualAudit dual_lattice_audit();

struct PoissonResult {
    Rational scale;
    double lhs, rhs, rel_err;
};
// sum_{gamma in O} g(gamma / s) against 2 s^4 sum_{xi in O^#} g^(s xi) for the
// separable Gaussian g(y) = exp(-pi (y0^2 + 2 y1^2 + 3 y2^2 + y3^2 / 2)).
PoissonResult poisson_check(const Rational& scale);

}  // namespace qcl
