#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "qcl/padic.hpp"

namespace qcl {

// Integral of psi(tr(Y^2 Z)) over M2(Z_p), evaluated as a finite sum over
// Y mod p^k where p^{-k} bounds the denominators of Z.
CycloSum nonabelian_gauss_integral(const Mat2R& Z, i64 p);

// Closed form of |integral|^2 (p odd, v(tr Z) <= 0), as an exact power of p.
Rational gauss_integral_abs2_formula(const Mat2R& Z, i64 p);

using Mat4Q = std::array<std::array<Rational, 4>, 4>;

struct HessianCert {
    Mat4Q J, R;
    bool identity_ok;
};

// J with tr(Y^2 Z) = Y^t J Y / 2 (Y ordered y11, y12, y21, y22) and the
// diagonalising R; certifies R^t J R = 2r diag(1, -1, 1, det Z), det R = 2r.
HessianCert hessian_matrices(const Mat2R& Z);

struct LocalIntegralRequest {
    i64 p;
    int n;
    std::vector<i64> upsilon;
    Mat2R delta;
    std::vector<Mat2R> gamma;
};

// I_0(delta, gamma) at an odd prime; the phase count runs over Y modulo
// p^{v(nrd delta) + extra_precision}.
CycloSum I0_local(const LocalIntegralRequest& req, int extra_precision = 0);

struct PrimeCaseReport {
    i64 q;
    int n;
    i64 S2 = 0, S3 = 0;
    i64 S2_formula = 0, S3_formula = 0;
    std::map<std::vector<i64>, i64> X2;
    CycloSum I0;
    CycloSum identity_residual;
};

// delta = diag(q, 1), upsilon = 1. gamma entries are read modulo q.
PrimeCaseReport prime_case_report(i64 q, int n, const std::vector<M2>& gamma);
i64 s3_closed_formula(i64 q, int n, const std::vector<M2>& gamma);

// Local data for the W-measure: eta modulo p^k with p^k || nrd(eta), and the
// generator N = eta^dagger N0 eta of eta^dagger (O/p^k) eta.
struct WTable {
    i64 p;
    int k;
    i64 mod;
    M2 eta;
    M2 N;
    // Unit-scaling class of each element X eta of the image, keyed by packed
    // residue; counts[class] = #{Z mod p^k : class meets Z_p Z N}.
    std::map<i64, i64> class_of;
    std::vector<i64> counts;
    i64 denom;  // p^{4k}

    Rational W_of(const M2& M0_eta) const;
    Rational sum() const;  // sum over unit classes
};

WTable build_w_table(const M2& eta, i64 p, int k);
Rational W_measure(const HurwitzQuat& M0, const HurwitzQuat& eta, i64 p);
// Direct evaluation from the definition (sup over mu is attained at any
// primitive mu); used as an independent check.
// `generator` picks N0 among E11, E12, E21, E22 (-1: first that works).
Rational W_measure_direct(const M2& M0, const M2& eta, i64 p, int k, int generator = -1);

struct Thm81Verdict {
    CycloSum I0;
    bool support_ok;
    bool has_witness;
    int witness_slot;  // -1 when none
    Rational W;
    bool bound_ok;
    long double ratio_approx;  // |I0| / bound, 0 when I0 = 0
};

Thm81Verdict thm81_audit(const LocalIntegralRequest& req);

struct Thm81SweepReport {
    i64 p;
    int n;
    M2 delta;
    bool exhaustive;
    i64 cases = 0;
    i64 nonzero = 0;
    i64 zero_outside_support = 0;
    i64 support_violations = 0;
    i64 bound_violations = 0;
    i64 tight = 0;
    long double max_ratio = 0;
    Rational w_sum;
    int w_bound;
};

// Exhaustive over gamma mod nrd(delta) when feasible, otherwise `samples`
// seeded draws (half of them from the support).
Thm81SweepReport thm81_sweep(i64 p, int n, const M2& delta, const std::vector<i64>& upsilon,
                             bool exhaustive, int samples, std::uint64_t seed);

struct CongruenceReport {
    i64 p;
    M2 delta;
    bool exhaustive;
    i64 pairs = 0;
    i64 nonzero = 0;
    i64 violations = 0;
};

// n = 1 congruence check over (Z, gamma).
CongruenceReport congruence_sweep(i64 p, const M2& delta, i64 upsilon, bool exhaustive, int samples,
                            std::uint64_t seed);

}  // namespace qcl
