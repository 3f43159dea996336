#pragma once

#include <utility>
#include <vector>

#include "qcl/algebra.hpp"

namespace qcl {

// u * p^val with u a unit modulo p^N, or the exact zero (val == inf_val).
struct PadicScaled {
    i64 unit = 0;
    int val = inf_val;
    int N = 0;

    static PadicScaled zero() { return {}; }
    static PadicScaled make(i64 p, i64 unit, int val, int N);
    bool is_zero() const { return val >= inf_val; }
};

struct GaussSumParams {
    i64 p;
    PadicScaled a, t, xi;
};

// Integral of psi((a y^2 + xi y) / t) over the p-adic integers, with
// psi(x) = exp(2 pi i {x}_p).
CycloSum gauss_sum(const GaussSumParams& g);

// psi(u p^v) as a root of unity; requires u known modulo p^{-v}.
CycloSum psi_value(i64 p, const PadicScaled& x);

struct Cartan {
    i64 p;
    int N;
    M2 k1, k2;  // invertible modulo p^N
    int n1, n2; // n1 >= n2; inf_val marks a zero invariant factor
};

// A = k1 diag(p^n1, p^n2) k2 mod p^N by local Smith reduction.
Cartan cartan_decompose(const Mat2R& A, i64 p, int N);
// Same reduction without the nonsingularity check (used internally).
Cartan cartan_reduce(const M2& A, i64 p, int N);

// Z + W with W integral so that |det| >= ||.|| and |tr| >= |2|.
Mat2R normalize_coset_rep(const Mat2R& Z, i64 p);
bool coset_rep_ok(const Mat2R& Y, i64 p);

using IMat = std::vector<std::vector<i64>>;

// A with unit determinant and A^t H A diagonal modulo p^N (p odd).
IMat uniform_diagonalize(const IMat& H, i64 p, int N);

struct ModuleGenerator {
    HurwitzQuat N0;
    i64 order;
};

// Generator of the cyclic module eta^dagger (O_D / p^k) eta, p^k || nrd(eta).
ModuleGenerator module_generator(const HurwitzQuat& eta, i64 p);

}  // namespace qcl
