#pragma once

#include "qcl/cyclo.hpp"
#include "qcl/hurwitz.hpp"
#include "qcl/mat2.hpp"
#include "qcl/nonsplit.hpp"

namespace qcl {

// Images of i and j under the splitting used at the odd prime p, modulo p^N:
// i -> [[a, b], [b, -a]], j -> [[0, 1], [-1, 0]], with a^2 + b^2 + 1 = 0 mod p^N.
struct Splitting {
    i64 p;
    int N;
    i64 mod;
    i64 a, b;
    M2 I, J, K;
    i64 inv2;

    Splitting(i64 p, int N);
    M2 operator()(const HurwitzQuat& x) const;
};

Mat2R split_embed(const HurwitzQuat& x, i64 p, int N);

}  // namespace qcl
