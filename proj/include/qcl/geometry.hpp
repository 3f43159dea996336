#pragma once

#include <array>
#include <vector>

#include "qcl/hurwitz.hpp"
#include "qcl/mat2.hpp"

namespace qcl {

// L(W) = {A : WA + AW = 0}. W lives over F_q (Ring::field(q), q odd) or Q.
struct LWSpace {
    Mat2R W;
    int dim;
    std::vector<Mat2R> basis;  // reduced row echelon in the (a11, a12, a21, a22) coordinates
};
LWSpace lw_kernel(const Mat2R& W);
// max(2 * [trd W = 0], [det W = 0]).
int lw_dim_formula(const Mat2R& W);

// Rank of the 4n x 4n Hessian of trd(W * sum_i upsilon_i Y_i^2), over the ring of W.
int hessian_rank(const Mat2R& W, const std::vector<i64>& upsilon);
// Same with Y_i running over Hamilton quaternions and W a rational quaternion.
int hessian_rank(const HurwitzQuat& W, const std::vector<i64>& upsilon);

struct IntersectionAudit {
    i64 q;
    i64 pairs;                     // ordered pairs of nonzero W examined
    i64 intersection_violations;   // L(W1) != L(W2) but dim(L(W1) n L(W2)) > 1
    i64 proportionality_violations;  // equal 2-dim spaces with W1 not in F_q^* W2
    int max_intersection_dim;
};
IntersectionAudit pairwise_intersection_audit(i64 q);

struct GeometryAudit {
    i64 q;
    i64 nonzero_W;
    i64 dim_formula_violations;
    i64 symmetry_violations;     // A in L(W) iff W in L(A), over all pairs
    i64 trace_zero_violations;   // trd W = 0: L(W) in ker trd and some A in L(W) invertible
    std::array<int, 2> min_hessian_rank;  // n = 1, 2 over all W and sign patterns
    i64 hessian_violations;      // rank < 2n
    IntersectionAudit intersections;
    bool ok;
};
GeometryAudit geometry_audit(i64 q);

}  // namespace qcl
