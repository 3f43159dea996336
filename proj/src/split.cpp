#include "qcl/algebra.hpp"

namespace qcl {

Splitting::Splitting(i64 p_, int N_) : p(p_), N(N_), mod(ipow(p_, N_)) {
    if (p == 2) throw PreconditionError("split_embed: p = 2 is not a split place of the Hurwitz order");
    require(is_prime(p) && N >= 1, "split_embed: need an odd prime and N >= 1");
    a = -1;
    for (i64 bb = 0; bb < p && a < 0; ++bb) {
        i64 target = md(-1 - bb * bb, p);
        if (target == 0) continue;
        for (i64 aa = 1; aa < p; ++aa)
            if (aa * aa % p == target) {
                a = aa;
                b = bb;
                break;
            }
    }
    if (a < 0) throw VerificationError("no solution of a^2 + b^2 + 1 = 0 mod p");
    // Newton iteration lifts a modulo p^N (the derivative 2a is a unit).
    for (int it = 0; it < N + 1; ++it) {
        i64 f = md(mulmod(a, a, mod) + 1 + b * b, mod);
        a = md(a - mulmod(f, inv_mod(2 * a, mod), mod), mod);
    }
    if (md(mulmod(a, a, mod) + 1 + b * b, mod) != 0) throw VerificationError("Hensel lift failed");
    I = {a, b, b, md(-a, mod)};
    J = {0, 1, mod - 1, 0};
    K = m2_mul(I, J, mod);
    inv2 = inv_mod(2, mod);
}

M2 Splitting::operator()(const HurwitzQuat& x) const {
    M2 r{0, 0, 0, 0};
    const M2* basis[3] = {&I, &J, &K};
    i64 c0 = md(x[0], mod);
    r[0] = c0;
    r[3] = c0;
    for (int t = 0; t < 3; ++t) {
        i64 c = md(x[t + 1], mod);
        for (int e = 0; e < 4; ++e) r[e] = md(r[e] + mulmod(c, (*basis[t])[e], mod), mod);
    }
    for (auto& e : r) e = mulmod(e, inv2, mod);
    return r;
}

Mat2R split_embed(const HurwitzQuat& x, i64 p, int N) {
    Splitting s(p, N);
    M2 m = s(x);
    return {Ring::residues(p, N), m[0], m[1], m[2], m[3]};
}

}  // namespace qcl
