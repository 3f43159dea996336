#include "qcl/nonsplit.hpp"

namespace qcl {

i64 NonsplitLocalElem::default_u(i64 p) { return p == 2 ? 5 : smallest_nonresidue(p); }

NonsplitLocalElem::NonsplitLocalElem(i64 p, int N, std::array<i64, 4> z, i64 u)
    : p_(p), N_(N), u_(u ? u : default_u(p)), mod_(ipow(p, N)), z_(z) {
    require(is_prime(p) && N >= 1, "nonsplit element needs a prime and N >= 1");
    for (auto& v : z_) v = md(v, mod_);
    u_ = md(u_, mod_);
}

static void check_compatible(const NonsplitLocalElem& a, const NonsplitLocalElem& b) {
    require(a.p() == b.p() && a.u() == b.u(), "nonsplit ring mismatch");
    require(a.N() == b.N(), "nonsplit precision mismatch");
}

i64 NonsplitLocalElem::trd() const { return md(2 * z_[0], mod_); }

i64 NonsplitLocalElem::nrd() const {
    const i64 m = mod_;
    i64 a = mulmod(z_[0], z_[0], m);
    i64 b = mulmod(u_, mulmod(z_[1], z_[1], m), m);
    i64 c = mulmod(p_, mulmod(z_[2], z_[2], m), m);
    i64 d = mulmod(mulmod(p_, u_, m), mulmod(z_[3], z_[3], m), m);
    return md(a - b - c + d, m);
}

NonsplitLocalElem NonsplitLocalElem::conj() const {
    return {p_, N_, {z_[0], -z_[1], -z_[2], -z_[3]}, u_};
}

NonsplitLocalElem operator+(const NonsplitLocalElem& a, const NonsplitLocalElem& b) {
    check_compatible(a, b);
    return {a.p_, a.N_, {a.z_[0] + b.z_[0], a.z_[1] + b.z_[1], a.z_[2] + b.z_[2], a.z_[3] + b.z_[3]}, a.u_};
}

NonsplitLocalElem operator*(const NonsplitLocalElem& a, const NonsplitLocalElem& b) {
    check_compatible(a, b);
    const i64 m = a.mod_, u = a.u_, p = a.p_;
    // (al1 + be1 pi)(al2 + be2 pi) = (al1 al2 + p be1 conj(be2)) + (al1 be2 + be1 conj(al2)) pi
    auto fmul = [&](i64 x1, i64 y1, i64 x2, i64 y2, i64& rx, i64& ry) {
        rx = md(mulmod(x1, x2, m) + mulmod(u, mulmod(y1, y2, m), m), m);
        ry = md(mulmod(x1, y2, m) + mulmod(y1, x2, m), m);
    };
    const auto& x = a.z_;
    const auto& y = b.z_;
    i64 r0, r1, s0, s1, t0, t1, w0, w1;
    fmul(x[0], x[1], y[0], y[1], r0, r1);
    fmul(x[2], x[3], y[2], md(-y[3], m), s0, s1);
    fmul(x[0], x[1], y[2], y[3], t0, t1);
    fmul(x[2], x[3], y[0], md(-y[1], m), w0, w1);
    return {p, a.N_,
            {r0 + mulmod(p, s0, m), r1 + mulmod(p, s1, m), t0 + w0, t1 + w1}, u};
}

}  // namespace qcl
