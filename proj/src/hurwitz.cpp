#include "qcl/hurwitz.hpp"

#include <cstdlib>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qcl {

namespace {

bool same_parity(const std::array<i64, 4>& c) {
    i64 r = c[0] & 1;
    return (c[1] & 1) == r && (c[2] & 1) == r && (c[3] & 1) == r;
}

constexpr i64 coord_limit = i64{1} << 30;

}  // namespace

HurwitzQuat::HurwitzQuat(i64 c0, i64 c1, i64 c2, i64 c3) : c_{c0, c1, c2, c3} {
    if (!same_parity(c_)) throw PreconditionError("doubled coordinates must share a parity");
    for (i64 v : c_)
        if (v > coord_limit || v < -coord_limit) throw BudgetError("Hurwitz coordinate out of range");
}

HurwitzQuat HurwitzQuat::from_basis(const std::array<i64, 4>& b) {
    return {2 * b[0] + b[3], 2 * b[1] + b[3], 2 * b[2] + b[3], b[3]};
}

std::array<i64, 4> HurwitzQuat::basis_coords() const {
    i64 d = c_[3];
    return {(c_[0] - d) / 2, (c_[1] - d) / 2, (c_[2] - d) / 2, d};
}

HurwitzQuat HurwitzQuat::from_residue_basis(const std::array<i64, 4>& b) {
    return {b[0], b[0] + 2 * b[1], b[0] + 2 * b[2], b[0] + 2 * b[3]};
}

std::array<i64, 4> HurwitzQuat::residue_basis_coords() const {
    i64 a = c_[0];
    return {a, (c_[1] - a) / 2, (c_[2] - a) / 2, (c_[3] - a) / 2};
}

i64 HurwitzQuat::nrd() const {
    i128 s = 0;
    for (i64 v : c_) s += static_cast<i128>(v) * v;
    return static_cast<i64>(s / 4);
}

i64 HurwitzQuat::sup_doubled() const {
    i64 m = 0;
    for (i64 v : c_) m = std::max(m, std::abs(v));
    return m;
}

bool HurwitzQuat::is_lipschitz() const { return (c_[0] & 1) == 0; }

bool HurwitzQuat::is_primitive() const {
    auto b = basis_coords();
    i64 g = 0;
    for (i64 v : b) g = std::gcd(g, v);
    return g == 1;
}

bool HurwitzQuat::divisible_by(i64 n) const {
    require(n != 0, "division by zero");
    std::array<i64, 4> q;
    for (int t = 0; t < 4; ++t) {
        if (c_[t] % n != 0) return false;
        q[t] = c_[t] / n;
    }
    return same_parity(q);
}

HurwitzQuat HurwitzQuat::div_exact(i64 n) const {
    if (!divisible_by(n)) throw PreconditionError("Hurwitz element not divisible");
    return {c_[0] / n, c_[1] / n, c_[2] / n, c_[3] / n};
}

HurwitzQuat operator+(const HurwitzQuat& a, const HurwitzQuat& b) {
    return {a.c_[0] + b.c_[0], a.c_[1] + b.c_[1], a.c_[2] + b.c_[2], a.c_[3] + b.c_[3]};
}

HurwitzQuat operator-(const HurwitzQuat& a, const HurwitzQuat& b) {
    return {a.c_[0] - b.c_[0], a.c_[1] - b.c_[1], a.c_[2] - b.c_[2], a.c_[3] - b.c_[3]};
}

HurwitzQuat operator*(const HurwitzQuat& a, const HurwitzQuat& b) {
    auto h = hamilton(a.c_, b.c_);
    return {h[0] / 2, h[1] / 2, h[2] / 2, h[3] / 2};
}

HurwitzQuat operator*(i64 s, const HurwitzQuat& a) {
    return {mul_checked(s, a.c_[0]), mul_checked(s, a.c_[1]), mul_checked(s, a.c_[2]),
            mul_checked(s, a.c_[3])};
}

std::string HurwitzQuat::str() const {
    std::ostringstream os;
    os << "(" << c_[0] << "," << c_[1] << "," << c_[2] << "," << c_[3] << ")/2";
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const HurwitzQuat& x) { return os << x.str(); }

}  // namespace qcl
