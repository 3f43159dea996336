#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "qcl/arith.hpp"

namespace qcl {

// Element w + xi + yj + zk of the Hurwitz order, stored as the doubled
// coordinates (2w, 2x, 2y, 2z). All four must share a parity.
class HurwitzQuat {
public:
    HurwitzQuat() : c_{0, 0, 0, 0} {}
    HurwitzQuat(i64 c0, i64 c1, i64 c2, i64 c3);

    static HurwitzQuat one() { return {2, 0, 0, 0}; }
    static HurwitzQuat i() { return {0, 2, 0, 0}; }
    static HurwitzQuat j() { return {0, 0, 2, 0}; }
    static HurwitzQuat k() { return {0, 0, 0, 2}; }
    static HurwitzQuat omega() { return {1, 1, 1, 1}; }
    static HurwitzQuat integer(i64 a) { return {2 * a, 0, 0, 0}; }

    // Coordinates with respect to the Z-basis 1, i, j, omega.
    static HurwitzQuat from_basis(const std::array<i64, 4>& b);
    std::array<i64, 4> basis_coords() const;

    // Coordinates with respect to omega, i, j, k (doubled = (a, a+2b, a+2c, a+2d)).
    static HurwitzQuat from_residue_basis(const std::array<i64, 4>& b);
    std::array<i64, 4> residue_basis_coords() const;

    i64 operator[](int idx) const { return c_[idx]; }
    const std::array<i64, 4>& doubled() const { return c_; }

    i64 trd() const { return c_[0]; }
    i64 nrd() const;
    HurwitzQuat conj() const { return {c_[0], -c_[1], -c_[2], -c_[3]}; }

    // Sup norm of the true coordinates, times two.
    i64 sup_doubled() const;
    bool is_zero() const { return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0; }
    bool is_lipschitz() const;
    bool is_primitive() const;

    // x / n when the quotient is again Hurwitz.
    bool divisible_by(i64 n) const;
    HurwitzQuat div_exact(i64 n) const;

    HurwitzQuat operator-() const { return {-c_[0], -c_[1], -c_[2], -c_[3]}; }
    friend HurwitzQuat operator+(const HurwitzQuat& a, const HurwitzQuat& b);
    friend HurwitzQuat operator-(const HurwitzQuat& a, const HurwitzQuat& b);
    friend HurwitzQuat operator*(const HurwitzQuat& a, const HurwitzQuat& b);
    friend HurwitzQuat operator*(i64 s, const HurwitzQuat& a);
    friend bool operator==(const HurwitzQuat& a, const HurwitzQuat& b) { return a.c_ == b.c_; }
    friend bool operator<(const HurwitzQuat& a, const HurwitzQuat& b) { return a.c_ < b.c_; }

    std::string str() const;

private:
    std::array<i64, 4> c_;
};

// Hamilton product of doubled coordinate vectors; the true product in
// doubled coordinates is this divided by two.
inline std::array<i64, 4> hamilton(const std::array<i64, 4>& a, const std::array<i64, 4>& b) {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

std::ostream& operator<<(std::ostream& os, const HurwitzQuat& x);

}  // namespace qcl
