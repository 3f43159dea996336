#pragma once

#include <array>

#include "qcl/arith.hpp"

namespace qcl {

// Element z1 + z2 sqrt(u) + (z3 + z4 sqrt(u)) pi of the local quaternion
// order with pi^2 = p and pi a = conj(a) pi, stored modulo p^N.
class NonsplitLocalElem {
public:
    // u defaults to the smallest non-residue for odd p and to 5 for p = 2.
    NonsplitLocalElem(i64 p, int N, std::array<i64, 4> z, i64 u = 0);

    static i64 default_u(i64 p);

    i64 p() const { return p_; }
    int N() const { return N_; }
    i64 u() const { return u_; }
    i64 modulus() const { return mod_; }
    const std::array<i64, 4>& z() const { return z_; }

    i64 trd() const;
    i64 nrd() const;
    NonsplitLocalElem conj() const;

    friend NonsplitLocalElem operator*(const NonsplitLocalElem& a, const NonsplitLocalElem& b);
    friend NonsplitLocalElem operator+(const NonsplitLocalElem& a, const NonsplitLocalElem& b);
    friend bool operator==(const NonsplitLocalElem& a, const NonsplitLocalElem& b) {
        return a.p_ == b.p_ && a.N_ == b.N_ && a.u_ == b.u_ && a.z_ == b.z_;
    }

private:
    i64 p_;
    int N_;
    i64 u_;
    i64 mod_;
    std::array<i64, 4> z_;
};

}  // namespace qcl
