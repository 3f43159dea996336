#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qcl/arith.hpp"

namespace qcl {

// Exact value p^{-s} * sum_r counts[r] * zeta^r with zeta = exp(2 pi i / p^k).
// Canonical form: support inside r < (p-1) p^{k-1} (the power basis of the
// cyclotomic field), minimal conductor k, minimal scale s >= 0.
class CycloSum {
public:
    CycloSum() : p_(2), k_(0), s_(0), counts_{0} {}
    CycloSum(i64 p, int k, std::vector<i64> counts, int s = 0);

    static CycloSum rational(i64 p, i64 num, int s = 0) { return {p, 0, {num}, s}; }
    static CycloSum root_of_unity(i64 p, int k, i64 r);

    i64 p() const { return p_; }
    int k() const { return k_; }
    int scale() const { return s_; }
    const std::vector<i64>& counts() const { return counts_; }

    bool is_zero() const { return k_ == 0 && counts_[0] == 0; }
    bool is_rational() const { return k_ == 0; }
    // Value as a rational; requires is_rational().
    Rational to_rational() const;

    std::complex<long double> to_complex() const;
    // |value|^2 as an exact element; rational whenever the value times its
    // conjugate lies in Q (always true for the sums in this library).
    CycloSum abs2() const;
    long double magnitude() const;

    CycloSum conj() const;
    // Multiply by p^e.
    CycloSum times_ppow(int e) const;

    friend CycloSum operator+(const CycloSum& a, const CycloSum& b);
    friend CycloSum operator-(const CycloSum& a, const CycloSum& b);
    friend CycloSum operator*(const CycloSum& a, const CycloSum& b);
    friend CycloSum operator*(i64 c, const CycloSum& a);
    friend bool operator==(const CycloSum& a, const CycloSum& b) {
        return a.p_ == b.p_ && a.k_ == b.k_ && a.s_ == b.s_ && a.counts_ == b.counts_;
    }

    std::string str() const;

private:
    void canonicalize();
    CycloSum lifted(int k) const;  // same value, counts over Z/p^k, not canonical
    i64 p_;
    int k_;
    int s_;
    std::vector<i64> counts_;

    friend CycloSum cyclo_canonicalize(const CycloSum& v);
};

// Returns the canonical representative (constructors already canonicalize;
// this exists for callers that build raw forms via the unchecked path).
CycloSum cyclo_canonicalize(const CycloSum& v);

}  // namespace qcl
