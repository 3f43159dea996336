#pragma once

#include <array>
#include <string>

#include "qcl/arith.hpp"

namespace qcl {

// Ring of a Mat2R. Fp is ModPN with N = 1; Q carries the prime whose
// powers may appear in denominators (0 means unrestricted).
struct Ring {
    enum Kind { Z, ModPN, Q } kind = Z;
    i64 p = 0;
    int N = 0;

    static Ring integers() { return {Z, 0, 0}; }
    static Ring residues(i64 p, int N) { return {ModPN, p, N}; }
    static Ring field(i64 p) { return {ModPN, p, 1}; }
    static Ring rationals(i64 p = 0) { return {Q, p, 0}; }

    i64 modulus() const { return ipow(p, N); }
    friend bool operator==(const Ring& a, const Ring& b) {
        return a.kind == b.kind && a.p == b.p && a.N == b.N;
    }
    std::string str() const;
};

// 2x2 matrix over a tagged ring. Entries are exact rationals; residues are
// kept reduced to [0, p^N).
class Mat2R {
public:
    Mat2R() : ring_(Ring::integers()), e_{0, 0, 0, 0} {}
    Mat2R(Ring ring, const Rational& a, const Rational& b, const Rational& c, const Rational& d);
    static Mat2R identity(Ring ring) { return {ring, 1, 0, 0, 1}; }
    static Mat2R zero(Ring ring) { return {ring, 0, 0, 0, 0}; }

    const Ring& ring() const { return ring_; }
    const Rational& operator()(int r, int c) const { return e_[2 * r + c]; }
    const std::array<Rational, 4>& entries() const { return e_; }

    Rational trd() const;
    Rational nrd() const;
    Mat2R dagger() const;
    bool is_zero() const;

    // Same entries viewed in another ring (reduction or inclusion).
    Mat2R to_ring(Ring r) const;
    // Entries as int64; requires Z or ModPN.
    std::array<i64, 4> ints() const;

    friend Mat2R operator+(const Mat2R& a, const Mat2R& b);
    friend Mat2R operator-(const Mat2R& a, const Mat2R& b);
    friend Mat2R operator*(const Mat2R& a, const Mat2R& b);
    friend Mat2R operator*(const Rational& s, const Mat2R& a);
    friend bool operator==(const Mat2R& a, const Mat2R& b);

    std::string str() const;

private:
    void normalize();
    Ring ring_;
    std::array<Rational, 4> e_;
};

// Plain 2x2 integer matrices used in hot loops: row-major (a, b, c, d).
using M2 = std::array<i64, 4>;

inline i64 md128(i128 a, i64 m) {
    i64 r = static_cast<i64>(a % m);
    return r < 0 ? r + m : r;
}
inline M2 m2_mul(const M2& x, const M2& y, i64 m) {
    return {md128(static_cast<i128>(x[0]) * y[0] + static_cast<i128>(x[1]) * y[2], m),
            md128(static_cast<i128>(x[0]) * y[1] + static_cast<i128>(x[1]) * y[3], m),
            md128(static_cast<i128>(x[2]) * y[0] + static_cast<i128>(x[3]) * y[2], m),
            md128(static_cast<i128>(x[2]) * y[1] + static_cast<i128>(x[3]) * y[3], m)};
}
inline M2 m2_dagger(const M2& x, i64 m) { return {x[3], md(-x[1], m), md(-x[2], m), x[0]}; }
inline i64 m2_trd(const M2& x, i64 m) { return md(x[0] + x[3], m); }
inline i64 m2_det(const M2& x, i64 m) {
    return md128(static_cast<i128>(x[0]) * x[3] - static_cast<i128>(x[1]) * x[2], m);
}
// tr(x y) without forming the product.
inline i64 m2_trace_prod(const M2& x, const M2& y, i64 m) {
    return md128(static_cast<i128>(x[0]) * y[0] + static_cast<i128>(x[1]) * y[2] +
                     static_cast<i128>(x[2]) * y[1] + static_cast<i128>(x[3]) * y[3],
                 m);
}
// Minimum p-adic valuation of the entries (inf_val when all vanish mod m).
int m2_val(const M2& x, i64 p, int cap);

}  // namespace qcl
