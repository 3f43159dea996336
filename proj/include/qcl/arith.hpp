#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "qcl/errors.hpp"

namespace qcl {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline i64 add_checked(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw BudgetError("int64 overflow in addition");
    return r;
}

inline i64 mul_checked(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw BudgetError("int64 overflow in multiplication");
    return r;
}

// Least nonnegative residue.
inline i64 md(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>(static_cast<i128>(a) * b % m); }

inline i64 ipow(i64 b, int e) {
    i64 r = 1;
    for (int i = 0; i < e; ++i) r = mul_checked(r, b);
    return r;
}

i64 powmod(i64 b, u64 e, i64 m);

// Inverse of a modulo m; throws PreconditionError when gcd(a, m) != 1.
i64 inv_mod(i64 a, i64 m);

// Extended gcd: returns g = gcd(a,b) >= 0 with x*a + y*b = g.
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);

// p-adic valuation; v(0) is reported as `inf_val`.
constexpr int inf_val = 1 << 28;
int vp(i64 a, i64 p);
int vp(const BigInt& a, i64 p);
int vp(const Rational& a, i64 p);

// Residue of a p-integral rational modulo m = p^N.
i64 rat_mod(const Rational& a, i64 m);

bool is_prime(i64 n);
std::vector<std::pair<i64, int>> factorize(i64 n);

// Smallest positive quadratic non-residue mod an odd prime p.
i64 smallest_nonresidue(i64 p);

std::string to_string(i128 v);
BigInt to_big(i128 v);

// Rational p^e for any integer e.
Rational rat_pow(i64 p, int e);

}  // namespace qcl
