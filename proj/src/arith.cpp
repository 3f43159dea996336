#include "qcl/arith.hpp"

namespace qcl {

i64 powmod(i64 b, u64 e, i64 m) {
    i64 r = 1 % m;
    b = md(b, m);
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
    i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        i64 q = a / b;
        i64 t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

i64 inv_mod(i64 a, i64 m) {
    if (m == 1) return 0;
    i64 x, y;
    i64 g = ext_gcd(md(a, m), m, x, y);
    if (g != 1) throw PreconditionError("element is not invertible modulo " + std::to_string(m));
    return md(x, m);
}

int vp(i64 a, i64 p) {
    if (a == 0) return inf_val;
    int v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

int vp(const BigInt& a, i64 p) {
    if (a == 0) return inf_val;
    BigInt x = a;
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

int vp(const Rational& a, i64 p) {
    if (a == 0) return inf_val;
    return vp(BigInt(numerator(a)), p) - vp(BigInt(denominator(a)), p);
}

i64 rat_mod(const Rational& a, i64 m) {
    BigInt num = numerator(a), den = denominator(a);
    i64 n = static_cast<i64>(BigInt(num % m + m) % m);
    i64 d = static_cast<i64>(BigInt(den % m));
    return mulmod(n, inv_mod(d, m), m);
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
    std::vector<std::pair<i64, int>> f;
    if (n < 0) n = -n;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        f.emplace_back(d, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

i64 smallest_nonresidue(i64 p) {
    require(p > 2 && is_prime(p), "smallest_nonresidue needs an odd prime");
    for (i64 u = 2; u < p; ++u)
        if (powmod(u, static_cast<u64>((p - 1) / 2), p) == p - 1) return u;
    throw PreconditionError("no non-residue found");
}

std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

BigInt to_big(i128 v) { return BigInt(to_string(v)); }

Rational rat_pow(i64 p, int e) {
    BigInt b = 1;
    for (int i = 0; i < (e < 0 ? -e : e); ++i) b *= p;
    return e < 0 ? Rational(BigInt(1), b) : Rational(b);
}

}  // namespace qcl
