#include "qcl/expsums.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>

#include "qcl/parallel.hpp"

namespace qcl {

namespace {

i64 enc4(const M2& x, i64 m) { return ((x[0] * m + x[1]) * m + x[2]) * m + x[3]; }

M2 dec4(i64 idx, i64 m) {
    M2 x;
    for (int t = 3; t >= 0; --t) {
        x[static_cast<size_t>(t)] = idx % m;
        idx /= m;
    }
    return x;
}

// Small-modulus helpers (m^2 fits comfortably in int64).
inline M2 mul_s(const M2& x, const M2& y, i64 m) {
    return {(x[0] * y[0] + x[1] * y[2]) % m, (x[0] * y[1] + x[1] * y[3]) % m, (x[2] * y[0] + x[3] * y[2]) % m,
            (x[2] * y[1] + x[3] * y[3]) % m};
}
inline M2 scale_s(i64 s, const M2& x, i64 m) {
    return {md(s * x[0], m), md(s * x[1], m), md(s * x[2], m), md(s * x[3], m)};
}
inline M2 reduce(const M2& x, i64 m) { return {md(x[0], m), md(x[1], m), md(x[2], m), md(x[3], m)}; }
inline i64 tr_prod_s(const M2& x, const M2& y, i64 m) {
    return md(x[0] * y[0] + x[1] * y[2] + x[2] * y[1] + x[3] * y[3], m);
}

M2 ints_of(const Mat2R& A) {
    require(A.ring().kind == Ring::Z, "expected an integer matrix");
    return A.ints();
}

int val_cap(i64 x, i64 p, int cap) {
    if (x == 0) return cap;
    return std::min(cap, vp(x, p));
}

int m2_val_cap(const M2& x, i64 p, int cap) {
    int v = cap;
    for (i64 e : x) v = std::min(v, val_cap(e, p, cap));
    return v;
}

i64 det_i(const M2& d) { return d[0] * d[3] - d[1] * d[2]; }

}  // namespace

// ---------------------------------------------------------------------------
// Matrix Gauss integral and its Hessian

CycloSum nonabelian_gauss_integral(const Mat2R& Zin, i64 p) {
    require(p > 2 && is_prime(p), "nonabelian_gauss_integral: p must be an odd prime");
    Mat2R Z = Zin.to_ring(Ring::rationals(p));
    int k = 0;
    for (const auto& x : Z.entries())
        if (x != 0) k = std::max(k, -vp(x, p));
    if (k > 6 || std::pow(static_cast<double>(p), 4.0 * k) > 1e8)
        throw BudgetError("nonabelian_gauss_integral: conductor too large");
    const i64 m = ipow(p, k);
    M2 Zs;
    for (int t = 0; t < 4; ++t) Zs[static_cast<size_t>(t)] = rat_mod(Z.entries()[static_cast<size_t>(t)] * m, m);
    std::vector<i64> counts(static_cast<size_t>(m), 0);
    const i64 total = m * m * m * m;
    for (i64 idx = 0; idx < total; ++idx) {
        M2 Y = dec4(idx, m);
        ++counts[static_cast<size_t>(tr_prod_s(mul_s(Y, Y, m), Zs, m))];
    }
    return {p, k, std::move(counts), 4 * k};
}

Rational gauss_integral_abs2_formula(const Mat2R& Zin, i64 p) {
    Mat2R Z = Zin.to_ring(Ring::rationals(p));
    Rational tr = Z.trd(), det = Z.nrd();
    require(tr != 0 && vp(tr, p) <= 0, "closed form needs |tr Z| >= 1");
    int vz = inf_val;
    for (const auto& x : Z.entries()) vz = std::min(vz, vp(x, p));
    const int vt = vp(tr, p);
    int inner = 2 * vz;
    if (det != 0) inner = std::min(inner, vt + vp(det, p));
    return rat_pow(p, vt + inner);
}

namespace {

Rational det4(Mat4Q a) {
    Rational det = 1;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        while (piv < 4 && a[piv][c] == 0) ++piv;
        if (piv == 4) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < 4; ++r) {
            Rational f = a[r][c] / a[c][c];
            for (int t = c; t < 4; ++t) a[r][t] -= f * a[c][t];
        }
    }
    return det;
}

}  // namespace

HessianCert hessian_matrices(const Mat2R& Zin) {
    Mat2R Z = Zin.to_ring(Ring::rationals());
    const Rational z11 = Z(0, 0), z12 = Z(0, 1), z21 = Z(1, 0), z22 = Z(1, 1);
    const Rational r = z11 + z22;
    if (r == 0) throw PreconditionError("hessian_matrices: tr(Z) = 0 makes R singular");
    HessianCert h;
    h.J = {{{2 * z11, z21, z12, 0}, {z21, 0, r, z21}, {z12, r, 0, z12}, {0, z21, z12, 2 * z22}}};
    h.R = {{{0, 0, 1, -z22}, {1, 1, 0, z12}, {1, -1, 0, z21}, {0, 0, -1, -z11}}};
    Mat4Q RtJR;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Rational s = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += h.R[a][i] * h.J[a][b] * h.R[b][j];
            RtJR[i][j] = s;
        }
    const Rational det = Z.nrd();
    const Rational diag[4] = {2 * r, -2 * r, 2 * r, 2 * r * det};
    bool ok = det4(h.R) == 2 * r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ok = ok && RtJR[i][j] == (i == j ? diag[i] : Rational(0));
    h.identity_ok = ok;
    return h;
}

// ---------------------------------------------------------------------------
// I_0(delta, gamma)

namespace {

using PhaseTable = std::map<i64, std::vector<i64>>;

PhaseTable slot_table(i64 p, int k, int M, i64 ups, const M2& dagger_k, const M2& gamma_k, i64 uinv) {
    const i64 mk = ipow(p, k), mM = ipow(p, M), lift = ipow(p, M - k);
    PhaseTable t;
    const i64 total = mM * mM * mM * mM;
    for (i64 idx = 0; idx < total; ++idx) {
        M2 Y = reduce(dec4(idx, mM), mk);
        M2 c = mul_s(dagger_k, scale_s(ups, mul_s(Y, Y, mk), mk), mk);
        i64 ph = tr_prod_s(gamma_k, Y, mk) * uinv % mk * lift;
        auto& v = t[enc4(c, mk)];
        if (v.empty()) v.assign(static_cast<size_t>(mM), 0);
        ++v[static_cast<size_t>(ph)];
    }
    return t;
}

i64 add_classes(i64 a, i64 b, i64 m) {
    M2 x = dec4(a, m), y = dec4(b, m);
    return enc4({(x[0] + y[0]) % m, (x[1] + y[1]) % m, (x[2] + y[2]) % m, (x[3] + y[3]) % m}, m);
}

i64 neg_class(i64 a, i64 m) { return enc4(scale_s(-1, dec4(a, m), m), m); }

}  // namespace

CycloSum I0_local(const LocalIntegralRequest& req, int extra) {
    const i64 p = req.p;
    require(p > 2 && is_prime(p), "I0_local: p must be an odd prime");
    require(req.n >= 1 && static_cast<int>(req.upsilon.size()) == req.n &&
                static_cast<int>(req.gamma.size()) == req.n,
            "I0_local: n, upsilon and gamma disagree");
    require(extra >= 0, "I0_local: negative extra precision");
    const M2 d = ints_of(req.delta);
    const i64 det = det_i(d);
    require(det != 0, "I0_local: delta must be invertible");
    const int k = vp(det, p);
    if (k > 3) throw BudgetError("I0_local: v(nrd delta) > 3");
    const int M = k + extra;
    if (std::pow(static_cast<double>(p), 4.0 * M) > 2e7) throw BudgetError("I0_local: residue space too large");
    const i64 mk = ipow(p, k), mM = ipow(p, M);
    const i64 uinv = inv_mod(det / mk, mk);
    const M2 dag = reduce({d[3], -d[1], -d[2], d[0]}, mk);
    std::vector<PhaseTable> tables;
    for (int i = 0; i < req.n; ++i) {
        require(md(req.upsilon[static_cast<size_t>(i)], p) != 0, "I0_local: upsilon must be units");
        tables.push_back(slot_table(p, k, M, md(req.upsilon[static_cast<size_t>(i)], mk), dag,
                                    reduce(ints_of(req.gamma[static_cast<size_t>(i)]), mk), uinv));
    }
    auto conv = [&](const std::vector<i64>& a, const std::vector<i64>& b, std::vector<i64>& out) {
        for (i64 r = 0; r < mM; ++r) {
            if (a[static_cast<size_t>(r)] == 0) continue;
            for (i64 s = 0; s < mM; ++s)
                out[static_cast<size_t>((r + s) % mM)] += a[static_cast<size_t>(r)] * b[static_cast<size_t>(s)];
        }
    };
    PhaseTable acc = tables[0];
    for (int i = 1; i + 1 < req.n; ++i) {
        if (static_cast<double>(acc.size()) * static_cast<double>(tables[static_cast<size_t>(i)].size()) *
                static_cast<double>(mM * mM) >
            2e9)
            throw BudgetError("I0_local: slot convolution too large");
        PhaseTable next;
        for (const auto& [ca, va] : acc)
            for (const auto& [cb, vb] : tables[static_cast<size_t>(i)]) {
                auto& v = next[add_classes(ca, cb, mk)];
                if (v.empty()) v.assign(static_cast<size_t>(mM), 0);
                conv(va, vb, v);
            }
        acc = std::move(next);
    }
    std::vector<i64> result(static_cast<size_t>(mM), 0);
    if (req.n == 1) {
        auto it = acc.find(0);
        if (it != acc.end()) result = it->second;
    } else {
        const auto& last = tables.back();
        for (const auto& [c, v] : acc) {
            auto it = last.find(neg_class(c, mk));
            if (it != last.end()) conv(v, it->second, result);
        }
    }
    return {p, M, std::move(result), 4 * req.n * M};
}

// ---------------------------------------------------------------------------
// Prime case (delta = diag(q, 1))

namespace {

// Odometer over F_q^len.
bool next_vec(std::vector<i64>& v, i64 q) {
    for (auto& x : v) {
        if (++x < q) return true;
        x = 0;
    }
    return false;
}

i64 dot(const std::vector<i64>& a, const std::vector<i64>& b, i64 q) {
    i64 s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return md(s, q);
}

i64 count_X2(i64 q, int n, const std::vector<i64>& s) {
    std::vector<i64> a(static_cast<size_t>(n), 0);
    i64 c = 0;
    do {
        if (dot(a, a, q) == 0 && dot(a, s, q) == 0) ++c;
    } while (next_vec(a, q));
    return c;
}

}  // namespace

i64 s3_closed_formula(i64 q, int n, const std::vector<M2>& gamma) {
    std::vector<i64> s(static_cast<size_t>(n)), u(s), t(s), v(s), smv(s), zero(s);
    for (int i = 0; i < n; ++i) {
        M2 g = reduce(gamma[static_cast<size_t>(i)], q);
        s[static_cast<size_t>(i)] = g[0];
        u[static_cast<size_t>(i)] = g[1];
        t[static_cast<size_t>(i)] = g[2];
        v[static_cast<size_t>(i)] = g[3];
        smv[static_cast<size_t>(i)] = md(g[0] - g[3], q);
    }
    auto is_zero = [](const std::vector<i64>& x) {
        return std::all_of(x.begin(), x.end(), [](i64 e) { return e == 0; });
    };
    const bool u0 = is_zero(u), v0 = is_zero(v);
    bool v_in_line_u = false;
    if (!u0)
        for (i64 kap = 0; kap < q && !v_in_line_u; ++kap) {
            bool ok = true;
            for (int i = 0; i < n; ++i) ok = ok && md(kap * u[static_cast<size_t>(i)] - v[static_cast<size_t>(i)], q) == 0;
            v_in_line_u = ok;
        }
    const i64 X20 = count_X2(q, n, zero);
    auto qp = [&](int e) { return ipow(q, e); };
    i64 total = 0;
    if (!(u0 && v0)) total += qp(2 * n - 1) * X20 + qp(3 * n - 3) * (qp(n) - q);
    if (!u0 && !v_in_line_u) total += qp(3 * n - 3) * (q - 1);
    if (!u0 && v_in_line_u) {
        // #{a, lambda : sum a_i^2 = sum (s_i - v_i) a_i lambda + t_i u_i lambda^2}
        i64 c = 0;
        std::vector<i64> a(static_cast<size_t>(n), 0);
        do {
            for (i64 lam = 0; lam < q; ++lam) {
                i64 rhs = 0;
                for (int i = 0; i < n; ++i)
                    rhs += smv[static_cast<size_t>(i)] * a[static_cast<size_t>(i)] * lam +
                           t[static_cast<size_t>(i)] * u[static_cast<size_t>(i)] * lam * lam;
                if (md(dot(a, a, q) - rhs, q) == 0) ++c;
            }
        } while (next_vec(a, q));
        total += qp(2 * n - 2) * (c - X20);
    }
    if (u0 && !v0) {
        i64 c1 = 0, c2 = 0;
        std::vector<i64> a(static_cast<size_t>(n), 0);
        do {
            i64 base = dot(smv, a, q);
            if (base == 0) ++c2;
            i64 tv = dot(t, v, q);
            for (i64 lam = 0; lam < q; ++lam)
                if (md(base + tv * lam, q) == 0) ++c1;
        } while (next_vec(a, q));
        total += qp(2 * n - 2) * (c1 - c2);
    }
    if (u0 && v0) {
        i64 cab = 0, ca = 0;
        std::vector<i64> a(static_cast<size_t>(n), 0);
        do {
            i64 sa = dot(s, a, q);
            if (sa == 0) ++ca;
            std::vector<i64> b(static_cast<size_t>(n), 0);
            do {
                if (md(sa + dot(t, b, q), q) == 0) ++cab;
            } while (next_vec(b, q));
        } while (next_vec(a, q));
        total += qp(2 * n) * count_X2(q, n, s) + qp(2 * n - 2) * (cab - ca);
    }
    return total;
}

PrimeCaseReport prime_case_report(i64 q, int n, const std::vector<M2>& gamma) {
    require(q > 2 && is_prime(q), "prime_case_report: q must be an odd prime");
    require(n >= 1 && n <= 3 && static_cast<int>(gamma.size()) == n, "prime_case_report: need 1 <= n <= 3");
    if (std::pow(static_cast<double>(q), 4.0 * n) > 1e8) throw BudgetError("prime_case_report: size cap exceeded");
    PrimeCaseReport rep;
    rep.q = q;
    rep.n = n;
    const i64 q4 = q * q * q * q;
    // Per slot: packed first row of Y^2 and the trace pairing with gamma.
    std::vector<std::vector<i64>> row(static_cast<size_t>(n)), ph(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        M2 g = reduce(gamma[static_cast<size_t>(i)], q);
        for (i64 idx = 0; idx < q4; ++idx) {
            M2 Y = dec4(idx, q);
            M2 Y2 = mul_s(Y, Y, q);
            row[static_cast<size_t>(i)].push_back(Y2[0] * q + Y2[1]);
            ph[static_cast<size_t>(i)].push_back(tr_prod_s(g, Y, q));
        }
    }
    std::vector<i64> idx(static_cast<size_t>(n), 0);
    do {
        i64 r0 = 0, r1 = 0, t = 0;
        for (int i = 0; i < n; ++i) {
            i64 rv = row[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])];
            r0 += rv / q;
            r1 += rv % q;
            t += ph[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])];
        }
        if (r0 % q == 0 && r1 % q == 0) {
            ++rep.S2;
            if (t % q == 0) ++rep.S3;
        }
    } while (next_vec(idx, q4));
    std::vector<i64> s(static_cast<size_t>(n), 0);
    do rep.X2[s] = count_X2(q, n, s);
    while (next_vec(s, q));
    rep.S2_formula = ipow(q, 3 * n - 2) * (ipow(q, n) - 1) + ipow(q, 2 * n) * rep.X2[std::vector<i64>(static_cast<size_t>(n), 0)];
    rep.S3_formula = s3_closed_formula(q, n, gamma);
    LocalIntegralRequest req{q, n, std::vector<i64>(static_cast<size_t>(n), 1),
                             Mat2R(Ring::integers(), q, 0, 0, 1), {}};
    for (const auto& g : gamma) {
        M2 r = reduce(g, q);
        req.gamma.emplace_back(Ring::integers(), r[0], r[1], r[2], r[3]);
    }
    rep.I0 = I0_local(req);
    // q^{4n} (1 - 1/q) I0 - (S3 - S2/q)
    CycloSum lhs = (q - 1) * rep.I0.times_ppow(4 * n - 1);
    CycloSum rhs = CycloSum::rational(q, q * rep.S3 - rep.S2, 1);
    rep.identity_residual = lhs - rhs;
    return rep;
}

// ---------------------------------------------------------------------------
// W-measure

namespace {

M2 local_generator(const M2& eta, i64 p, int k, int which = -1) {
    const i64 m = ipow(p, k);
    const M2 ed = m2_dagger(reduce(eta, m), m);
    const M2 cands[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int c = 0; c < 4; ++c) {
        if (which >= 0 && c != which) continue;
        M2 N = mul_s(mul_s(ed, cands[c], m), reduce(eta, m), m);
        if (m2_val_cap(N, p, k) == 0) return N;
    }
    if (which >= 0) throw PreconditionError("chosen N0 does not generate eta^dagger O eta");
    throw VerificationError("no elementary matrix generates eta^dagger O eta");
}

i64 unit_class_key(const M2& x, i64 p, i64 m) {
    i64 best = -1;
    for (i64 l = 1; l < m; ++l) {
        if (l % p == 0) continue;
        i64 e = enc4(scale_s(l, x, m), m);
        if (best < 0 || e < best) best = e;
    }
    return best < 0 ? enc4(x, m) : best;
}

}  // namespace

WTable build_w_table(const M2& eta, i64 p, int k) {
    require(p > 2 && is_prime(p), "W-measure: p must be an odd prime");
    if (std::pow(static_cast<double>(p), 5.0 * k) > 2e8) throw BudgetError("W-measure: v(nrd eta) too large");
    WTable w;
    w.p = p;
    w.k = k;
    w.mod = ipow(p, k);
    const i64 m = w.mod;
    w.eta = reduce(eta, m);
    w.denom = m * m * m * m;
    if (k == 0) {
        w.N = {0, 0, 0, 0};
        w.class_of[0] = 0;
        w.counts = {1};
        return w;
    }
    w.N = local_generator(eta, p, k);
    std::set<i64> keys;
    const i64 total = m * m * m * m;
    std::vector<i64> image(static_cast<size_t>(total), -1);
    for (i64 idx = 0; idx < total; ++idx) {
        M2 x = mul_s(dec4(idx, m), w.eta, m);
        i64 e = enc4(x, m);
        if (image[static_cast<size_t>(e)] < 0) {
            image[static_cast<size_t>(e)] = unit_class_key(x, p, m);
            keys.insert(image[static_cast<size_t>(e)]);
        }
    }
    std::map<i64, i64> key_id;
    for (i64 key : keys) key_id.emplace(key, static_cast<i64>(key_id.size()));
    for (i64 e = 0; e < total; ++e)
        if (image[static_cast<size_t>(e)] >= 0) w.class_of[e] = key_id[image[static_cast<size_t>(e)]];
    w.counts.assign(keys.size(), 0);
    std::vector<i64> seen;
    for (i64 idx = 0; idx < total; ++idx) {
        M2 ZN = mul_s(dec4(idx, m), w.N, m);
        seen.clear();
        for (i64 l = 0; l < m; ++l) {
            i64 c = w.class_of.at(enc4(scale_s(l, ZN, m), m));
            if (std::find(seen.begin(), seen.end(), c) == seen.end()) seen.push_back(c);
        }
        for (i64 c : seen) ++w.counts[static_cast<size_t>(c)];
    }
    return w;
}

Rational WTable::W_of(const M2& M0_eta) const {
    auto it = class_of.find(enc4(reduce(M0_eta, mod), mod));
    require(it != class_of.end(), "W-measure: element is not in the image of O eta");
    return Rational(counts[static_cast<size_t>(it->second)], denom);
}

Rational WTable::sum() const {
    i64 s = 0;
    for (i64 c : counts) s += c;
    return Rational(s, denom);
}

Rational W_measure(const HurwitzQuat& M0, const HurwitzQuat& eta, i64 p) {
    require(eta.is_primitive(), "W_measure: eta must be primitive");
    const int k = vp(eta.nrd(), p);
    if (k == 0) throw PreconditionError("W_measure: p does not divide nrd(eta)");
    if (k > 2) throw BudgetError("W_measure: v(nrd eta) > 2");
    Splitting s(p, k);
    const M2 E = s(eta);
    WTable t = build_w_table(E, p, k);
    return t.W_of(mul_s(s(M0), E, t.mod));
}

Rational W_measure_direct(const M2& M0, const M2& eta, i64 p, int k, int generator) {
    const i64 m = ipow(p, k);
    if (k == 0) return 1;
    const M2 N = local_generator(eta, p, k, generator);
    const M2 target = mul_s(reduce(M0, m), reduce(eta, m), m);
    const i64 total = m * m * m * m;
    i64 hits = 0;
    for (i64 idx = 0; idx < total; ++idx) {
        M2 ZN = mul_s(dec4(idx, m), N, m);
        for (i64 l = 0; l < m; ++l)
            if (scale_s(l, ZN, m) == target) {
                ++hits;
                break;
            }
    }
    return Rational(hits, total);
}

// ---------------------------------------------------------------------------
// Support and magnitude audit

namespace {

struct DeltaData {
    i64 p;
    int k;       // v(nrd delta)
    int vd;      // v(delta)
    int ke;      // v(nrd eta)
    i64 mk, me;  // p^k, p^ke
    M2 delta, eta;
};

DeltaData delta_data(i64 p, const M2& d) {
    DeltaData dd;
    dd.p = p;
    const i64 det = det_i(d);
    require(det != 0, "delta must be invertible");
    dd.k = vp(det, p);
    dd.vd = inf_val;
    for (i64 e : d)
        if (e != 0) dd.vd = std::min(dd.vd, vp(e, p));
    dd.ke = dd.k - 2 * dd.vd;
    dd.mk = ipow(p, dd.k);
    dd.me = ipow(p, dd.ke);
    dd.delta = d;
    const i64 pv = ipow(p, dd.vd);
    dd.eta = {d[0] / pv, d[1] / pv, d[2] / pv, d[3] / pv};
    return dd;
}

// Per-slot data derived from gamma mod p^k.
struct SlotInfo {
    bool in_support;
    M2 g;    // gamma' eta mod p^ke
    int e1;  // min(v((gamma' - gamma'^dagger) eta), ke)
    int e2;  // min(v(gamma'), vd + ke)
};

SlotInfo slot_info(const DeltaData& dd, const M2& gamma) {
    SlotInfo s{};
    const M2 g = reduce(gamma, dd.mk);
    const i64 pv = ipow(dd.p, dd.vd);
    s.in_support = std::all_of(g.begin(), g.end(), [&](i64 e) { return e % pv == 0; });
    if (!s.in_support) return s;
    const i64 mg = ipow(dd.p, dd.k - dd.vd);  // gamma' is known modulo p^{k - vd}
    const M2 gp = {g[0] / pv % mg, g[1] / pv % mg, g[2] / pv % mg, g[3] / pv % mg};
    const M2 eta_e = reduce(dd.eta, dd.me);
    s.g = mul_s(reduce(gp, dd.me), eta_e, dd.me);
    const M2 gpe = reduce(gp, dd.me);
    const M2 diff = reduce({gpe[0] - gpe[3], 2 * gpe[1], 2 * gpe[2], gpe[3] - gpe[0]}, dd.me);
    s.e1 = m2_val_cap(mul_s(diff, eta_e, dd.me), dd.p, dd.ke);
    s.e2 = m2_val_cap(gp, dd.p, dd.vd + dd.ke);
    return s;
}

bool in_span(const M2& a, const M2& b, i64 m) {
    for (i64 l = 0; l < m; ++l)
        if (scale_s(l, b, m) == a) return true;
    return false;
}

// Squared bound check |S| p^{-4nk} <= (w / p^{4 ke}) * (...) in exact arithmetic.
bool bound_check(const DeltaData& dd, int n, i64 S, i64 w, int E1, int E2, long double& ratio) {
    const i64 p = dd.p;
    const int lhs_e = 8 * dd.ke + 3 * n * dd.ke + 2 * n * dd.vd;
    const int rhs_e = 8 * n * dd.k + n * E1 + 2 * n * E2;
    if (S == 0) {
        ratio = 0;
        return true;
    }
    const long double lp = std::log(static_cast<long double>(p));
    const long double lhs = 2 * std::log(std::fabs(static_cast<long double>(S))) + lhs_e * lp;
    const long double rhs = 2 * std::log(static_cast<long double>(w)) + rhs_e * lp;
    ratio = std::exp((lhs - rhs) / 2);
    if (std::fabs(lhs - rhs) > 1e-9L) return lhs < rhs;
    BigInt L = BigInt(S) * S, R = BigInt(w) * w;
    for (int i = 0; i < lhs_e; ++i) L *= p;
    for (int i = 0; i < rhs_e; ++i) R *= p;
    return L <= R;
}

struct CaseOutcome {
    bool nonzero, zero_outside, support_violation, bound_violation, tight;
    long double ratio;
};

CaseOutcome evaluate_case(const DeltaData& dd, int n, i64 S, const std::vector<const SlotInfo*>& slots,
                          const WTable& wt) {
    CaseOutcome o{};
    o.nonzero = S != 0;
    bool supp = std::all_of(slots.begin(), slots.end(), [](const SlotInfo* s) { return s->in_support; });
    if (!supp) {
        o.zero_outside = S == 0;
        o.support_violation = S != 0;
        return o;
    }
    i64 best_w = -1;
    for (int j = 0; j < n; ++j) {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) ok = in_span(slots[static_cast<size_t>(i)]->g, slots[static_cast<size_t>(j)]->g, dd.me);
        if (!ok) continue;
        Rational W = wt.W_of(slots[static_cast<size_t>(j)]->g);
        i64 w = static_cast<i64>(numerator(Rational(W * wt.denom)));
        if (best_w < 0 || w < best_w) best_w = w;
    }
    if (best_w < 0) {
        o.zero_outside = S == 0;
        o.support_violation = S != 0;
        return o;
    }
    if (S == 0) return o;
    int E1 = dd.ke, E2 = dd.vd + dd.ke;
    for (const auto* s : slots) {
        E1 = std::min(E1, s->e1);
        E2 = std::min(E2, s->e2);
    }
    bool ok = bound_check(dd, n, S, best_w, E1, E2, o.ratio);
    o.bound_violation = !ok;
    o.tight = ok && std::fabs(o.ratio - 1) < 1e-12L;
    return o;
}

i64 exact_integer_S(const CycloSum& I0, int n, int k, i64 p) {
    if (!I0.is_rational()) throw VerificationError("I0 is not rational");
    Rational S = I0.to_rational() * rat_pow(p, 4 * n * k);
    if (denominator(S) != 1) throw VerificationError("p^{4nk} I0 is not an integer");
    return static_cast<i64>(numerator(S));
}

// Table of F[c][gamma] = sum over Y in class c of zeta^{tr(gamma Y) / u}, by a
// separable discrete Fourier transform over (Z/m)^4.
void dft4(std::vector<std::complex<double>>& f, i64 m, i64 mult) {
    std::vector<std::complex<double>> roots(static_cast<size_t>(m));
    for (i64 r = 0; r < m; ++r)
        roots[static_cast<size_t>(r)] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m));
    std::vector<std::complex<double>> line(static_cast<size_t>(m)), out(static_cast<size_t>(m));
    const i64 total = m * m * m * m;
    for (i64 stride = 1; stride < total; stride *= m) {
        for (i64 base = 0; base < total; ++base) {
            if ((base / stride) % m != 0) continue;
            for (i64 t = 0; t < m; ++t) line[static_cast<size_t>(t)] = f[static_cast<size_t>(base + t * stride)];
            for (i64 j = 0; j < m; ++j) {
                std::complex<double> s = 0;
                for (i64 t = 0; t < m; ++t) s += line[static_cast<size_t>(t)] * roots[static_cast<size_t>(t * j % m * mult % m)];
                out[static_cast<size_t>(j)] = s;
            }
            for (i64 t = 0; t < m; ++t) f[static_cast<size_t>(base + t * stride)] = out[static_cast<size_t>(t)];
        }
    }
}

}  // namespace

Thm81Verdict thm81_audit(const LocalIntegralRequest& req) {
    Thm81Verdict v{};
    v.I0 = I0_local(req);
    const DeltaData dd = delta_data(req.p, ints_of(req.delta));
    const i64 S = exact_integer_S(v.I0, req.n, dd.k, req.p);
    std::vector<SlotInfo> infos;
    for (const auto& g : req.gamma) infos.push_back(slot_info(dd, ints_of(g)));
    std::vector<const SlotInfo*> ptrs;
    for (const auto& s : infos) ptrs.push_back(&s);
    WTable wt = build_w_table(dd.eta, dd.p, dd.ke);
    CaseOutcome o = evaluate_case(dd, req.n, S, ptrs, wt);
    v.support_ok = !o.support_violation;
    v.bound_ok = !o.bound_violation;
    v.ratio_approx = o.ratio;
    v.witness_slot = -1;
    bool supp = std::all_of(infos.begin(), infos.end(), [](const SlotInfo& s) { return s.in_support; });
    if (supp) {
        for (int j = 0; j < req.n && v.witness_slot < 0; ++j) {
            bool ok = true;
            for (int i = 0; i < req.n && ok; ++i) ok = in_span(infos[static_cast<size_t>(i)].g, infos[static_cast<size_t>(j)].g, dd.me);
            if (ok) {
                v.witness_slot = j;
                v.W = wt.W_of(infos[static_cast<size_t>(j)].g);
            }
        }
    }
    v.has_witness = v.witness_slot >= 0;
    return v;
}

Thm81SweepReport thm81_sweep(i64 p, int n, const M2& delta, const std::vector<i64>& upsilon, bool exhaustive,
                             int samples, std::uint64_t seed) {
    require(p > 2 && is_prime(p), "thm81_sweep: p must be an odd prime");
    require((n == 1 || n == 2) && static_cast<int>(upsilon.size()) == n, "thm81_sweep: n must be 1 or 2");
    const DeltaData dd = delta_data(p, delta);
    Thm81SweepReport rep;
    rep.p = p;
    rep.n = n;
    rep.delta = delta;
    rep.exhaustive = exhaustive;
    const WTable wt = build_w_table(dd.eta, p, dd.ke);
    rep.w_sum = wt.sum();
    rep.w_bound = dd.ke + 1;
    const i64 m = dd.mk;
    const i64 G = m * m * m * m;
    auto tally_into = [](Thm81SweepReport& r, const CaseOutcome& o) {
        ++r.cases;
        r.nonzero += o.nonzero;
        r.zero_outside_support += o.zero_outside;
        r.support_violations += o.support_violation;
        r.bound_violations += o.bound_violation;
        r.tight += o.tight;
        r.max_ratio = std::max(r.max_ratio, o.ratio);
    };
    auto tally = [&](const CaseOutcome& o) { tally_into(rep, o); };
    if (!exhaustive) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<i64> d(0, m - 1);
        const i64 pv = ipow(p, dd.vd);
        const i64 mg = ipow(p, dd.k - dd.vd);
        const M2 etad = m2_dagger(reduce(dd.eta, mg), mg);
        for (int it = 0; it < samples; ++it) {
            std::vector<M2> gam(static_cast<size_t>(n));
            if (it % 2 == 0) {
                for (auto& g : gam) g = {d(rng), d(rng), d(rng), d(rng)};
            } else {
                // gamma'_i = lambda_i gamma'_1 + X_i eta^dagger: witness condition holds.
                M2 base{d(rng) % mg, d(rng) % mg, d(rng) % mg, d(rng) % mg};
                for (auto& g : gam) {
                    M2 X{d(rng) % mg, d(rng) % mg, d(rng) % mg, d(rng) % mg};
                    i64 lam = d(rng) % mg;
                    M2 gp = reduce(scale_s(lam, base, mg), mg);
                    M2 add = mul_s(X, etad, mg);
                    for (int t = 0; t < 4; ++t) gp[static_cast<size_t>(t)] = (gp[static_cast<size_t>(t)] + add[static_cast<size_t>(t)]) % mg;
                    g = reduce(scale_s(pv, gp, m), m);
                }
            }
            LocalIntegralRequest req{p, n, upsilon, Mat2R(Ring::integers(), delta[0], delta[1], delta[2], delta[3]), {}};
            for (const auto& g : gam) req.gamma.emplace_back(Ring::integers(), g[0], g[1], g[2], g[3]);
            CycloSum I0 = I0_local(req);
            i64 S = exact_integer_S(I0, n, dd.k, p);
            std::vector<SlotInfo> infos;
            for (const auto& g : gam) infos.push_back(slot_info(dd, g));
            std::vector<const SlotInfo*> ptrs;
            for (const auto& s : infos) ptrs.push_back(&s);
            tally(evaluate_case(dd, n, S, ptrs, wt));
        }
        return rep;
    }
    if (n == 2 && G > 20000) throw BudgetError("thm81_sweep: exhaustive n = 2 needs p^{4k} <= 20000");
    if (G > 500000) throw BudgetError("thm81_sweep: exhaustive residue space too large");
    const i64 uinv = inv_mod(det_i(delta) / m, m);
    const M2 dag = reduce({delta[3], -delta[1], -delta[2], delta[0]}, m);
    // Class of each Y per slot, and the Fourier tables for the classes needed.
    std::vector<std::vector<i64>> cls(static_cast<size_t>(n), std::vector<i64>(static_cast<size_t>(G)));
    for (int i = 0; i < n; ++i) {
        const i64 ups = md(upsilon[static_cast<size_t>(i)], m);
        for (i64 idx = 0; idx < G; ++idx) {
            M2 Y = dec4(idx, m);
            cls[static_cast<size_t>(i)][static_cast<size_t>(idx)] = enc4(mul_s(dag, scale_s(ups, mul_s(Y, Y, m), m), m), m);
        }
    }
    auto fourier = [&](int slot, i64 c) {
        std::vector<std::complex<double>> f(static_cast<size_t>(G), 0.0);
        for (i64 idx = 0; idx < G; ++idx) {
            if (cls[static_cast<size_t>(slot)][static_cast<size_t>(idx)] != c) continue;
            M2 Y = dec4(idx, m);
            f[static_cast<size_t>(enc4({Y[0], Y[2], Y[1], Y[3]}, m))] += 1.0;
        }
        dft4(f, m, uinv);
        return f;
    };
    std::vector<SlotInfo> info(static_cast<size_t>(G));
    for (i64 idx = 0; idx < G; ++idx) info[static_cast<size_t>(idx)] = slot_info(dd, dec4(idx, m));
    auto round_S = [&](double x) {
        double r = std::round(x);
        if (std::fabs(x - r) > 1e-3) throw VerificationError("Fourier evaluation is not integral");
        return static_cast<i64>(r);
    };
    // A few entries of the floating evaluation are recomputed exactly.
    const i64 spot_stride = std::max<i64>(1, (n == 1 ? G : G * G) / 7);
    auto spot_check = [&](i64 flat, i64 S) {
        if (flat % spot_stride != 0) return;
        LocalIntegralRequest req{p, n, upsilon, Mat2R(Ring::integers(), delta[0], delta[1], delta[2], delta[3]), {}};
        for (i64 g : n == 1 ? std::vector<i64>{flat} : std::vector<i64>{flat / G, flat % G}) {
            M2 x = dec4(g, m);
            req.gamma.emplace_back(Ring::integers(), x[0], x[1], x[2], x[3]);
        }
        if (exact_integer_S(I0_local(req), n, dd.k, p) != S)
            throw VerificationError("Fourier evaluation disagrees with the exact local integral");
    };
    if (n == 1) {
        auto f = fourier(0, 0);
        for (i64 g = 0; g < G; ++g) {
            i64 S = round_S(f[static_cast<size_t>(g)].real());
            if (std::fabs(f[static_cast<size_t>(g)].imag()) > 1e-3) throw VerificationError("imaginary part in I0");
            spot_check(g, S);
            tally(evaluate_case(dd, 1, S, {&info[static_cast<size_t>(g)]}, wt));
        }
    } else {
        std::set<i64> c1(cls[0].begin(), cls[0].end()), c2(cls[1].begin(), cls[1].end());
        std::vector<i64> used;
        for (i64 c : c1)
            if (c2.count(neg_class(c, m))) used.push_back(c);
        const i64 C = static_cast<i64>(used.size());
        Eigen::MatrixXd A(G, 2 * C), B(G, 2 * C);
        for (i64 ci = 0; ci < C; ++ci) {
            auto f1 = fourier(0, used[static_cast<size_t>(ci)]);
            auto f2 = fourier(1, neg_class(used[static_cast<size_t>(ci)], m));
            for (i64 g = 0; g < G; ++g) {
                A(g, ci) = f1[static_cast<size_t>(g)].real();
                A(g, C + ci) = f1[static_cast<size_t>(g)].imag();
                B(g, ci) = f2[static_cast<size_t>(g)].real();
                B(g, C + ci) = -f2[static_cast<size_t>(g)].imag();
            }
        }
        const i64 block = 256;
        const auto nblocks = static_cast<size_t>((G + block - 1) / block);
        std::vector<Thm81SweepReport> part(nblocks);
        for_each_shard(nblocks, [&](size_t b) {
            const i64 r0 = static_cast<i64>(b) * block;
            const i64 rows = std::min(block, G - r0);
            Eigen::MatrixXd P = A.middleRows(r0, rows) * B.transpose();
            for (i64 r = 0; r < rows; ++r)
                for (i64 g2 = 0; g2 < G; ++g2) {
                    i64 S = round_S(P(r, g2));
                    spot_check((r0 + r) * G + g2, S);
                    tally_into(part[b], evaluate_case(dd, 2, S, {&info[static_cast<size_t>(r0 + r)], &info[static_cast<size_t>(g2)]}, wt));
                }
        });
        for (const auto& q : part) {
            rep.cases += q.cases;
            rep.nonzero += q.nonzero;
            rep.zero_outside_support += q.zero_outside_support;
            rep.support_violations += q.support_violations;
            rep.bound_violations += q.bound_violations;
            rep.tight += q.tight;
            rep.max_ratio = std::max(rep.max_ratio, q.max_ratio);
        }
    }
    return rep;
}

CongruenceReport congruence_sweep(i64 p, const M2& delta, i64 upsilon, bool exhaustive, int samples, std::uint64_t seed) {
    require(p > 2 && is_prime(p), "congruence_sweep: p must be an odd prime");
    const DeltaData dd = delta_data(p, delta);
    CongruenceReport rep;
    rep.p = p;
    rep.delta = delta;
    rep.exhaustive = exhaustive;
    const i64 m = dd.mk;
    const i64 G = m * m * m * m;
    if (exhaustive && G * G * G > 3e8) throw BudgetError("congruence_sweep: exhaustive range too large");
    const i64 uinv = inv_mod(det_i(delta) / m, m);
    const M2 dag = reduce({delta[3], -delta[1], -delta[2], delta[0]}, m);
    const M2 etad = reduce({dd.eta[3], -dd.eta[1], -dd.eta[2], dd.eta[0]}, m);
    const i64 ups = md(upsilon, m);
    std::vector<M2> AY(static_cast<size_t>(G));
    for (i64 idx = 0; idx < G; ++idx) {
        M2 Y = dec4(idx, m);
        AY[static_cast<size_t>(idx)] = mul_s(dag, scale_s(ups, mul_s(Y, Y, m), m), m);
    }
    const i64 pv = ipow(p, dd.vd);
    auto check_pair = [&](const M2& Z, const M2& g) {
        std::vector<i64> counts(static_cast<size_t>(m), 0);
        for (i64 idx = 0; idx < G; ++idx) {
            M2 Y = dec4(idx, m);
            i64 ph = (tr_prod_s(Z, AY[static_cast<size_t>(idx)], m) + tr_prod_s(g, Y, m)) * uinv % m;
            ++counts[static_cast<size_t>(ph)];
        }
        ++rep.pairs;
        CycloSum I(p, dd.k, counts, 4 * dd.k);
        if (I.is_zero()) return;
        ++rep.nonzero;
        if (!std::all_of(g.begin(), g.end(), [&](i64 e) { return e % pv == 0; })) {
            ++rep.violations;
            return;
        }
        const M2 Ze = mul_s(Z, etad, m);
        const int cap = dd.vd + dd.ke;
        const int b = std::min(m2_val_cap(Ze, p, dd.k), cap);
        const int va = std::min(val_cap(md(Ze[0] + Ze[3], m), p, dd.k), cap) - b;
        const int target = std::min(dd.ke, b + va);
        const i64 mt = ipow(p, target);
        const M2 gp = {g[0] / pv, g[1] / pv, g[2] / pv, g[3] / pv};
        const M2 diff = reduce({gp[0] - gp[3], 2 * gp[1], 2 * gp[2], gp[3] - gp[0]}, mt);
        const M2 prod = mul_s(diff, reduce(dd.eta, mt), mt);
        if (prod != M2{0, 0, 0, 0}) ++rep.violations;
    };
    if (exhaustive) {
        for (i64 zi = 0; zi < G; ++zi)
            for (i64 gi = 0; gi < G; ++gi) check_pair(dec4(zi, m), dec4(gi, m));
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<i64> d(0, m - 1);
        for (int it = 0; it < samples; ++it) {
            M2 Z{d(rng), d(rng), d(rng), d(rng)};
            M2 g{d(rng), d(rng), d(rng), d(rng)};
            if (it % 2 == 1) g = reduce(scale_s(pv, g, m), m);
            check_pair(Z, g);
        }
    }
    return rep;
}

}  // namespace qcl
