#include "qcl/geometry.hpp"

#include <algorithm>
#include <map>

namespace qcl {

namespace {

// Field arithmetic for elimination: q = 0 means Q.
struct FieldOps {
    i64 q;
    Rational norm(const Rational& x) const {
        if (q == 0) return x;
        const i64 num = md(static_cast<i64>(numerator(x) % q), q);
        const i64 den = md(static_cast<i64>(denominator(x) % q), q);
        return Rational(md(num * inv_mod(den, q), q));
    }
    Rational div(const Rational& a, const Rational& b) const {
        if (q == 0) return a / b;
        const i64 bi = inv_mod(static_cast<i64>(numerator(b)), q);
        return norm(a * bi);
    }
};

using Matrix = std::vector<std::vector<Rational>>;

// In-place reduced row echelon form; returns the pivot columns.
std::vector<size_t> rref(Matrix& a, const FieldOps& f) {
    std::vector<size_t> piv;
    if (a.empty()) return piv;
    size_t r = 0;
    const size_t cols = a[0].size();
    for (size_t c = 0; c < cols && r < a.size(); ++c) {
        size_t s = r;
        while (s < a.size() && a[s][c] == 0) ++s;
        if (s == a.size()) continue;
        std::swap(a[r], a[s]);
        const Rational lead = a[r][c];
        for (auto& e : a[r]) e = f.div(e, lead);
        for (size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational k = a[i][c];
            for (size_t t = 0; t < cols; ++t) a[i][t] = f.norm(a[i][t] - k * a[r][t]);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

int rank_of(Matrix a, const FieldOps& f) { return static_cast<int>(rref(a, f).size()); }

// Kernel basis of a (rows x cols), reduced: each vector has a 1 at its free column.
Matrix kernel(Matrix a, const FieldOps& f) {
    const size_t cols = a[0].size();
    auto piv = rref(a, f);
    Matrix out;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (std::find(piv.begin(), piv.end(), fc) != piv.end()) continue;
        std::vector<Rational> v(cols, 0);
        v[fc] = 1;
        for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = f.norm(-a[r][fc]);
        out.push_back(v);
    }
    return out;
}

FieldOps ops_of(const Ring& r) {
    require(r.kind == Ring::Q || (r.kind == Ring::ModPN && r.N == 1), "W must live over F_q or Q");
    if (r.kind == Ring::Q) return {0};
    require(r.p % 2 == 1, "characteristic 2 is excluded");
    return {r.p};
}

Mat2R unit_matrix(const Ring& r, int k) {
    std::array<Rational, 4> e{0, 0, 0, 0};
    e[static_cast<size_t>(k)] = 1;
    return {r, e[0], e[1], e[2], e[3]};
}

// Matrix of A -> WA + AW on (a11, a12, a21, a22).
Matrix anticommutator(const Mat2R& W, const FieldOps& f) {
    Matrix m(4, std::vector<Rational>(4, 0));
    for (int k = 0; k < 4; ++k) {
        const Mat2R A = unit_matrix(W.ring(), k);
        const Mat2R img = W * A + A * W;
        for (int r = 0; r < 4; ++r) m[static_cast<size_t>(r)][static_cast<size_t>(k)] = f.norm(img.entries()[static_cast<size_t>(r)]);
    }
    return m;
}

// Row-echelon canonical form of L(W) for q small: ints in [0, q).
using Space = std::vector<std::array<i64, 4>>;

struct SmallField {
    i64 q;
    std::vector<i64> inv;
    explicit SmallField(i64 q_) : q(q_), inv(static_cast<size_t>(q_), 0) {
        for (i64 a = 1; a < q; ++a) inv[static_cast<size_t>(a)] = inv_mod(a, q);
    }
};

Space rref_small(std::vector<std::array<i64, 4>> a, const SmallField& F) {
    size_t r = 0;
    for (size_t c = 0; c < 4 && r < a.size(); ++c) {
        size_t s = r;
        while (s < a.size() && a[s][c] == 0) ++s;
        if (s == a.size()) continue;
        std::swap(a[r], a[s]);
        const i64 li = F.inv[static_cast<size_t>(a[r][c])];
        for (auto& e : a[r]) e = e * li % F.q;
        for (size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            const i64 k = a[i][c];
            for (size_t t = 0; t < 4; ++t) a[i][t] = md(a[i][t] - k * a[r][t], F.q);
        }
        ++r;
    }
    a.resize(r);
    return a;
}

M2 decode(i64 code, i64 q) {
    M2 w;
    for (auto& e : w) {
        e = code % q;
        code /= q;
    }
    return w;
}

Space lw_small(const M2& W, const SmallField& F) {
    // Kernel of the anticommutator map, returned in canonical echelon form.
    std::vector<std::array<i64, 4>> rows(4);
    for (int k = 0; k < 4; ++k) {
        M2 A{0, 0, 0, 0};
        A[static_cast<size_t>(k)] = 1;
        const M2 x = m2_mul(W, A, F.q), y = m2_mul(A, W, F.q);
        for (int r = 0; r < 4; ++r) rows[static_cast<size_t>(r)][static_cast<size_t>(k)] = md(x[static_cast<size_t>(r)] + y[static_cast<size_t>(r)], F.q);
    }
    Space e = rref_small(rows, F);
    std::vector<size_t> piv;
    for (const auto& row : e) {
        size_t c = 0;
        while (row[c] == 0) ++c;
        piv.push_back(c);
    }
    std::vector<std::array<i64, 4>> ker;
    for (size_t fc = 0; fc < 4; ++fc) {
        if (std::find(piv.begin(), piv.end(), fc) != piv.end()) continue;
        std::array<i64, 4> v{0, 0, 0, 0};
        v[fc] = 1;
        for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = md(-e[r][fc], F.q);
        ker.push_back(v);
    }
    return rref_small(ker, F);
}

int small_rank(std::vector<std::array<i64, 4>> a, const SmallField& F) { return static_cast<int>(rref_small(std::move(a), F).size()); }

// Hessian of trd(W Y^2) on one slot over Z/q: H_ab = trd(W (E_a E_b + E_b E_a)).
std::array<std::array<i64, 4>, 4> slot_hessian(const M2& W, i64 q) {
    std::array<std::array<i64, 4>, 4> h{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            M2 Ea{0, 0, 0, 0}, Eb{0, 0, 0, 0};
            Ea[static_cast<size_t>(a)] = 1;
            Eb[static_cast<size_t>(b)] = 1;
            const M2 s = m2_mul(Ea, Eb, q), t = m2_mul(Eb, Ea, q);
            const M2 sum{md(s[0] + t[0], q), md(s[1] + t[1], q), md(s[2] + t[2], q), md(s[3] + t[3], q)};
            h[static_cast<size_t>(a)][static_cast<size_t>(b)] = m2_trace_prod(W, sum, q);
        }
    return h;
}

int hessian_rank_small(const M2& W, const std::vector<i64>& upsilon, const SmallField& F) {
    const auto h = slot_hessian(W, F.q);
    const size_t n = upsilon.size();
    Matrix big(4 * n, std::vector<Rational>(4 * n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t a = 0; a < 4; ++a)
            for (size_t b = 0; b < 4; ++b) big[4 * i + a][4 * i + b] = md(upsilon[i] * h[a][b], F.q);
    return rank_of(big, {F.q});
}

}  // namespace

int lw_dim_formula(const Mat2R& W) {
    const FieldOps f = ops_of(W.ring());
    const bool tr0 = f.norm(W.trd()) == 0, det0 = f.norm(W.nrd()) == 0;
    return std::max(tr0 ? 2 : 0, det0 ? 1 : 0);
}

LWSpace lw_kernel(const Mat2R& W) {
    const FieldOps f = ops_of(W.ring());
    require(!W.is_zero(), "W must be nonzero");
    LWSpace out{W, 0, {}};
    Matrix ker = kernel(anticommutator(W, f), f);
    rref(ker, f);
    for (const auto& v : ker) out.basis.emplace_back(W.ring(), v[0], v[1], v[2], v[3]);
    out.dim = static_cast<int>(out.basis.size());
    if (out.dim != lw_dim_formula(W)) throw VerificationError("dim L(W) disagrees with the closed formula");
    return out;
}

int hessian_rank(const Mat2R& W, const std::vector<i64>& upsilon) {
    const FieldOps f = ops_of(W.ring());
    require(!W.is_zero(), "W must be nonzero");
    require(!upsilon.empty(), "need at least one slot");
    const size_t n = upsilon.size();
    Matrix big(4 * n, std::vector<Rational>(4 * n, 0));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Mat2R Ea = unit_matrix(W.ring(), a), Eb = unit_matrix(W.ring(), b);
            const Rational h = (W * (Ea * Eb + Eb * Ea)).trd();
            for (size_t i = 0; i < n; ++i)
                big[4 * i + static_cast<size_t>(a)][4 * i + static_cast<size_t>(b)] = f.norm(upsilon[i] * h);
        }
    const int r = rank_of(big, f);
    if (r < 2 * static_cast<int>(n)) throw VerificationError("Hessian rank below 2n");
    if (f.q == 0 && W.trd() == 0 && r != 2 * static_cast<int>(n))
        throw VerificationError("traceless W must give Hessian rank exactly 2n");
    return r;
}

int hessian_rank(const HurwitzQuat& W, const std::vector<i64>& upsilon) {
    require(W.nrd() != 0, "W must be nonzero");
    require(!upsilon.empty(), "need at least one slot");
    // Hamilton basis 1, i, j, k in doubled coordinates.
    const std::array<HurwitzQuat, 4> e{HurwitzQuat::one(), HurwitzQuat::i(), HurwitzQuat::j(), HurwitzQuat::k()};
    const size_t n = upsilon.size();
    Matrix big(4 * n, std::vector<Rational>(4 * n, 0));
    for (size_t a = 0; a < 4; ++a)
        for (size_t b = 0; b < 4; ++b) {
            const i64 h = (W * (e[a] * e[b] + e[b] * e[a])).trd();
            for (size_t i = 0; i < n; ++i) big[4 * i + a][4 * i + b] = Rational(upsilon[i] * h);
        }
    const int r = rank_of(big, {0});
    if (r < 2 * static_cast<int>(n)) throw VerificationError("Hessian rank below 2n");
    if (W.trd() == 0 && r != 2 * static_cast<int>(n)) throw VerificationError("traceless W must give Hessian rank exactly 2n");
    return r;
}

IntersectionAudit pairwise_intersection_audit(i64 q) {
    require(q == 3 || q == 5 || q == 7, "q must be 3, 5 or 7");
    const SmallField F(q);
    const i64 total = ipow(q, 4);
    std::vector<Space> L(static_cast<size_t>(total));
    for (i64 c = 1; c < total; ++c) L[static_cast<size_t>(c)] = lw_small(decode(c, q), F);
    IntersectionAudit rep{q, 0, 0, 0, 0};
    for (i64 a = 1; a < total; ++a)
        for (i64 b = 1; b < total; ++b) {
            ++rep.pairs;
            const Space& La = L[static_cast<size_t>(a)];
            const Space& Lb = L[static_cast<size_t>(b)];
            if (La == Lb) {
                if (La.size() == 2) {
                    const M2 wa = decode(a, q), wb = decode(b, q);
                    bool prop = false;
                    for (i64 s = 1; s < q && !prop; ++s)
                        prop = wa == M2{md(s * wb[0], q), md(s * wb[1], q), md(s * wb[2], q), md(s * wb[3], q)};
                    if (!prop) ++rep.proportionality_violations;
                }
                continue;
            }
            std::vector<std::array<i64, 4>> both = La;
            both.insert(both.end(), Lb.begin(), Lb.end());
            const int inter = static_cast<int>(La.size() + Lb.size()) - small_rank(both, F);
            rep.max_intersection_dim = std::max(rep.max_intersection_dim, inter);
            if (inter > 1) ++rep.intersection_violations;
        }
    return rep;
}

GeometryAudit geometry_audit(i64 q) {
    require(q == 3 || q == 5 || q == 7, "q must be 3, 5 or 7");
    const SmallField F(q);
    const i64 total = ipow(q, 4);
    GeometryAudit g{};
    g.q = q;
    g.nonzero_W = total - 1;
    g.min_hessian_rank = {1 << 20, 1 << 20};
    // Membership table: A in L(W) iff WA + AW = 0.
    auto anti_zero = [&](const M2& w, const M2& a) {
        const M2 x = m2_mul(w, a, q), y = m2_mul(a, w, q);
        for (size_t t = 0; t < 4; ++t)
            if (md(x[t] + y[t], q) != 0) return false;
        return true;
    };
    for (i64 c = 1; c < total; ++c) {
        const M2 W = decode(c, q);
        const Space L = lw_small(W, F);
        const bool tr0 = m2_trd(W, q) == 0, det0 = m2_det(W, q) == 0;
        if (static_cast<int>(L.size()) != std::max(tr0 ? 2 : 0, det0 ? 1 : 0)) ++g.dim_formula_violations;
        for (i64 d = 0; d < total; ++d) {
            const M2 A = decode(d, q);
            if (anti_zero(W, A) != anti_zero(A, W)) ++g.symmetry_violations;
        }
        if (tr0) {
            // Enumerate L(W) through its basis.
            bool invertible = false, traceless = true;
            const i64 span = ipow(q, static_cast<int>(L.size()));
            for (i64 s = 0; s < span; ++s) {
                M2 A{0, 0, 0, 0};
                i64 t = s;
                for (const auto& b : L) {
                    const i64 k = t % q;
                    t /= q;
                    for (size_t u = 0; u < 4; ++u) A[u] = md(A[u] + k * b[u], q);
                }
                traceless = traceless && m2_trd(A, q) == 0;
                invertible = invertible || m2_det(A, q) != 0;
            }
            if (!traceless || !invertible) ++g.trace_zero_violations;
        }
        for (int n = 1; n <= 2; ++n)
            for (int mask = 0; mask < (1 << n); ++mask) {
                std::vector<i64> ups;
                for (int i = 0; i < n; ++i) ups.push_back(mask >> i & 1 ? q - 1 : 1);
                const int r = hessian_rank_small(W, ups, F);
                g.min_hessian_rank[static_cast<size_t>(n - 1)] = std::min(g.min_hessian_rank[static_cast<size_t>(n - 1)], r);
                if (r < 2 * n) ++g.hessian_violations;
            }
    }
    g.intersections = pairwise_intersection_audit(q);
    g.ok = g.dim_formula_violations == 0 && g.symmetry_violations == 0 && g.trace_zero_violations == 0 &&
           g.hessian_violations == 0 && g.intersections.intersection_violations == 0 &&
           g.intersections.proportionality_violations == 0;
    return g;
}

}  // namespace qcl
