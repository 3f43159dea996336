#include "qcl/padic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qcl {

PadicScaled PadicScaled::make(i64 p, i64 unit, int val, int N) {
    i64 m = ipow(p, N);
    unit = md(unit, m);
    require(unit % p != 0, "unit part must be a unit");
    return {unit, val, N};
}

CycloSum psi_value(i64 p, const PadicScaled& x) {
    if (x.is_zero() || x.val >= 0) return CycloSum::rational(p, 1);
    const int k = -x.val;
    if (x.N < k) throw BudgetError("psi: unit known to insufficient precision");
    return CycloSum::root_of_unity(p, k, md(x.unit, ipow(p, k)));
}

CycloSum gauss_sum(const GaussSumParams& g) {
    const i64 p = g.p;
    require(!g.t.is_zero(), "gauss_sum: t must be nonzero");
    const int va = g.a.val, vt = g.t.val, vx = g.xi.val;
    int k = 0;
    if (!g.a.is_zero()) k = std::max(k, vt - va);
    if (!g.xi.is_zero()) k = std::max(k, vt - vx);
    if (k == 0) return CycloSum::rational(p, 1);
    for (const PadicScaled* s : {&g.a, &g.t, &g.xi})
        if (!s->is_zero() && s->N < k) throw BudgetError("gauss_sum: insufficient precision");
    if (k > 12) throw BudgetError("gauss_sum: conductor too large");
    const i64 pk = ipow(p, k);
    const i64 tinv = inv_mod(g.t.unit, pk);
    i64 ca = 0, cx = 0;
    if (!g.a.is_zero()) ca = mulmod(mulmod(g.a.unit, ipow(p, va - vt + k), pk), tinv, pk);
    if (!g.xi.is_zero()) cx = mulmod(mulmod(g.xi.unit, ipow(p, vx - vt + k), pk), tinv, pk);
    std::vector<i64> counts(static_cast<size_t>(pk), 0);
    for (i64 y = 0; y < pk; ++y) {
        i64 r = md(mulmod(ca, mulmod(y, y, pk), pk) + mulmod(cx, y, pk), pk);
        ++counts[static_cast<size_t>(r)];
    }
    return {p, k, std::move(counts), k};
}

namespace {

// Elementary operations keep A = k1 * M * k2 modulo m.
struct SmithState {
    i64 m;
    M2 M, k1, k2;

    void swap_rows() {
        std::swap(M[0], M[2]);
        std::swap(M[1], M[3]);
        std::swap(k1[0], k1[1]);
        std::swap(k1[2], k1[3]);
    }
    void swap_cols() {
        std::swap(M[0], M[1]);
        std::swap(M[2], M[3]);
        std::swap(k2[0], k2[2]);
        std::swap(k2[1], k2[3]);
    }
    // row1 -= c row0; k1 gains column0 += c column1
    void row_elim(i64 c) {
        M[2] = md(M[2] - mulmod(c, M[0], m), m);
        M[3] = md(M[3] - mulmod(c, M[1], m), m);
        k1[0] = md(k1[0] + mulmod(c, k1[1], m), m);
        k1[2] = md(k1[2] + mulmod(c, k1[3], m), m);
    }
    // col1 -= c col0; k2 gains row0 += c row1
    void col_elim(i64 c) {
        M[1] = md(M[1] - mulmod(c, M[0], m), m);
        M[3] = md(M[3] - mulmod(c, M[2], m), m);
        k2[0] = md(k2[0] + mulmod(c, k2[2], m), m);
        k2[1] = md(k2[1] + mulmod(c, k2[3], m), m);
    }
};

// x / (u p^v) for x divisible by p^v, modulo m.
i64 val_div(i64 x, i64 u, int v, i64 p, i64 m) {
    i64 t = x / ipow(p, v);
    return mulmod(t, inv_mod(u, m), m);
}

}  // namespace

Cartan cartan_reduce(const M2& A, i64 p, int N) {
    const i64 m = ipow(p, N);
    SmithState s{m, {md(A[0], m), md(A[1], m), md(A[2], m), md(A[3], m)}, {1, 0, 0, 1}, {1, 0, 0, 1}};
    int best = inf_val, bi = -1;
    for (int e = 0; e < 4; ++e) {
        int v = s.M[e] == 0 ? inf_val : vp(s.M[e], p);
        if (v < best) {
            best = v;
            bi = e;
        }
    }
    if (bi < 0) return {p, N, s.k1, s.k2, inf_val, inf_val};
    if (bi >= 2) s.swap_rows();
    if (bi % 2 == 1) s.swap_cols();
    const int v = best;
    const i64 u = s.M[0] / ipow(p, v);
    s.row_elim(val_div(s.M[2], u, v, p, m));
    s.col_elim(val_div(s.M[1], u, v, p, m));
    const i64 d = s.M[3];
    const int w = d == 0 ? inf_val : vp(d, p);
    const i64 u2 = d == 0 ? 1 : d / ipow(p, w);
    // Absorb the units into k1.
    s.k1[0] = mulmod(s.k1[0], u, m);
    s.k1[2] = mulmod(s.k1[2], u, m);
    s.k1[1] = mulmod(s.k1[1], u2, m);
    s.k1[3] = mulmod(s.k1[3], u2, m);
    // Order as diag(p^n1, p^n2) with n1 >= n2.
    std::swap(s.k1[0], s.k1[1]);
    std::swap(s.k1[2], s.k1[3]);
    std::swap(s.k2[0], s.k2[2]);
    std::swap(s.k2[1], s.k2[3]);
    return {p, N, s.k1, s.k2, w, v};
}

Cartan cartan_decompose(const Mat2R& A, i64 p, int N) {
    require(A.ring().kind == Ring::Z, "cartan_decompose expects an integer matrix");
    require(is_prime(p), "cartan_decompose: p must be prime");
    Rational det = A.nrd();
    if (det == 0) throw PreconditionError("cartan_decompose: singular matrix");
    const int vdet = vp(det, p);
    if (N < vdet + 2) throw BudgetError("cartan_decompose: precision below v(det) + guard");
    auto e = A.ints();
    return cartan_reduce(e, p, N);
}

bool coset_rep_ok(const Mat2R& Y, i64 p) {
    if (Y.is_zero()) return false;
    int vnorm = inf_val;
    for (const auto& x : Y.entries()) vnorm = std::min(vnorm, vp(x, p));
    Rational det = Y.nrd(), tr = Y.trd();
    if (det == 0 || vp(det, p) > vnorm) return false;
    const int v2 = p == 2 ? 1 : 0;
    return tr != 0 && vp(tr, p) <= v2;
}

Mat2R normalize_coset_rep(const Mat2R& Zin, i64 p) {
    require(is_prime(p), "normalize_coset_rep: p must be prime");
    Ring q = Ring::rationals(p);
    Mat2R Z = Zin.to_ring(q);
    int e = 0;
    for (const auto& x : Z.entries())
        if (x != 0) e = std::max(e, -vp(x, p));
    Rational pe = rat_pow(p, e);
    for (int guard = 4; guard <= 64; guard *= 2) {
        M2 A;
        for (int t = 0; t < 4; ++t) {
            Rational x = Z.entries()[static_cast<size_t>(t)] * pe;
            A[static_cast<size_t>(t)] = static_cast<i64>(BigInt(numerator(x)));
        }
        Rational det = Rational(A[0]) * A[3] - Rational(A[1]) * A[2];
        int vdet = det == 0 ? 0 : vp(det, p);
        int N = e + vdet + guard;
        if (static_cast<double>(N) * std::log2(static_cast<double>(p)) > 60)
            throw BudgetError("normalize_coset_rep: required precision exceeds int64");
        const i64 m = ipow(p, N);
        Cartan c = cartan_reduce(A, p, N);
        // Invariant factors of Z are p^{n_i - e}.
        auto lambda = [&](int n) -> i64 {
            if (n >= inf_val) return 1;
            int nz = n - e;
            return nz > 0 ? md(1 - ipow(p, nz), m) : 0;
        };
        M2 D{lambda(c.n1), 0, 0, lambda(c.n2)};
        M2 W = m2_mul(m2_mul(c.k1, D, m), c.k2, m);
        Mat2R Y = Z + Mat2R(q, W[0], W[1], W[2], W[3]);
        if (!coset_rep_ok(Y, p)) {
            // Trace fix: add diag(0, 1) or diag(0, alpha).
            int vnorm = inf_val;
            for (const auto& x : Y.entries()) vnorm = std::min(vnorm, vp(x, p));
            std::vector<i64> alphas;
            if (vp(Y(0, 0), p) > vnorm) {
                alphas = {1};
            } else {
                for (i64 a = 1; a < p; ++a) alphas.push_back(a);
                if (p == 2) alphas.push_back(2);
            }
            for (i64 a : alphas) {
                Mat2R cand = Y + Mat2R(q, 0, 0, 0, a);
                if (coset_rep_ok(cand, p)) {
                    Y = cand;
                    break;
                }
            }
        }
        if (coset_rep_ok(Y, p)) return Y;
    }
    throw VerificationError("normalize_coset_rep: construction did not meet its predicates");
}

IMat uniform_diagonalize(const IMat& Hin, i64 p, int N) {
    require(p > 2 && is_prime(p), "uniform_diagonalize: p must be an odd prime");
    const size_t n = Hin.size();
    require(n >= 1 && n <= 16, "uniform_diagonalize: dimension must be in [1, 16]");
    if (N < 1) throw BudgetError("uniform_diagonalize: precision exhausted");
    const i64 m = ipow(p, N);
    IMat G(n, std::vector<i64>(n)), A(n, std::vector<i64>(n, 0));
    for (size_t i = 0; i < n; ++i) {
        require(Hin[i].size() == n, "uniform_diagonalize: matrix must be square");
        A[i][i] = 1;
        for (size_t j = 0; j < n; ++j) {
            require(md(Hin[i][j] - Hin[j][i], m) == 0, "uniform_diagonalize: matrix must be symmetric");
            G[i][j] = md(Hin[i][j], m);
        }
    }
    auto val = [&](i64 x) { return x == 0 ? inf_val : vp(x, p); };
    // Basis change e_dst += c e_src applied to A and to the Gram matrix.
    auto add_col = [&](size_t dst, size_t src, i64 c) {
        for (size_t r = 0; r < n; ++r) A[r][dst] = md(A[r][dst] + mulmod(c, A[r][src], m), m);
        for (size_t r = 0; r < n; ++r) G[r][dst] = md(G[r][dst] + mulmod(c, G[r][src], m), m);
        for (size_t r = 0; r < n; ++r) G[dst][r] = md(G[dst][r] + mulmod(c, G[src][r], m), m);
    };
    auto swap_basis = [&](size_t a, size_t b) {
        if (a == b) return;
        for (size_t r = 0; r < n; ++r) std::swap(A[r][a], A[r][b]);
        std::swap(G[a], G[b]);
        for (size_t r = 0; r < n; ++r) std::swap(G[r][a], G[r][b]);
    };
    for (size_t pos = 0; pos < n; ++pos) {
        int best = inf_val;
        size_t bi = 0, bj = 0;
        for (size_t i = pos; i < n; ++i)
            for (size_t j = pos; j < n; ++j)
                if (val(G[i][j]) < best) {
                    best = val(G[i][j]);
                    bi = i;
                    bj = j;
                }
        if (best >= inf_val) break;
        size_t piv = n;
        for (size_t i = pos; i < n; ++i)
            if (val(G[i][i]) == best) {
                piv = i;
                break;
            }
        if (piv == n) {
            // Q(e_i + e_j) has the valuation of the off-diagonal entry (p odd).
            add_col(bi, bj, 1);
            piv = bi;
        }
        swap_basis(pos, piv);
        const int v = val(G[pos][pos]);
        const i64 u = G[pos][pos] / ipow(p, v);
        for (size_t l = pos + 1; l < n; ++l) {
            if (G[pos][l] == 0) continue;
            i64 c = val_div(G[pos][l], u, v, p, m);
            add_col(l, pos, md(-c, m));
        }
    }
    return A;
}

ModuleGenerator module_generator(const HurwitzQuat& eta, i64 p) {
    require(p > 2 && is_prime(p), "module_generator: p must be an odd prime");
    require(eta.is_primitive(), "module_generator: eta must be primitive");
    const int k = vp(eta.nrd(), p);
    if (k == 0 || k >= inf_val) throw PreconditionError("module_generator: p does not divide nrd(eta)");
    const i64 m = ipow(p, k);
    Splitting s(p, k);
    const M2 E = s(eta), Ed = m2_dagger(E, m);
    const HurwitzQuat cands[] = {HurwitzQuat::one(), HurwitzQuat::i(), HurwitzQuat::j(), HurwitzQuat::omega()};
    for (const auto& X : cands) {
        M2 Nm = m2_mul(m2_mul(Ed, s(X), m), E, m);
        if (m2_val(Nm, p, k) == 0) {
            if (ipow(p, 4 * k) <= 1000000) {
                std::set<M2> image;
                M2 Y{0, 0, 0, 0};
                for (i64 idx = 0; idx < ipow(m, 4); ++idx) {
                    i64 r = idx;
                    for (int t = 0; t < 4; ++t) {
                        Y[static_cast<size_t>(t)] = r % m;
                        r /= m;
                    }
                    image.insert(m2_mul(m2_mul(Ed, Y, m), E, m));
                }
                if (static_cast<i64>(image.size()) != m)
                    throw VerificationError("module_generator: image size differs from p^k");
            }
            return {X, m};
        }
    }
    throw VerificationError("module_generator: no basis element generates the module");
}

}  // namespace qcl
