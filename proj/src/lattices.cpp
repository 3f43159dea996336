#include "qcl/lattices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qcl {

namespace {

BigInt floordiv(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void axpy(std::vector<BigInt>& y, const BigInt& k, const std::vector<BigInt>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] -= k * x[i];
}

Vec4 to_doubled(const Vec4& b) { return {2 * b[0] + b[3], 2 * b[1] + b[3], 2 * b[2] + b[3], b[3]}; }

}  // namespace

std::vector<std::vector<BigInt>> hnf_rows(std::vector<std::vector<BigInt>> rows) {
    if (rows.empty()) return rows;
    const size_t d = rows[0].size();
    size_t r = 0;
    for (size_t c = 0; c < d && r < rows.size(); ++c) {
        while (true) {
            size_t best = rows.size();
            for (size_t i = r; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c]))) best = i;
            if (best == rows.size()) break;
            std::swap(rows[r], rows[best]);
            bool done = true;
            for (size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                axpy(rows[i], rows[i][c] / rows[r][c], rows[r]);
                done = done && rows[i][c] == 0;
            }
            if (done) break;
        }
        if (rows[r][c] == 0) continue;
        if (rows[r][c] < 0)
            for (auto& e : rows[r]) e = -e;
        for (size_t i = 0; i < r; ++i) axpy(rows[i], floordiv(rows[i][c], rows[r][c]), rows[r]);
        ++r;
    }
    rows.resize(r);
    return rows;
}

std::vector<std::vector<BigInt>> congruence_lattice(int dim, const std::vector<std::vector<i64>>& rows,
                                                    const std::vector<i64>& moduli) {
    require(rows.size() == moduli.size(), "one modulus per congruence");
    std::vector<std::vector<BigInt>> basis(static_cast<size_t>(dim), std::vector<BigInt>(static_cast<size_t>(dim), 0));
    for (int i = 0; i < dim; ++i) basis[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    for (size_t r = 0; r < rows.size(); ++r) {
        const i64 q = moduli[r];
        require(q >= 1, "moduli must be positive");
        if (q == 1) continue;
        std::vector<i64> v(basis.size());
        for (size_t i = 0; i < basis.size(); ++i) {
            BigInt s = 0;
            for (int t = 0; t < dim; ++t) s += basis[i][static_cast<size_t>(t)] * rows[r][static_cast<size_t>(t)];
            BigInt red = s % q;
            if (red < 0) red += q;
            v[i] = static_cast<i64>(red);
        }
        // Euclid on the values, mirrored on the basis vectors.
        while (true) {
            size_t piv = v.size();
            for (size_t i = 0; i < v.size(); ++i)
                if (v[i] != 0 && (piv == v.size() || v[i] < v[piv])) piv = i;
            if (piv == v.size()) break;
            bool others = false;
            for (size_t i = 0; i < v.size(); ++i) {
                if (i == piv || v[i] == 0) continue;
                const i64 k = v[i] / v[piv];
                v[i] -= k * v[piv];
                axpy(basis[i], k, basis[piv]);
                others = others || v[i] != 0;
            }
            if (!others) {
                const i64 f = q / std::gcd(v[piv], q);
                for (auto& e : basis[piv]) e *= f;
                break;
            }
        }
        basis = hnf_rows(std::move(basis));
    }
    return basis;
}

namespace {

Lattice4 from_rows(const std::vector<std::vector<BigInt>>& rows) {
    auto h = hnf_rows(rows);
    require(h.size() == 4, "generators do not span a full lattice");
    Lattice4 L;
    BigInt idx = 1;
    for (size_t i = 0; i < 4; ++i) {
        Vec4 v;
        for (size_t t = 0; t < 4; ++t) v[t] = static_cast<i64>(h[i][t]);
        L.hnf.push_back(v);
        idx *= h[i][i];
    }
    L.index = static_cast<i64>(idx);
    return L;
}

std::vector<BigInt> coords_big(const HurwitzQuat& x) {
    auto b = x.basis_coords();
    return {b[0], b[1], b[2], b[3]};
}

HurwitzQuat unit_vec(int k) {
    Vec4 e{0, 0, 0, 0};
    e[static_cast<size_t>(k)] = 1;
    return HurwitzQuat::from_basis(e);
}

}  // namespace

bool Lattice4::contains(const HurwitzQuat& x) const {
    Vec4 r = x.basis_coords();
    for (size_t i = 0; i < 4; ++i) {
        const i64 piv = hnf[i][i];
        if (r[i] % piv != 0) return false;
        const i64 t = r[i] / piv;
        for (size_t c = i; c < 4; ++c) r[c] -= t * hnf[i][c];
    }
    return true;
}

std::vector<HurwitzQuat> Lattice4::basis() const {
    std::vector<HurwitzQuat> out;
    for (const auto& v : hnf) out.push_back(HurwitzQuat::from_basis(v));
    return out;
}

Lattice4 lattice_from_generators(const std::vector<HurwitzQuat>& gens) {
    std::vector<std::vector<BigInt>> rows;
    for (const auto& g : gens) rows.push_back(coords_big(g));
    return from_rows(rows);
}

Lattice4 lattice_basis(i64 H, i64 K, i64 m, const HurwitzQuat& eta, const HurwitzQuat& M0) {
    require(H >= 1 && K >= 1 && m >= 1, "H, K, m must be positive");
    require(eta.is_primitive(), "eta must be primitive");
    require(m % K == 0 && eta.nrd() % m == 0, "need K | m | nrd(eta)");
    for (auto [p, e] : factorize(K)) require(p != 2, "primes dividing K must be odd");
    // Unknowns (x_1..x_4, a): M = sum x_k e_k and the multiplier of M0 eta.
    std::vector<std::vector<i64>> rows;
    std::vector<i64> mods;
    Vec4 w = (M0 * eta).basis_coords();
    std::array<Vec4, 4> skew, right;
    for (int k = 0; k < 4; ++k) {
        HurwitzQuat e = unit_vec(k);
        skew[static_cast<size_t>(k)] = ((e - e.conj()) * eta).basis_coords();
        right[static_cast<size_t>(k)] = (e * eta).basis_coords();
    }
    for (int r = 0; r < 4; ++r) {
        std::vector<i64> h(5, 0), s(5, 0), t(5, 0);
        h[static_cast<size_t>(r)] = 1;
        for (int k = 0; k < 4; ++k) {
            s[static_cast<size_t>(k)] = skew[static_cast<size_t>(k)][static_cast<size_t>(r)];
            t[static_cast<size_t>(k)] = right[static_cast<size_t>(k)][static_cast<size_t>(r)];
        }
        t[4] = -w[static_cast<size_t>(r)];
        rows.push_back(h);
        mods.push_back(H);
        rows.push_back(s);
        mods.push_back(K);
        rows.push_back(t);
        mods.push_back(m);
    }
    auto big = congruence_lattice(5, rows, mods);
    for (auto& r : big) r.resize(4);
    return from_rows(big);
}

bool in_key_lattice(const HurwitzQuat& M, i64 H, i64 K, i64 m, const HurwitzQuat& eta, const HurwitzQuat& M0) {
    for (i64 c : M.basis_coords())
        if (c % H != 0) return false;
    if (!((M - M.conj()) * eta).divisible_by(K)) return false;
    const HurwitzQuat a = M * eta, b = M0 * eta;
    for (i64 t = 0; t < m; ++t)
        if ((a - t * b).divisible_by(m)) return true;
    return false;
}

Rational sup_norm(const HurwitzQuat& x) { return Rational(x.sup_doubled(), 2); }

namespace {

struct Reduced {
    std::array<Vec4, 4> b;  // doubled coordinates
};

// LLL (delta = 0.99) on four integer vectors; Gram-Schmidt data in long double.
void gram_schmidt(const std::array<Vec4, 4>& b, long double mu[4][4], long double Bs[4]) {
    long double bs[4][4];
    for (int i = 0; i < 4; ++i) {
        for (int t = 0; t < 4; ++t) bs[i][t] = static_cast<long double>(b[static_cast<size_t>(i)][static_cast<size_t>(t)]);
        for (int j = 0; j < i; ++j) {
            long double d = 0;
            for (int t = 0; t < 4; ++t) d += static_cast<long double>(b[static_cast<size_t>(i)][static_cast<size_t>(t)]) * bs[j][t];
            mu[i][j] = d / Bs[j];
            for (int t = 0; t < 4; ++t) bs[i][t] -= mu[i][j] * bs[j][t];
        }
        Bs[i] = 0;
        for (int t = 0; t < 4; ++t) Bs[i] += bs[i][t] * bs[i][t];
    }
}

Reduced lll(std::array<Vec4, 4> b) {
    long double mu[4][4], Bs[4];
    int k = 1;
    int guard = 0;
    while (k < 4) {
        if (++guard > 100000) throw VerificationError("LLL did not terminate");
        gram_schmidt(b, mu, Bs);
        for (int j = k - 1; j >= 0; --j) {
            const long double q = std::round(mu[k][j]);
            if (q != 0) {
                const i64 qi = static_cast<i64>(q);
                for (int t = 0; t < 4; ++t) b[static_cast<size_t>(k)][static_cast<size_t>(t)] -= qi * b[static_cast<size_t>(j)][static_cast<size_t>(t)];
                gram_schmidt(b, mu, Bs);
            }
        }
        if (Bs[k] >= (0.99L - mu[k][k - 1] * mu[k][k - 1]) * Bs[k - 1]) {
            ++k;
        } else {
            std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(k - 1)]);
            k = std::max(k - 1, 1);
        }
    }
    return {b};
}

// Calls visit(doubled vector) for every lattice vector with Euclidean norm^2 <= rho2.
template <class Visit>
void fincke_pohst(const Reduced& red, long double rho2, Visit&& visit) {
    long double mu[4][4], Bs[4];
    gram_schmidt(red.b, mu, Bs);
    i64 t[4] = {0, 0, 0, 0};
    auto rec = [&](auto&& self, int k, long double rem) -> void {
        long double c = 0;
        for (int j = k + 1; j < 4; ++j) c -= static_cast<long double>(t[j]) * mu[j][k];
        const long double w = std::sqrt(std::max<long double>(rem, 0) / Bs[k]) + 1e-9L;
        const i64 lo = static_cast<i64>(std::ceil(c - w)), hi = static_cast<i64>(std::floor(c + w));
        for (i64 x = lo; x <= hi; ++x) {
            t[k] = x;
            const long double d = static_cast<long double>(x) - c;
            const long double r2 = rem - d * d * Bs[k];
            if (r2 < -1e-6L * (1 + rho2)) continue;
            if (k == 0) {
                Vec4 v{0, 0, 0, 0};
                for (int i = 0; i < 4; ++i)
                    for (int s = 0; s < 4; ++s) v[static_cast<size_t>(s)] += t[i] * red.b[static_cast<size_t>(i)][static_cast<size_t>(s)];
                visit(v);
            } else {
                self(self, k - 1, r2);
            }
        }
        t[k] = 0;
    };
    rec(rec, 3, rho2);
}

Reduced reduced_basis(const Lattice4& L) {
    std::array<Vec4, 4> b;
    for (size_t i = 0; i < 4; ++i) b[i] = to_doubled(L.hnf[i]);
    return lll(b);
}

i64 sup_abs(const Vec4& v) {
    i64 s = 0;
    for (i64 x : v) s = std::max(s, x < 0 ? -x : x);
    return s;
}

HurwitzQuat from_doubled(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace

std::vector<HurwitzQuat> short_vectors(const Lattice4& L, const Rational& R, std::size_t budget) {
    require(R >= 0, "radius must be non-negative");
    const Reduced red = reduced_basis(L);
    // sup(doubled) <= 2R; the Euclidean radius of that box is 4R.
    const Rational twoR = 2 * R;
    const i64 cap = static_cast<i64>(floordiv(numerator(twoR), denominator(twoR)));
    const long double rho2 = 4.0L * static_cast<long double>(cap) * static_cast<long double>(cap);
    std::vector<HurwitzQuat> out;
    fincke_pohst(red, rho2, [&](const Vec4& v) {
        if (sup_abs(v) == 0 || sup_abs(v) > cap) return;
        if (out.size() >= budget) throw BudgetError("short_vectors: enumeration budget exceeded");
        out.push_back(from_doubled(v));
    });
    std::sort(out.begin(), out.end(), [](const HurwitzQuat& a, const HurwitzQuat& b) {
        const i64 na = a.sup_doubled(), nb = b.sup_doubled();
        return na != nb ? na < nb : a < b;
    });
    return out;
}

namespace {

i128 det3(const i128 a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

// True if v is independent of the rows in `picked` (at most three rows).
bool independent(const std::vector<Vec4>& picked, const Vec4& v) {
    std::vector<Vec4> rows = picked;
    rows.push_back(v);
    const size_t k = rows.size();
    // Some k x k minor is nonzero.
    std::vector<int> cols(k);
    std::vector<bool> sel(4, false);
    std::fill(sel.begin(), sel.begin() + static_cast<long>(k), true);
    do {
        size_t c = 0;
        for (int i = 0; i < 4; ++i)
            if (sel[static_cast<size_t>(i)]) cols[c++] = i;
        i128 det = 0;
        if (k == 1) {
            det = rows[0][static_cast<size_t>(cols[0])];
        } else if (k == 2) {
            det = static_cast<i128>(rows[0][static_cast<size_t>(cols[0])]) * rows[1][static_cast<size_t>(cols[1])] -
                  static_cast<i128>(rows[0][static_cast<size_t>(cols[1])]) * rows[1][static_cast<size_t>(cols[0])];
        } else if (k == 3) {
            i128 a[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) a[i][j] = rows[static_cast<size_t>(i)][static_cast<size_t>(cols[static_cast<size_t>(j)])];
            det = det3(a);
        } else {
            // Laplace along the last row.
            for (int j = 0; j < 4; ++j) {
                i128 a[3][3];
                for (int i = 0; i < 3; ++i) {
                    int cc = 0;
                    for (int t = 0; t < 4; ++t)
                        if (t != j) a[i][cc++] = rows[static_cast<size_t>(i)][static_cast<size_t>(t)];
                }
                const i128 term = static_cast<i128>(rows[3][static_cast<size_t>(j)]) * det3(a);
                det += (j + 3) % 2 == 0 ? term : -term;
            }
        }
        if (det != 0) return true;
    } while (std::prev_permutation(sel.begin(), sel.end()));
    return false;
}

}  // namespace

Minima successive_minima(const Lattice4& L, const Rational& bound) {
    Rational r(1, 2);
    while (true) {
        auto vs = short_vectors(L, r);
        std::vector<Vec4> picked;
        Minima mins;
        for (const auto& v : vs) {
            const Vec4 d = v.doubled();
            if (!independent(picked, d)) continue;
            mins.lambda[picked.size()] = sup_norm(v);
            mins.vectors[picked.size()] = v;
            picked.push_back(d);
            if (picked.size() == 4) return mins;
        }
        if (r >= bound) throw BudgetError("successive_minima: bound reached before rank 4");
        r = std::min<Rational>(2 * r, bound);
    }
}

PointCount lattice_point_count(const Lattice4& L, const Rational& R, i64 H, i64 K, i64 m) {
    PointCount pc;
    pc.R = R;
    pc.count = 1 + static_cast<i64>(short_vectors(L, R).size());
    const double Kp = static_cast<double>(K / std::gcd(K, H)), mp = static_cast<double>(m / std::gcd(m, H));
    const double x = R.convert_to<double>() / static_cast<double>(H);
    pc.rhs = 1 + x + x * x / std::sqrt(Kp) + x * x * x / std::sqrt(Kp * mp) + x * x * x * x / (Kp * mp);
    pc.ratio = static_cast<double>(pc.count) / pc.rhs;
    pc.within = pc.count <= kPointCountConstant * pc.rhs;
    return pc;
}

PrepGeomReport prepgeom_checks(const HurwitzQuat& eta, i64 K, std::uint64_t seed) {
    require(K >= 1 && K % 2 == 1, "K must be odd");
    require(eta.is_primitive(), "eta must be primitive");
    require(eta.nrd() % K == 0, "K must divide nrd(eta)");
    PrepGeomReport r{};
    r.eta = eta;
    r.K = K;
    std::array<Vec4, 4> left, right;
    for (int k = 0; k < 4; ++k) {
        left[static_cast<size_t>(k)] = (unit_vec(k) * eta).basis_coords();   // A -> A eta
        right[static_cast<size_t>(k)] = (eta * unit_vec(k)).basis_coords();  // theta -> eta theta
    }
    auto kernel = [&](const std::array<Vec4, 4>& img) {
        std::vector<std::vector<i64>> rows;
        for (int t = 0; t < 4; ++t) {
            std::vector<i64> row(4);
            for (int k = 0; k < 4; ++k) row[static_cast<size_t>(k)] = img[static_cast<size_t>(k)][static_cast<size_t>(t)];
            rows.push_back(row);
        }
        return from_rows(congruence_lattice(4, rows, std::vector<i64>(4, K)));
    };
    // (1) sampled A in the left kernel.
    const Lattice4 LA = kernel(left);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<i64> coef(-2, 2);
    r.norm_divisible = true;
    const auto basisA = LA.basis();
    for (int it = 0; it < 200; ++it) {
        HurwitzQuat A;
        for (const auto& b : basisA) A = A + coef(rng) * b;
        r.norm_divisible = r.norm_divisible && A.nrd() % K == 0;
    }
    // (2) right kernel modulo K O has K^4 / index elements.
    const Lattice4 LT = kernel(right);
    r.theta_solutions = ipow(K, 4) / LT.index;
    r.theta_count_ok = r.theta_solutions == K * K && ipow(K, 4) % LT.index == 0;
    // (3), (4) shortest vectors.
    const Rational bound(std::max<i64>(2, 2 * K), 1);
    auto mt = successive_minima(LT, bound);
    r.theta = mt.vectors[0];
    r.theta_constant = mt.lambda[0].convert_to<double>() / std::sqrt(static_cast<double>(K));
    std::vector<HurwitzQuat> gens;
    for (int k = 0; k < 4; ++k) {
        gens.push_back(eta * unit_vec(k));
        gens.push_back(K * unit_vec(k));
    }
    auto me = successive_minima(lattice_from_generators(gens), bound);
    r.eta_prime = me.vectors[0];
    r.eta_prime_constant = me.lambda[0].convert_to<double>() / std::sqrt(static_cast<double>(K));
    const bool theta_sol = (eta * r.theta).divisible_by(K);
    r.ok = r.norm_divisible && r.theta_count_ok && theta_sol && r.theta_constant <= kPrepGeomConstant &&
           r.eta_prime_constant <= kPrepGeomConstant;
    return r;
}

RepNumber rep_number(i64 m) {
    require(m >= 1 && m <= 1000000, "rep_number needs 1 <= m <= 1e6");
    const i64 N = 4 * m;
    const i64 B = static_cast<i64>(std::sqrt(static_cast<double>(N))) + 1;
    i64 count = 0;
    for (i64 a = -B; a <= B; ++a)
        for (i64 b = -B; b <= B; ++b) {
            const i64 ab = a * a + b * b;
            if (ab > N) continue;
            if (md(a - b, 2) != 0) continue;
            for (i64 c = -B; c <= B; ++c) {
                const i64 rest = N - ab - c * c;
                if (rest < 0 || md(c - a, 2) != 0) continue;
                i64 d = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(rest))));
                while (d * d > rest) --d;
                while ((d + 1) * (d + 1) <= rest) ++d;
                if (d * d != rest || md(d - a, 2) != 0) continue;
                for (i64 s : d == 0 ? std::vector<i64>{0} : std::vector<i64>{d, -d})
                    if (HurwitzQuat(a, b, c, s).is_primitive()) ++count;
            }
        }
    RepNumber r{m, count / 24, 0};
    require(count % 24 == 0, "unit group must act freely");
    i64 f = vp(m, 2) <= 1 ? 1 : 0;
    if (f)
        for (auto [p, e] : factorize(m))
            if (p != 2) f *= ipow(p, e) + ipow(p, e - 1);
    r.formula = f;
    return r;
}

}  // namespace qcl
