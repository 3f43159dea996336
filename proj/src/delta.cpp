#include "qcl/delta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qcl/lattices.hpp"
#include "qcl/parallel.hpp"

namespace qcl {

namespace {

// Cox-de Boor recursion on integer knots.
template <class T>
T bspline_rec(const T& x, int i, int k) {
    if (k == 0) return (x >= T(i) && x < T(i + 1)) ? T(1) : T(0);
    return (x - T(i)) / T(k) * bspline_rec(x, i, k - 1) + (T(i + k + 1) - x) / T(k) * bspline_rec(x, i + 1, k - 1);
}

const std::array<std::array<double, 2>, 20>& gauss_legendre20() {
    static const auto nodes = [] {
        std::array<std::array<double, 2>, 20> out{};
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L)), dp = 0;
            for (int it = 0; it < 100; ++it) {
                long double p0 = 1, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1);
                const long double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-19L) break;
            }
            out[static_cast<size_t>(i)] = {static_cast<double>(x), static_cast<double>(2 / ((1 - x * x) * dp * dp))};
        }
        return out;
    }();
    return nodes;
}

template <class F>
double integrate(F&& f, double a, double b, int pieces) {
    const auto& gl = gauss_legendre20();
    long double s = 0;
    const double h = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
        const double lo = a + p * h, mid = lo + h / 2;
        for (const auto& [x, w] : gl) s += w * f(mid + h / 2 * x);
    }
    return static_cast<double>(s * h / 2);
}

double to_d(const Rational& r) { return r.convert_to<double>(); }

// Elements of O_D of reduced norm d (doubled coordinates).
std::vector<HurwitzQuat> elements_of_norm(i64 d) {
    std::vector<HurwitzQuat> out;
    const i64 N = 4 * d;
    const i64 B = static_cast<i64>(std::sqrt(static_cast<double>(N))) + 1;
    for (i64 a = -B; a <= B; ++a)
        for (i64 b = -B; b <= B; ++b) {
            if (md(a - b, 2)) continue;
            const i64 ab = a * a + b * b;
            if (ab > N) continue;
            for (i64 c = -B; c <= B; ++c) {
                if (md(c - a, 2)) continue;
                const i64 rest = N - ab - c * c;
                if (rest < 0) continue;
                i64 e = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(rest))));
                if (e * e != rest || md(e - a, 2)) continue;
                out.emplace_back(a, b, c, e);
                if (e) out.emplace_back(a, b, c, -e);
            }
        }
    return out;
}

// Quaternion product in Hamilton coordinates.
using Q4 = std::array<Rational, 4>;
Q4 qmul(const Q4& x, const Q4& y) {
    return {x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3], x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
            x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1], x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0]};
}

std::vector<Q4> order_basis() {
    const Rational h(1, 2);
    return {Q4{1, 0, 0, 0}, Q4{0, 1, 0, 0}, Q4{0, 0, 1, 0}, Q4{h, h, h, h}};
}

// Dual basis under (x, y) -> trd(xy) = 2 (x0 y0 - x1 y1 - x2 y2 - x3 y3).
std::vector<Q4> trace_dual(const std::vector<Q4>& B) {
    // Solve trd(b_i * y_j) = [i = j]: y_j = G^{-1} e_j with G_{i,t} = 2 s_t b_{i,t}.
    std::array<std::array<Rational, 8>, 4> a;
    const std::array<int, 4> s{1, -1, -1, -1};
    for (size_t i = 0; i < 4; ++i)
        for (size_t t = 0; t < 8; ++t) a[i][t] = t < 4 ? Rational(2 * s[t]) * B[i][t] : Rational(t - 4 == i ? 1 : 0);
    for (size_t c = 0; c < 4; ++c) {
        size_t r = c;
        while (a[r][c] == 0) ++r;
        std::swap(a[r], a[c]);
        const Rational lead = a[c][c];
        for (auto& e : a[c]) e /= lead;
        for (size_t i = 0; i < 4; ++i) {
            if (i == c || a[i][c] == 0) continue;
            const Rational k = a[i][c];
            for (size_t t = 0; t < 8; ++t) a[i][t] -= k * a[c][t];
        }
    }
    std::vector<Q4> out(4);
    for (size_t j = 0; j < 4; ++j)
        for (size_t t = 0; t < 4; ++t) out[j][t] = a[t][4 + j];
    return out;
}

std::vector<std::vector<BigInt>> scaled_hnf(const std::vector<Q4>& B, i64 scale) {
    std::vector<std::vector<BigInt>> rows;
    for (const auto& b : B) {
        std::vector<BigInt> r;
        for (const auto& e : b) {
            const Rational v = e * scale;
            require(denominator(v) == 1, "scale does not clear denominators");
            r.push_back(numerator(v));
        }
        rows.push_back(r);
    }
    return hnf_rows(rows);
}

// Residues mod Z^4 of a lattice containing Z^4 with coordinates in (1/4)Z.
std::vector<std::array<double, 4>> cosets_mod_z4(const std::vector<Q4>& B) {
    const auto H = scaled_hnf(B, 4);
    std::vector<std::array<double, 4>> out;
    for (i64 code = 0; code < 256; ++code) {
        std::vector<BigInt> v{code % 4, code / 4 % 4, code / 16 % 4, code / 64};
        // Membership by back-substitution in the echelon basis.
        bool in = true;
        for (size_t i = 0; i < 4 && in; ++i) {
            const BigInt& piv = H[i][i];
            if (v[i] % piv != 0) {
                in = false;
                break;
            }
            const BigInt t = v[i] / piv;
            for (size_t c = i; c < 4; ++c) v[c] -= t * H[i][c];
        }
        if (in) out.push_back({(code % 4) / 4.0, (code / 4 % 4) / 4.0, (code / 16 % 4) / 4.0, (code / 64) / 4.0});
    }
    return out;
}

// sum over x in c + Z of exp(-pi k x^2).
long double theta1(double c, long double k) {
    long double s = 0;
    const i64 R = static_cast<i64>(std::sqrt(40.0L / k)) + 3;
    for (i64 n = -R; n <= R; ++n) {
        const long double x = c + static_cast<long double>(n);
        s += std::exp(-std::numbers::pi_v<long double> * k * x * x);
    }
    return s;
}

}  // namespace

Rational bspline5(const Rational& x) {
    if (x <= 0 || x >= 6) return 0;
    // Truncated-power form: (1/120) sum_k (-1)^k C(6,k) (x - k)_+^5.
    static const std::array<i64, 7> binom{1, 6, 15, 20, 15, 6, 1};
    Rational s = 0;
    for (int k = 0; k < 6 && x > k; ++k) {
        const Rational y = x - k, y2 = y * y;
        s += Rational(k % 2 ? -binom[static_cast<size_t>(k)] : binom[static_cast<size_t>(k)]) * y2 * y2 * y;
    }
    return s / 120;
}

double bspline5(double x) {
    if (x <= 0 || x >= 6) return 0;
    return bspline_rec<double>(x, 0, 5);
}

double SplineBump::eval(double t) const { return bspline5(to_d(offset) + to_d(scale) * t); }

std::vector<Rational> SplineBump::knots() const {
    std::vector<Rational> out;
    for (int k = 0; k <= 6; ++k) {
        const Rational t = (Rational(k) - offset) / scale;
        if (t >= 0) out.push_back(t);
    }
    if (out.empty() || out.front() != 0) out.insert(out.begin(), Rational(0));
    return out;
}

Rational SplineBump::first_moment() const {
    // t * bump(t) is a degree-6 polynomial between knots, and the 7-point closed
    // Newton-Cotes rule is exact there; the spline is continuous at the knots.
    static const std::array<Rational, 7> w{Rational(41, 840), Rational(216, 840), Rational(27, 840), Rational(272, 840),
                                           Rational(27, 840), Rational(216, 840), Rational(41, 840)};
    const auto ks = knots();
    Rational total = 0;
    for (size_t p = 0; p + 1 < ks.size(); ++p) {
        const Rational a = ks[p], b = ks[p + 1], h = (b - a) / 6;
        Rational s = 0;
        for (int q = 0; q <= 6; ++q) {
            const Rational t = a + h * q;
            s += w[static_cast<size_t>(q)] * t * (*this)(t);
        }
        total += s * (b - a);
    }
    return total;
}

DeltaTestFn DeltaTestFn::standard() { return {{3, 3}, {0, 6}, 1}; }

void DeltaTestFn::validate() const {
    require(phi1.scale > 0 && phi2.scale > 0, "bump scales must be positive");
    require(phi2(0) == 0, "phi2(0) must vanish");
    require(phi1(0) != 0, "phi1(0) must be nonzero");
    require(phi2.first_moment() > 0, "phi2 must have positive integral");
    require(phi1(rho2) == 0 && phi2(rho2) == 0 && (6 - phi1.offset) / phi1.scale <= rho2 &&
                (6 - phi2.offset) / phi2.scale <= rho2,
            "bumps must vanish beyond rho2");
}

double DeltaTestFn::F2_zero_pi2_coefficient() const {
    // 2 * phi1(0) * int_{R^4} phi2(|y|^2) dy, and int_{R^4} f(|y|^2) dy = pi^2 int t f(t) dt.
    return to_d(2 * phi1(0) * phi2.first_moment());
}

double DeltaTestFn::F2_zero() const { return F2_zero_pi2_coefficient() * std::numbers::pi * std::numbers::pi; }

double DeltaTestFn::F2(double nrd_xi) const {
    if (nrd_xi == 0) return F2_zero();
    // The trace character pairs y with 2 conj(xi), so the Euclidean frequency is 2|xi|.
    const double rho = 2 * std::sqrt(nrd_xi);
    const double w = 2 * std::numbers::pi * rho;
    const auto ks = phi2.knots();
    const double off = to_d(phi2.offset), sc = to_d(phi2.scale);
    double s = 0;
    for (size_t p = 0; p + 1 < ks.size(); ++p) {
        const double a = std::sqrt(to_d(ks[p])), b = std::sqrt(to_d(ks[p + 1]));
        const int pieces = 1 + static_cast<int>((b - a) * (rho + 2));
        s += integrate([&](double r) { return bspline5(off + sc * r * r) * std::cyl_bessel_j(1.0, w * r) * r * r; }, a, b, pieces);
    }
    return 2 * to_d(phi1(0)) * (2 * std::numbers::pi / rho) * s;
}

std::vector<i64> norm_histogram(i64 max_norm) {
    require(max_norm >= 0 && max_norm <= 1000000, "max_norm out of range");
    const i64 N = 4 * max_norm;
    const i64 B = static_cast<i64>(std::sqrt(static_cast<double>(N)));
    const size_t shards = static_cast<size_t>(2 * B + 1);
    std::vector<std::vector<i64>> part(shards);
    for_each_shard(shards, [&](size_t sh) {
        const i64 a = static_cast<i64>(sh) - B;
        auto& h = part[sh];
        h.assign(static_cast<size_t>(max_norm + 1), 0);
        for (i64 b = -B; b <= B; ++b) {
            if (md(a - b, 2)) continue;
            for (i64 c = -B; c <= B; ++c) {
                if (md(a - c, 2)) continue;
                const i64 s = a * a + b * b + c * c;
                if (s > N) continue;
                for (i64 d = -B; d <= B; ++d) {
                    if (md(a - d, 2)) continue;
                    const i64 t = s + d * d;
                    if (t <= N) ++h[static_cast<size_t>(t / 4)];
                }
            }
        }
    });
    std::vector<i64> hist(static_cast<size_t>(max_norm + 1), 0);
    for (const auto& h : part)
        for (size_t i = 0; i < h.size(); ++i) hist[i] += h[i];
    return hist;
}

double b_term(const Rational& Q, const DeltaTestFn& phi, double rho_max) {
    phi.validate();
    require(Q > 0, "Q must be positive");
    // O^# = (1+i)^{-1} O, so nrd over O^# is nrd over O halved.
    const double q = to_d(Q);
    const i64 max_n = static_cast<i64>(rho_max * rho_max / (2 * q * q));
    const auto hist = norm_histogram(max_n);
    long double s = 0;
    for (i64 n = max_n; n >= 0; --n)
        if (hist[static_cast<size_t>(n)]) s += static_cast<long double>(hist[static_cast<size_t>(n)]) * phi.F2(q * q * n / 2.0);
    return static_cast<double>(s);
}

DeltaResult delta_sum(const HurwitzQuat& alpha, const Rational& Q, const DeltaTestFn& phi, i64 budget) {
    phi.validate();
    require(Q >= 4, "Q must be at least 4");
    DeltaResult r{alpha, Q, 0, 0, 0, true};
    const Rational Q2 = Q * Q;
    // Terms vanish unless nrd(delta) < rho2 Q^2.
    const Rational lim = phi.rho2 * Q2;
    const i64 max_norm = static_cast<i64>(numerator(lim) / denominator(lim)) - (denominator(lim) == 1 ? 1 : 0);
    require(max_norm <= 1000000, "Q too large for enumeration");
    if (alpha.is_zero()) {
        require(static_cast<double>(max_norm) * max_norm * 10 <= static_cast<double>(budget), "enumeration budget exceeded");
        const auto hist = norm_histogram(max_norm);
        Rational first = 0, second = 0;
        for (i64 n = 1; n <= max_norm; ++n) {
            const i64 c = hist[static_cast<size_t>(n)];
            const Rational t1 = phi.at_norms(0, Rational(n) / Q2), t2 = phi.at_norms(Rational(n) / Q2, 0);
            if (t1 != 0) r.first_terms += c;
            if (t2 != 0) r.second_terms += c;
            first += c * t1;
            second += c * t2;
        }
        r.difference = first - second;
        r.F2_zero = phi.F2_zero();
        r.b_term = b_term(Q, phi);
        const double scaled = to_d(r.difference / (Q2 * Q2));
        r.ratio = scaled / r.F2_zero;
        r.poisson_residual = std::fabs(r.b_term - scaled) / std::fabs(r.b_term);
        return r;
    }
    // alpha != 0: delta contributes to the first sum only if alpha delta^{-1} is
    // integral, to the second only if delta^{-1} alpha is; either forces nrd(delta) | nrd(alpha).
    const i64 Na = alpha.nrd();
    std::vector<i64> divs;
    for (i64 d = 1; d <= max_norm; ++d)
        if (Na % d == 0) divs.push_back(d);
    std::vector<std::vector<HurwitzQuat>> S1(divs.size()), S2(divs.size());
    i64 work = 0;
    for (i64 d : divs) work += 8 * d * static_cast<i64>(std::sqrt(static_cast<double>(d)) + 1);
    if (work > budget) throw BudgetError("delta_sum: enumeration budget exceeded");
    for_each_shard(divs.size(), [&](size_t k) {
        const i64 d = divs[k];
        for (const auto& delta : elements_of_norm(d)) {
            if ((alpha * delta.conj()).divisible_by(d)) S1[k].push_back(delta);
            if ((delta.conj() * alpha).divisible_by(d)) S2[k].push_back(delta);
        }
    });
    auto term1 = [&](const HurwitzQuat& d) { return phi.at_norms(Rational(Na, d.nrd()) / Q2, Rational(d.nrd()) / Q2); };
    auto term2 = [&](const HurwitzQuat& d) { return phi.at_norms(Rational(d.nrd()) / Q2, Rational(Na, d.nrd()) / Q2); };
    std::vector<HurwitzQuat> second_nonzero;
    Rational first = 0, second = 0;
    for (size_t k = 0; k < divs.size(); ++k) {
        for (const auto& d : S2[k]) {
            const Rational t = term2(d);
            second += t;
            if (t != 0) {
                ++r.second_terms;
                second_nonzero.push_back(d);
            }
        }
    }
    std::sort(second_nonzero.begin(), second_nonzero.end());
    std::vector<HurwitzQuat> images;
    for (size_t k = 0; k < divs.size(); ++k) {
        for (const auto& d : S1[k]) {
            const Rational t = term1(d);
            first += t;
            if (t == 0) continue;
            ++r.first_terms;
            // Partner alpha delta^{-1} = alpha delta^dagger / nrd(delta).
            const HurwitzQuat partner = (alpha * d.conj()).div_exact(d.nrd());
            const bool listed = std::binary_search(second_nonzero.begin(), second_nonzero.end(), partner);
            r.certificate_ok = r.certificate_ok && listed && term2(partner) == t;
            images.push_back(partner);
        }
    }
    std::sort(images.begin(), images.end());
    r.certificate_ok = r.certificate_ok && images == second_nonzero;
    r.difference = first - second;
    return r;
}

DualAudit dual_lattice_audit() {
    const auto O = order_basis();
    const auto Od = trace_dual(O);
    const auto Odd = trace_dual(Od);
    const Q4 inv{Rational(1, 2), Rational(-1, 2), 0, 0};  // (1+i)^{-1}
    std::vector<Q4> shifted;
    for (const auto& b : O) shifted.push_back(qmul(inv, b));
    DualAudit a{};
    a.dual_is_inverse_of_one_plus_i = scaled_hnf(Od, 4) == scaled_hnf(shifted, 4);
    a.double_dual_is_order = scaled_hnf(Odd, 4) == scaled_hnf(O, 4);
    const auto h = scaled_hnf(Od, 4), ho = scaled_hnf(O, 4);
    BigInt vo = 1, vd = 1;
    for (size_t i = 0; i < 4; ++i) {
        vo *= ho[i][i];
        vd *= h[i][i];
    }
    a.index = static_cast<i64>(vo / vd);
    return a;
}

PoissonResult poisson_check(const Rational& scale) {
    require(scale >= Rational(1, 8) && scale <= 8, "scale must lie in [1/8, 8]");
    const std::array<long double, 4> k{1, 2, 3, 0.5L};
    const long double s = scale.convert_to<long double>();
    const auto O = order_basis();
    const auto Od = trace_dual(O);
    // g(gamma / s) over O: exp(-pi k_t gamma_t^2 / s^2).
    long double lhs = 0;
    for (const auto& c : cosets_mod_z4(O)) {
        long double prod = 1;
        for (size_t t = 0; t < 4; ++t) prod *= theta1(c[t], k[t] / (s * s));
        lhs += prod;
    }
    // g^(s xi) with the trace character: prod k_t^{-1/2} exp(-pi (2 s xi_t)^2 / k_t).
    long double rhs = 0;
    for (const auto& c : cosets_mod_z4(Od)) {
        long double prod = 1;
        for (size_t t = 0; t < 4; ++t) prod *= theta1(c[t], 4 * s * s / k[t]) / std::sqrt(k[t]);
        rhs += prod;
    }
    rhs *= 2 * s * s * s * s;
    return {scale, static_cast<double>(lhs), static_cast<double>(rhs), static_cast<double>(std::fabs(lhs - rhs) / std::fabs(lhs))};
}

}  // namespace qcl
