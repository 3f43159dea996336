#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qcl/algebra.hpp"
#include "qcl/expsums.hpp"

using namespace qcl;

namespace {

Mat2R zmat(const M2& x) { return {Ring::integers(), x[0], x[1], x[2], x[3]}; }

M2 rand_m2(std::mt19937_64& rng, i64 m) {
    std::uniform_int_distribution<i64> d(0, m - 1);
    return {d(rng), d(rng), d(rng), d(rng)};
}

M2 rand_unimodular(std::mt19937_64& rng, i64 p, i64 m) {
    while (true) {
        M2 x = rand_m2(rng, m);
        if (md(x[0] * x[3] - x[1] * x[2], p) != 0) return x;
    }
}

// Direct floating evaluation of the local integral: sum over tuples Y mod p^k
// with delta^dagger P(Y) = 0 mod p^k of exp(2 pi i trd(gamma.Y) / nrd delta).
std::complex<double> I0_oracle(i64 p, const std::vector<i64>& ups, const M2& delta, const std::vector<M2>& gam) {
    const i64 det = delta[0] * delta[3] - delta[1] * delta[2];
    const int k = vp(det, p);
    const i64 m = ipow(p, k);
    const int n = static_cast<int>(gam.size());
    const i64 G = m * m * m * m;
    const double ud = static_cast<double>(det / m);
    std::vector<i64> idx(static_cast<size_t>(n), 0);
    std::complex<double> s = 0;
    while (true) {
        M2 P{0, 0, 0, 0};
        i64 tr = 0;
        for (int i = 0; i < n; ++i) {
            i64 v = idx[static_cast<size_t>(i)];
            M2 Y{v / (m * m * m), v / (m * m) % m, v / m % m, v % m};
            M2 Y2 = m2_mul(Y, Y, m);
            for (int t = 0; t < 4; ++t) P[static_cast<size_t>(t)] += ups[static_cast<size_t>(i)] * Y2[static_cast<size_t>(t)];
            tr += m2_trace_prod(gam[static_cast<size_t>(i)], Y, m);
        }
        M2 C = m2_mul({delta[3], -delta[1], -delta[2], delta[0]}, P, m);
        if (C == M2{0, 0, 0, 0}) {
            // psi(tr / det): the p-part of 1/det is p^{-k}/u, other primes are integral.
            double x = static_cast<double>(md(tr, m)) * (1.0 / static_cast<double>(m));
            (void)ud;
            i64 uinv = inv_mod(det / m, m);
            x = static_cast<double>(md(md(tr, m) * uinv, m)) / static_cast<double>(m);
            s += std::polar(1.0, 2 * std::numbers::pi * x);
        }
        int pos = 0;
        while (pos < n && ++idx[static_cast<size_t>(pos)] == G) idx[static_cast<size_t>(pos++)] = 0;
        if (pos == n) break;
    }
    return s / std::pow(static_cast<double>(G), n);
}

LocalIntegralRequest make_req(i64 p, const std::vector<i64>& ups, const M2& delta, const std::vector<M2>& gam) {
    LocalIntegralRequest r{p, static_cast<int>(gam.size()), ups, zmat(delta), {}};
    for (const auto& g : gam) r.gamma.push_back(zmat(g));
    return r;
}

}  // namespace

TEST(GaussIntegral, IntegralZIsOne) {
    EXPECT_EQ(nonabelian_gauss_integral(zmat({3, 1, -2, 7}), 3), CycloSum::rational(3, 1));
}

TEST(GaussIntegral, DiagonalThird) {
    // Z = diag(1/3, 0): the phase is (y11^2 + y12 y21) / 3, a quadratic Gauss
    // sum (|g|^2 = 3) times a hyperbolic sum (3 of 9), so |I|^2 = 3 / 81.
    Mat2R Z(Ring::rationals(3), Rational(1, 3), 0, 0, 0);
    auto v = nonabelian_gauss_integral(Z, 3);
    EXPECT_EQ(v.abs2(), CycloSum::rational(3, 1, 3));
    EXPECT_EQ(gauss_integral_abs2_formula(Z, 3), Rational(1, 27));
}

TEST(GaussIntegral, MagnitudeMatchesClosedForm) {
    std::mt19937_64 rng(11);
    int tested = 0;
    for (i64 p : {3, 5}) {
        for (int it = 0; it < 60 && tested < 100; ++it) {
            const int k = p == 3 ? 1 + it % 2 : 1;
            const i64 m = ipow(p, k);
            M2 a = rand_m2(rng, m);
            Mat2R Z(Ring::rationals(p), Rational(a[0], m), Rational(a[1], m), Rational(a[2], m), Rational(a[3], m));
            if (Z.trd() == 0 || vp(Z.trd(), p) > 0) continue;
            auto v = nonabelian_gauss_integral(Z, p);
            const double want = std::sqrt(gauss_integral_abs2_formula(Z, p).convert_to<double>());
            EXPECT_NEAR(static_cast<double>(v.magnitude()), want, 1e-9) << Z.str();
            ++tested;
        }
    }
    EXPECT_GE(tested, 60);
}

TEST(Hessian, IdentityAtOne) {
    auto h = hessian_matrices(zmat({1, 0, 0, 1}));
    EXPECT_TRUE(h.identity_ok);
    EXPECT_EQ(h.J[0][0], 2);
    EXPECT_EQ(h.J[3][3], 2);
    EXPECT_EQ(h.J[1][2], 2);
}

TEST(Hessian, RandomIntegerZ) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<i64> d(-20, 20);
    int n = 0;
    while (n < 1000) {
        M2 z{d(rng), d(rng), d(rng), d(rng)};
        if (z[0] + z[3] == 0) continue;
        auto h = hessian_matrices(zmat(z));
        ASSERT_TRUE(h.identity_ok);
        // The quadratic form is tr(Y^2 Z) for Y ordered (y11, y12, y21, y22).
        i64 y[4] = {d(rng), d(rng), d(rng), d(rng)};
        Rational q = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) q += h.J[a][b] * y[a] * y[b];
        M2 Y{y[0], y[1], y[2], y[3]};
        const i64 big = i64(1) << 40;
        i64 tr = m2_trace_prod(m2_mul(Y, Y, big), z, big);
        if (tr > big / 2) tr -= big;
        ASSERT_EQ(q / 2, tr);
        ++n;
    }
}

TEST(Hessian, TracelessRejected) {
    EXPECT_THROW(hessian_matrices(zmat({0, 1, 1, 0})), PreconditionError);
}

TEST(LocalIntegral, PrimeCaseValueAtZero) {
    auto v = I0_local(make_req(3, {1}, {3, 0, 0, 1}, {{0, 0, 0, 0}}));
    EXPECT_EQ(v, CycloSum::rational(3, 15, 4));
}

TEST(LocalIntegral, UnitDeltaIsOne) {
    auto v = I0_local(make_req(5, {1, 2}, {2, 1, 1, 1}, {{0, 0, 0, 0}, {0, 0, 0, 0}}));
    EXPECT_EQ(v, CycloSum::rational(5, 1));
}

TEST(LocalIntegral, MatchesFloatingOracle) {
    std::mt19937_64 rng(21);
    const std::vector<std::pair<i64, M2>> deltas = {{3, {3, 0, 0, 1}}, {3, {9, 0, 0, 1}}, {3, {3, 0, 0, 3}},
                                                    {5, {5, 0, 0, 1}}, {3, {1, 2, 3, 3}}};
    for (const auto& [p, d] : deltas) {
        for (int it = 0; it < 4; ++it) {
            const i64 m = ipow(p, vp(d[0] * d[3] - d[1] * d[2], p));
            std::vector<M2> g = {rand_m2(rng, m)};
            std::vector<i64> u = {1 + it % 2};
            auto exact = I0_local(make_req(p, u, d, g)).to_complex();
            auto want = I0_oracle(p, u, d, g);
            EXPECT_NEAR(std::abs(exact - std::complex<long double>(want)), 0.0, 1e-9);
        }
    }
    // Two slots, p = 3, k = 1.
    for (int it = 0; it < 3; ++it) {
        std::vector<M2> g = {rand_m2(rng, 3), rand_m2(rng, 3)};
        auto exact = I0_local(make_req(3, {1, 2}, {3, 0, 0, 1}, g)).to_complex();
        auto want = I0_oracle(3, {1, 2}, {3, 0, 0, 1}, g);
        EXPECT_NEAR(std::abs(exact - std::complex<long double>(want)), 0.0, 1e-9);
    }
}

TEST(LocalIntegral, PrecisionRegression) {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 6; ++it) {
        M2 d = it % 2 ? M2{3, 0, 0, 3} : M2{9, 0, 0, 1};
        auto req = make_req(3, {1}, d, {rand_m2(rng, 9)});
        EXPECT_EQ(I0_local(req, 0), I0_local(req, 1));
    }
    auto req = make_req(3, {1, 1}, {3, 0, 0, 1}, {{1, 0, 2, 0}, {0, 0, 0, 1}});
    EXPECT_EQ(I0_local(req, 0), I0_local(req, 1));
}

TEST(LocalIntegral, GammaOnlyModNrdDelta) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 10; ++it) {
        M2 g = rand_m2(rng, 9), h = rand_m2(rng, 50);
        M2 g2 = {g[0] + 9 * h[0], g[1] + 9 * h[1], g[2] + 9 * h[2], g[3] + 9 * h[3]};
        EXPECT_EQ(I0_local(make_req(3, {1}, {9, 0, 0, 1}, {g})), I0_local(make_req(3, {1}, {9, 0, 0, 1}, {g2})));
    }
}

TEST(LocalIntegral, Homogeneity) {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 10; ++it) {
        M2 g = rand_m2(rng, 25);
        i64 a = 1 + it % 4;  // units mod 5
        M2 ag = {a * g[0], a * g[1], a * g[2], a * g[3]};
        EXPECT_EQ(I0_local(make_req(5, {2}, {25, 0, 0, 1}, {g})), I0_local(make_req(5, {2}, {25, 0, 0, 1}, {ag})));
    }
}

TEST(LocalIntegral, ConjugationInvariance) {
    std::mt19937_64 rng(9);
    const i64 p = 3;
    for (int it = 0; it < 12; ++it) {
        const M2 d = it % 3 == 0 ? M2{3, 0, 0, 1} : it % 3 == 1 ? M2{9, 0, 0, 1} : M2{3, 0, 0, 3};
        const i64 m = ipow(p, vp(d[0] * d[3] - d[1] * d[2], p));
        const i64 big = 1000;
        M2 a = rand_unimodular(rng, p, big), b = rand_unimodular(rng, p, big);
        std::vector<M2> g = {rand_m2(rng, m), rand_m2(rng, m)};
        M2 d2 = m2_mul(m2_mul(a, d, i64(1) << 50), b, i64(1) << 50);
        const i64 adet = md(a[0] * a[3] - a[1] * a[2], m);
        M2 ainv = m2_dagger({a[0] % m, a[1] % m, a[2] % m, a[3] % m}, m);
        const i64 dinv = inv_mod(adet, m);
        for (auto& e : ainv) e = md(e * dinv, m);
        std::vector<M2> g2;
        for (const auto& x : g) g2.push_back(m2_mul(m2_mul(a, x, m), ainv, m));
        // d2 as a true integer matrix (entries are small enough not to wrap).
        for (auto& e : d2)
            if (e > (i64(1) << 49)) e -= i64(1) << 50;
        EXPECT_EQ(I0_local(make_req(p, {1, 2}, d, g)), I0_local(make_req(p, {1, 2}, d2, g2)));
    }
}

TEST(LocalIntegral, VanishesOffSupport) {
    // v(delta) = 1 but gamma not divisible by 3.
    auto v = I0_local(make_req(3, {1}, {3, 0, 0, 3}, {{1, 0, 0, 0}}));
    EXPECT_TRUE(v.is_zero());
}

TEST(PrimeCase, ZeroGammaAtThree) {
    auto r = prime_case_report(3, 1, {{0, 0, 0, 0}});
    EXPECT_EQ(r.S2, 15);
    EXPECT_EQ(r.S3, 15);
    EXPECT_EQ(r.S2_formula, 15);
    EXPECT_TRUE(r.identity_residual.is_zero());
}

TEST(PrimeCase, X2OriginOnlyAtThree) {
    auto r = prime_case_report(3, 2, {{0, 0, 0, 0}, {0, 0, 0, 0}});
    EXPECT_EQ(r.X2.at({0, 0}), 1);
    EXPECT_EQ(r.S2, r.S2_formula);
}

TEST(PrimeCase, RandomGammaIdentityAndClosedForm) {
    std::mt19937_64 rng(1234);
    int cases = 0;
    for (int n : {1, 2}) {
        for (int it = 0; it < (n == 1 ? 200 : 320); ++it) {
            std::vector<M2> g;
            for (int i = 0; i < n; ++i) {
                M2 x = rand_m2(rng, 3);
                // Force the structural branches: u = 0, v = 0, v on the line of u.
                if (it % 4 == 1) x[1] = 0;
                if (it % 4 == 2) x[1] = x[3] = 0;
                if (it % 4 == 3) x[3] = md(2 * x[1], 3);
                g.push_back(x);
            }
            auto r = prime_case_report(3, n, g);
            ASSERT_EQ(r.S3, r.S3_formula) << "n=" << n;
            ASSERT_EQ(r.S2, r.S2_formula);
            ASSERT_TRUE(r.identity_residual.is_zero());
            ++cases;
        }
    }
    EXPECT_GE(cases, 500);
}

TEST(PrimeCase, FiveSingleSlot) {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 20; ++it) {
        auto r = prime_case_report(5, 1, {rand_m2(rng, 5)});
        EXPECT_EQ(r.S3, r.S3_formula);
        EXPECT_TRUE(r.identity_residual.is_zero());
    }
}

TEST(WMeasure, TableMatchesDirect) {
    std::mt19937_64 rng(31);
    const std::vector<std::tuple<i64, int, M2>> etas = {
        {3, 1, {3, 0, 0, 1}}, {3, 1, {1, 1, 1, 4}}, {5, 1, {5, 0, 0, 1}}, {3, 2, {9, 0, 0, 1}}, {3, 2, {1, 2, 4, 17}}};
    for (const auto& [p, k, eta] : etas) {
        WTable t = build_w_table(eta, p, k);
        for (int it = 0; it < 6; ++it) {
            M2 M0 = rand_m2(rng, t.mod);
            EXPECT_EQ(t.W_of(m2_mul(M0, eta, t.mod)), W_measure_direct(M0, eta, p, k));
        }
        EXPECT_LE(t.sum(), Rational(k + 1));
    }
}

TEST(WMeasure, UnitScalingInvariant) {
    WTable t = build_w_table({9, 0, 0, 1}, 3, 2);
    std::mt19937_64 rng(2);
    for (int it = 0; it < 10; ++it) {
        M2 M0 = rand_m2(rng, 9);
        M2 scaled = {2 * M0[0], 2 * M0[1], 2 * M0[2], 2 * M0[3]};
        EXPECT_EQ(W_measure_direct(M0, t.eta, 3, 2), W_measure_direct(scaled, t.eta, 3, 2));
    }
}

TEST(WMeasure, GeneratorInvariant) {
    std::mt19937_64 rng(17);
    for (const M2& eta : {M2{9, 0, 0, 1}, M2{1, 2, 4, 17}, M2{3, 1, 0, 3}}) {
        for (int it = 0; it < 5; ++it) {
            M2 M0 = rand_m2(rng, 9);
            std::vector<Rational> vals;
            for (int g = 0; g < 4; ++g) {
                try {
                    vals.push_back(W_measure_direct(M0, eta, 3, 2, g));
                } catch (const PreconditionError&) {
                }
            }
            ASSERT_GE(vals.size(), 1u);
            for (const auto& v : vals) EXPECT_EQ(v, vals.front());
        }
    }
}

TEST(WMeasure, HurwitzEtaAtThree) {
    const auto eta = HurwitzQuat::one() + HurwitzQuat::i() + HurwitzQuat::j();
    // Direct count through the splitting.
    Splitting s(3, 1);
    Rational want = W_measure_direct(s(HurwitzQuat::one()), s(eta), 3, 1);
    EXPECT_EQ(W_measure(HurwitzQuat::one(), eta, 3), want);
    // Image of eta is rank one: Z N = [[a, a], [b, b]] and M0 eta = [[2, 2], [0, 0]]
    // needs a != 0, b = 0.
    EXPECT_EQ(want, Rational(2, 9));
    // M0 in O eta^dagger makes M0 eta = 0, contained for every Z.
    EXPECT_EQ(W_measure(eta.conj(), eta, 3), 1);
    EXPECT_THROW(W_measure(HurwitzQuat::one(), HurwitzQuat::one(), 3), PreconditionError);
}

TEST(LocalSupport, ExhaustiveSmallCases) {
    struct C {
        i64 p;
        int n;
        M2 d;
    };
    for (const C& c : {C{3, 1, {3, 0, 0, 1}}, C{3, 1, {9, 0, 0, 1}}, C{3, 1, {3, 0, 0, 3}}, C{5, 1, {5, 0, 0, 1}},
                       C{3, 2, {3, 0, 0, 1}}}) {
        std::vector<i64> ups(static_cast<size_t>(c.n), 1);
        if (c.n == 2) ups[1] = 2;
        auto r = thm81_sweep(c.p, c.n, c.d, ups, true, 0, 0);
        EXPECT_EQ(r.cases, ipow(c.p, 4 * c.n * vp(c.d[0] * c.d[3], c.p)));
        EXPECT_GT(r.nonzero, 0);
        EXPECT_EQ(r.support_violations, 0);
        EXPECT_EQ(r.bound_violations, 0);
        EXPECT_LE(r.w_sum, Rational(r.w_bound));
    }
}

TEST(LocalSupport, SampledMatchesAudit) {
    auto r = thm81_sweep(3, 2, {9, 0, 0, 1}, {1, 1}, false, 20, 99);
    EXPECT_EQ(r.cases, 20);
    EXPECT_EQ(r.support_violations, 0);
    EXPECT_EQ(r.bound_violations, 0);
    auto v = thm81_audit(make_req(3, {1}, {3, 0, 0, 1}, {{0, 0, 0, 0}}));
    EXPECT_TRUE(v.support_ok);
    EXPECT_TRUE(v.has_witness);
    EXPECT_TRUE(v.bound_ok);
    auto z = thm81_audit(make_req(3, {1}, {3, 0, 0, 3}, {{1, 0, 0, 0}}));
    EXPECT_TRUE(z.I0.is_zero());
    EXPECT_TRUE(z.support_ok);
}

TEST(DaggerCongruence, ExhaustiveAtThree) {
    auto r = congruence_sweep(3, {3, 0, 0, 1}, 1, true, 0, 0);
    EXPECT_EQ(r.pairs, 81 * 81);
    EXPECT_GT(r.nonzero, 0);
    EXPECT_EQ(r.violations, 0);
    auto s = congruence_sweep(3, {9, 0, 0, 1}, 2, false, 300, 5);
    EXPECT_EQ(s.violations, 0);
}
