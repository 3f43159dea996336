#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qcl/delta.hpp"
#include "qcl/lattices.hpp"
#include "qcl/parallel.hpp"

using namespace qcl;

TEST(BSpline, ExactValuesAndMoments) {
    EXPECT_EQ(bspline5(Rational(3)), Rational(11, 20));
    EXPECT_EQ(bspline5(Rational(1)), Rational(1, 120));
    EXPECT_EQ(bspline5(Rational(0)), 0);
    EXPECT_EQ(bspline5(Rational(6)), 0);
    EXPECT_EQ(bspline5(Rational(5, 2)), bspline5(Rational(7, 2)));
    // Partition of unity over integer shifts.
    const Rational x(7, 3);
    Rational s = 0;
    for (int k = -6; k <= 6; ++k) s += bspline5(x + k);
    EXPECT_EQ(s, 1);
    const SplineBump mass{0, 6};  // int_0^1 t B(6t) dt = 3 / 36
    EXPECT_EQ(mass.first_moment(), Rational(1, 12));
    EXPECT_NEAR(bspline5(2.5), bspline5(Rational(5, 2)).convert_to<double>(), 1e-15);
}

TEST(DeltaTestFn, StandardIsAdmissible) {
    const auto phi = DeltaTestFn::standard();
    EXPECT_NO_THROW(phi.validate());
    EXPECT_EQ(phi.phi2(0), 0);
    EXPECT_NEAR(phi.F2_zero_pi2_coefficient(), 11.0 / 120, 1e-15);
    DeltaTestFn bad = phi;
    bad.phi2 = {1, 6};
    EXPECT_THROW(bad.validate(), PreconditionError);
}

TEST(DeltaTestFn, RadialTransformMatchesDirectQuadrature) {
    // At xi = 0 the oscillatory path reduces to the volume integral.
    const auto phi = DeltaTestFn::standard();
    EXPECT_NEAR(phi.F2(1e-14), phi.F2_zero(), 1e-6);
    EXPECT_TRUE(std::isfinite(phi.F2(3.5)));
}

TEST(NormHistogram, MatchesJacobi) {
    auto h = norm_histogram(60);
    EXPECT_EQ(h[0], 1);
    EXPECT_EQ(h[1], 24);
    for (i64 n = 1; n <= 60; ++n) {
        i64 s = 0;
        for (i64 d = 1; d <= n; d += 2)
            if (n % d == 0) s += d;
        EXPECT_EQ(h[static_cast<size_t>(n)], 24 * s) << n;
    }
}

TEST(DeltaSum, NonzeroAlphaCancelsExactly) {
    // 20 random alpha with Euclidean norm <= Q^2 / 2, alternating between the two Hurwitz cosets.
    std::mt19937_64 rng(31);
    for (i64 Q : {8, 16, 32}) {
        std::uniform_int_distribution<i64> c(-Q * Q / 2, Q * Q / 2);
        int done = 0, with_terms = 0;
        while (done < 20) {
            const i64 par = done % 2;
            const HurwitzQuat alpha(2 * c(rng) + par, 2 * c(rng) + par, 2 * c(rng) + par, 2 * c(rng) + par);
            if (alpha.is_zero() || 4 * alpha.nrd() > Q * Q * Q * Q) continue;
            auto res = delta_sum(alpha, Q);
            EXPECT_EQ(res.difference, 0);
            EXPECT_TRUE(res.certificate_ok);
            EXPECT_EQ(res.first_terms, res.second_terms);
            with_terms += res.first_terms > 0;
            ++done;
        }
        EXPECT_GT(with_terms, 0) << "Q=" << Q;
    }
}

TEST(DeltaSum, NonzeroAlphaWithManyDivisors) {
    for (const HurwitzQuat& alpha : {HurwitzQuat::integer(60), HurwitzQuat(2, 2, 2, 0) * HurwitzQuat::integer(15), HurwitzQuat::integer(1)}) {
        auto res = delta_sum(alpha, 8);
        EXPECT_EQ(res.difference, 0);
        EXPECT_TRUE(res.certificate_ok);
    }
    // alpha = 60: delta of norm 60 pairs with itself up to units, plenty of terms.
    EXPECT_GT(delta_sum(HurwitzQuat::integer(60), 8).first_terms, 100);
}

TEST(DeltaSum, HugeAlphaHasEmptySupport) {
    auto res = delta_sum(HurwitzQuat::integer(5000), 8);
    EXPECT_EQ(res.first_terms, 0);
    EXPECT_EQ(res.second_terms, 0);
    EXPECT_EQ(res.difference, 0);
}

TEST(DeltaSum, ZeroAlphaRatioConverges) {
    double prev = 1, prev_tail = 0;
    for (i64 Q : {8, 16, 32}) {
        auto res = delta_sum(HurwitzQuat(), Q);
        EXPECT_EQ(res.second_terms, 0);
        const double err = std::fabs(res.ratio - 1);
        EXPECT_LT(err, prev);
        prev = err;
        EXPECT_LT(res.poisson_residual, 1e-9) << "Q=" << Q;
        // Faster than Q^{-2}: each doubling of Q shrinks the dual tail by more than 4.
        const double tail = std::fabs(res.b_term - res.F2_zero);
        if (prev_tail > 0) EXPECT_LT(tail, prev_tail / 4);
        prev_tail = tail;
        std::printf("Q=%ld ratio-1=%.3e b-F2(0,0)=%.3e residual=%.3e\n", static_cast<long>(Q), res.ratio - 1,
                    res.b_term - res.F2_zero, res.poisson_residual);
    }
    EXPECT_LT(prev, 0.01);
}

TEST(DeltaSum, ThreadInvariant) {
    set_thread_budget(4);
    auto a = delta_sum(HurwitzQuat(), 16);
    auto b = delta_sum(HurwitzQuat::integer(30), 16);
    set_thread_budget(1);
    EXPECT_EQ(a.difference, delta_sum(HurwitzQuat(), 16).difference);
    EXPECT_EQ(a.b_term, delta_sum(HurwitzQuat(), 16).b_term);
    EXPECT_EQ(b.first_terms, delta_sum(HurwitzQuat::integer(30), 16).first_terms);
}

TEST(Poisson, DualLatticeAudit) {
    auto a = dual_lattice_audit();
    EXPECT_TRUE(a.dual_is_inverse_of_one_plus_i);
    EXPECT_TRUE(a.double_dual_is_order);
    EXPECT_EQ(a.index, 4);
}

TEST(Poisson, GaussianAcrossScales) {
    for (const Rational s : {Rational(1, 8), Rational(1, 3), Rational(1), Rational(5, 2), Rational(8)}) {
        auto r = poisson_check(s);
        EXPECT_LT(r.rel_err, 1e-10) << s;
    }
    EXPECT_THROW(poisson_check(Rational(9)), PreconditionError);
}
