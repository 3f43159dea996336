#include <gtest/gtest.h>

#include <random>

#include "qcl/expsums.hpp"
#include "qcl/geometry.hpp"

using namespace qcl;

namespace {

Mat2R fq(i64 q, i64 a, i64 b, i64 c, i64 d) { return {Ring::field(q), a, b, c, d}; }
Mat2R qq(Rational a, Rational b, Rational c, Rational d) { return {Ring::rationals(), a, b, c, d}; }

}  // namespace

TEST(LW, Examples) {
    EXPECT_EQ(lw_kernel(qq(-1, 0, 0, 1)).dim, 2);
    EXPECT_EQ(lw_kernel(qq(1, 0, 0, 1)).dim, 0);
    auto nil = lw_kernel(qq(0, 1, 0, 0));
    ASSERT_EQ(nil.dim, 2);
    for (const auto& A : nil.basis) {
        EXPECT_EQ(A(1, 0), 0);
        EXPECT_EQ(A(0, 0) + A(1, 1), 0);
    }
    EXPECT_EQ(lw_kernel(fq(5, 1, 0, 0, 0)).dim, 1);
    EXPECT_THROW(lw_kernel(qq(0, 0, 0, 0)), PreconditionError);
    EXPECT_THROW(lw_kernel(fq(2, 1, 0, 0, 1)), PreconditionError);
}

TEST(LW, BasisAnticommutesOverQ) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<i64> c(-4, 4);
    for (int t = 0; t < 300; ++t) {
        Mat2R W = qq(Rational(c(rng), 1 + rng() % 3), c(rng), c(rng), c(rng));
        if (t % 3 == 0) W = qq(W(0, 0), W(0, 1), W(1, 0), -W(0, 0));  // traceless
        if (W.is_zero()) continue;
        auto L = lw_kernel(W);
        EXPECT_EQ(L.dim, lw_dim_formula(W));
        for (const auto& A : L.basis) EXPECT_TRUE((W * A + A * W).is_zero());
    }
}

TEST(Hessian, Examples) {
    EXPECT_EQ(hessian_rank(qq(1, 2, 3, -1), {1}), 2);
    const int r = hessian_rank(qq(1, 0, 0, 1), {1});
    EXPECT_TRUE(r == 3 || r == 4);
    EXPECT_EQ(hessian_rank(HurwitzQuat(0, 2, 4, -2), {1, -1, 1}), 6);
    EXPECT_EQ(hessian_rank(HurwitzQuat::one(), {1}), 4);
    EXPECT_THROW(hessian_rank(qq(0, 0, 0, 0), {1}), PreconditionError);
}

TEST(Hessian, AllNonzeroWOverF3) {
    int count = 0;
    for (i64 a = 0; a < 3; ++a)
        for (i64 b = 0; b < 3; ++b)
            for (i64 c = 0; c < 3; ++c)
                for (i64 d = 0; d < 3; ++d) {
                    if (!a && !b && !c && !d) continue;
                    ++count;
                    for (auto ups : {std::vector<i64>{1, 1}, {1, -1}}) EXPECT_GE(hessian_rank(fq(3, a, b, c, d), ups), 4);
                }
    EXPECT_EQ(count, 80);
}

TEST(GeometryAudit, F3AndF5) {
    for (i64 q : {3, 5}) {
        auto g = geometry_audit(q);
        EXPECT_TRUE(g.ok) << "q=" << q;
        EXPECT_EQ(g.nonzero_W, q * q * q * q - 1);
        EXPECT_EQ(g.min_hessian_rank[0], 2);
        EXPECT_EQ(g.min_hessian_rank[1], 4);
        EXPECT_LE(g.intersections.max_intersection_dim, 1);
        EXPECT_EQ(g.intersections.pairs, g.nonzero_W * g.nonzero_W);
    }
}

TEST(GeometryAudit, ProportionalPairsShareTheirSpace) {
    const Mat2R W = fq(5, 1, 2, 3, 4);
    const Mat2R W2 = fq(5, 2, 4, 6, 8);
    auto a = lw_kernel(W), b = lw_kernel(W2);
    ASSERT_EQ(a.basis.size(), b.basis.size());
    for (size_t i = 0; i < a.basis.size(); ++i) EXPECT_TRUE(a.basis[i] == b.basis[i]);
}

TEST(HessianCertificate, ThousandRationalInstances) {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<i64> c(-9, 9);
    int done = 0;
    while (done < 1000) {
        const Mat2R Z(Ring::rationals(), Rational(c(rng), 1 + rng() % 9), Rational(c(rng), 1 + rng() % 9),
                      Rational(c(rng), 1 + rng() % 9), Rational(c(rng), 1 + rng() % 9));
        if (Z.trd() == 0 || Z.nrd() == 0) continue;
        EXPECT_TRUE(hessian_matrices(Z).identity_ok);
        ++done;
    }
}
