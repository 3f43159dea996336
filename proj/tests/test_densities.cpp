#include <gtest/gtest.h>

#include <cmath>

#include "qcl/densities.hpp"
#include "qcl/hurwitz.hpp"
#include "qcl/parallel.hpp"

using namespace qcl;

TEST(SplitDensity, LevelZeroIsOne) {
    auto d = split_density(3, 0, 4, {1, 1, 1, 1});
    EXPECT_EQ(d.count, 1);
    EXPECT_EQ(d.normalized, 1);
}

TEST(SplitDensity, NilpotentsModThree) {
    // Direct count of Y in M2(F_3) with Y^2 = 0.
    i64 direct = 0;
    for (i64 a = 0; a < 3; ++a)
        for (i64 b = 0; b < 3; ++b)
            for (i64 c = 0; c < 3; ++c)
                for (i64 d = 0; d < 3; ++d)
                    if ((a * a + b * c) % 3 == 0 && (a * b + b * d) % 3 == 0 && (c * a + d * c) % 3 == 0 &&
                        (c * b + d * d) % 3 == 0)
                        ++direct;
    EXPECT_EQ(direct, 9);
    EXPECT_EQ(split_density(3, 1, 1, {1}).count, direct);
}

TEST(SplitDensity, ConvolutionMatchesExhaustion) {
    struct C {
        i64 p;
        int m;
        std::vector<i64> u;
    };
    for (const C& c : {C{3, 1, {1}}, C{3, 1, {1, -1}}, C{3, 1, {1, 1}}, C{3, 1, {1, 1, -1}}, C{3, 1, {2, 1, 1}},
                       C{5, 1, {1, 2}}, C{7, 1, {1, -1}}, C{3, 2, {1}}, C{5, 1, {1, -1}}}) {
        auto a = split_density(c.p, c.m, static_cast<int>(c.u.size()), c.u);
        auto b = split_density_exhaustive(c.p, c.m, static_cast<int>(c.u.size()), c.u);
        EXPECT_EQ(a.count, b.count) << "p=" << c.p << " m=" << c.m << " n=" << c.u.size();
        EXPECT_EQ(a.normalized, b.normalized);
    }
}

TEST(SplitDensity, TailBracketAtThree) {
    const double b = split_tail_bound(3, 5);
    EXPECT_NEAR(b, (1.0 / 3) * (9.0 / 8) / (1 - std::pow(3.0, -1.5)) * 1.5, 1e-12);
    for (int m : {1, 2}) {
        auto d = split_density(3, m, 5, {1, 1, 1, 1, 1});
        EXPECT_GT(d.normalized, 0);
        EXPECT_LE(std::fabs(d.normalized.convert_to<double>() - 1), b);
    }
}

TEST(SplitDensity, ThreadCountInvariant) {
    set_thread_budget(1);
    auto a = split_density(3, 2, 3, {1, 1, -1});
    set_thread_budget(4);
    auto b = split_density(3, 2, 3, {1, 1, -1});
    set_thread_budget(1);
    EXPECT_EQ(a.count, b.count);
}

TEST(SplitDensity, RejectsEvenPrimeAndHugeLevels) {
    EXPECT_THROW(split_density(2, 1, 2, {1, 1}), PreconditionError);
    EXPECT_THROW(split_density(5, 3, 2, {1, 1}), BudgetError);
}

TEST(NonsplitDensity, TwoAdicSingleSlot) {
    // gamma^2 in (1+i)O iff nrd(gamma) is even; count the 16 residues mod 2.
    i64 even = 0;
    for (i64 a = 0; a < 2; ++a)
        for (i64 b = 0; b < 2; ++b)
            for (i64 c = 0; c < 2; ++c)
                for (i64 d = 0; d < 2; ++d) even += HurwitzQuat::from_basis({a, b, c, d}).nrd() % 2 == 0;
    EXPECT_EQ(even, 4);
    EXPECT_EQ(nonsplit_density(2, 1, 1, {1}).count, even);
}

TEST(NonsplitDensity, OddSingleSlot) {
    // y^2 in pi O iff y in pi O: p^2 residues mod p.
    EXPECT_EQ(nonsplit_density(3, 1, 1, {1}).count, 9);
    EXPECT_EQ(nonsplit_density(5, 1, 1, {1}).count, 25);
}

TEST(NonsplitDensity, PositiveAndStabilising) {
    for (const std::vector<i64>& u : {std::vector<i64>{1, 1, 1, 1, 1}, std::vector<i64>{1, 1, 1, -1, -1}}) {
        std::vector<double> d;
        for (int m = 1; m <= 3; ++m) {
            auto s = nonsplit_density(2, m, 5, u);
            EXPECT_GT(s.normalized, 0);
            d.push_back(s.normalized.convert_to<double>());
        }
        EXPECT_LT(std::fabs(d[2] - d[1]), std::fabs(d[1] - d[0]));
    }
    EXPECT_GT(nonsplit_density(3, 2, 5, {1, 1, 1, 1, 1}).normalized, 0);
}

TEST(BoxDensity, Reproducible) {
    auto a = archimedean_density(2, {1, -1}, 0.1, 100000, 99);
    auto b = archimedean_density(2, {1, -1}, 0.1, 100000, 99);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.stderr_, b.stderr_);
    set_thread_budget(4);
    auto c = archimedean_density(2, {1, -1}, 0.1, 100000, 99);
    set_thread_budget(1);
    EXPECT_EQ(a.hits, c.hits);
}

TEST(BoxDensity, DefiniteSingleSlotBlowsUp) {
    // The only real zero is the singular point Y = 0, where the box volume is
    // of order eps^2; against (2 eps)^4 the estimate grows like eps^{-2}.
    auto a = archimedean_density(1, {1}, 0.1, 1000000, 3);
    auto b = archimedean_density(1, {1}, 0.05, 1000000, 3);
    const double r = b.estimate / a.estimate;
    EXPECT_GT(r, 3.0);
    EXPECT_LT(r, 5.0);
}

TEST(BoxDensity, ConsistentAcrossEpsForThreeSlots) {
    auto a = archimedean_density(3, {1, 1, -1}, 0.1, 2000000, 5);
    auto b = archimedean_density(3, {1, 1, -1}, 0.05, 2000000, 5);
    EXPECT_GT(a.hits, 0u);
    EXPECT_GT(b.hits, 0u);
    EXPECT_LE(std::fabs(a.estimate - b.estimate), 3 * std::hypot(a.stderr_, b.stderr_));
}

TEST(SingularSeries, ProductOfRows) {
    auto r = singular_series(5, {1, 1, 1, 1, 1}, 7, 1);
    ASSERT_EQ(r.rows.size(), 4u);
    Rational prod = 1;
    for (const auto& row : r.rows) {
        prod *= row.sample.normalized;
        if (row.split) {
            EXPECT_EQ(row.sample.normalized, split_density(row.p, 1, 5, {1, 1, 1, 1, 1}).normalized);
            EXPECT_LE(std::fabs(row.approx - 1), row.bracket);
        } else {
            EXPECT_EQ(row.p, 2);
            EXPECT_FALSE(row.has_bracket);
        }
    }
    EXPECT_EQ(prod, r.partial_product);
    EXPECT_FALSE(r.tail_converges);
    EXPECT_LT(r.tail_lower, 1);
    EXPECT_GT(r.tail_upper, 1);
}

TEST(SingularSeries, LevelZeroIsTrivial) {
    auto r = singular_series(6, {1, 1, 1, 1, 1, 1}, 11, 0);
    EXPECT_EQ(r.partial_product, 1);
    EXPECT_TRUE(r.tail_converges);
}
