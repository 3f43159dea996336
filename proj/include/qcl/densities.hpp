#pragma once

#include <cstdint>
#include <vector>

#include "qcl/arith.hpp"

namespace qcl {

struct DensitySample {
    i64 p;
    bool split;
    int m;
    int n;
    BigInt count;
    Rational normalized;  // count / p^{4m(n-1)}
};

// #{Y in M2(Z/p^m)^n : sum upsilon_i Y_i^2 = 0} by convolution of the
// distribution of upsilon Y^2, p odd.
DensitySample split_density(i64 p, int m, int n, const std::vector<i64>& upsilon);
// Same count by enumerating all tuples (p^{4mn} <= 1e8).
DensitySample split_density_exhaustive(i64 p, int m, int n, const std::vector<i64>& upsilon);

// Level m count over the maximal order at a ramified prime:
// #{Y in (O/p^m O)^n : P(Y) in pi^{2m-1} O}. At p = 2 the order is the Hurwitz
// order and pi = 1 + i; at odd p it is the u-presentation.
DensitySample nonsplit_density(i64 p, int m, int n, const std::vector<i64>& upsilon);

// Local zeta factor (1 - q^{-s})^{-1}.
double local_zeta(double q, double s);
// q^{-(n-3)/2} zeta(n-3) zeta(n/2-1) zeta((n-3)/2) with local zetas at q.
double split_tail_bound(i64 q, int n);

struct BoxDensity {
    double estimate;
    double stderr_;
    std::uint64_t hits;
    std::uint64_t samples;
    std::uint64_t seed;
};

// Monte Carlo estimate of vol{Y in [-1,1]^{4n} : |P(Y)|_inf <= eps} / (2 eps)^4
// with counter-based sampling.
BoxDensity archimedean_density(int n, const std::vector<i64>& upsilon, double eps, std::uint64_t samples,
                               std::uint64_t seed);

struct SingularSeriesRow {
    i64 p;
    bool split;
    DensitySample sample;
    double approx;
    bool has_bracket;
    double bracket;  // |d_m - 1| <= bracket for split primes
};

struct SingularSeriesReport {
    int n;
    int m;
    i64 pmax;
    std::vector<SingularSeriesRow> rows;
    Rational partial_product;
    // Product of (1 - b_p) and (1 + b_p) over pmax < p <= tail_cutoff.
    i64 tail_cutoff;
    double tail_lower, tail_upper;
    bool tail_converges;  // sum of b_p is finite only for n > 5
};

SingularSeriesReport singular_series(int n, const std::vector<i64>& upsilon, i64 pmax, int m,
                                     i64 tail_cutoff = 10000);

}  // namespace qcl
