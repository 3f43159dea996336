#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qcl/arith.hpp"
#include "qcl/hurwitz.hpp"

namespace qcl {

using Vec4 = std::array<i64, 4>;

// Rank-4 sublattice of the Hurwitz order. Rows of `hnf` are basis vectors in
// coordinates for the Z-basis (1, i, j, omega).
struct Lattice4 {
    std::vector<Vec4> hnf;
    i64 index;  // [O_D : Lambda]

    bool contains(const HurwitzQuat& x) const;
    std::vector<HurwitzQuat> basis() const;
};

// Hermite normal form of the row lattice spanned by `rows` (upper echelon,
// positive pivots, entries above a pivot reduced into [0, pivot)).
std::vector<std::vector<BigInt>> hnf_rows(std::vector<std::vector<BigInt>> rows);

// {x in Z^d : C x = 0 mod q row by row}, as a basis of rows.
std::vector<std::vector<BigInt>> congruence_lattice(int dim, const std::vector<std::vector<i64>>& rows,
                                                    const std::vector<i64>& moduli);

Lattice4 lattice_from_generators(const std::vector<HurwitzQuat>& gens);

// {M in H O : (M - M^dagger) eta in K O, M eta in Z M0 eta + m O}.
Lattice4 lattice_basis(i64 H, i64 K, i64 m, const HurwitzQuat& eta, const HurwitzQuat& M0);
// Membership by the defining conditions (an independent check).
bool in_key_lattice(const HurwitzQuat& M, i64 H, i64 K, i64 m, const HurwitzQuat& eta, const HurwitzQuat& M0);

// Sup-norm (true coordinates) of a Hurwitz element, as a rational with denominator 1 or 2.
Rational sup_norm(const HurwitzQuat& x);

// All nonzero lattice vectors with sup-norm <= R.
std::vector<HurwitzQuat> short_vectors(const Lattice4& L, const Rational& R, std::size_t budget = 5000000);

struct Minima {
    std::array<Rational, 4> lambda;
    std::array<HurwitzQuat, 4> vectors;
};
Minima successive_minima(const Lattice4& L, const Rational& bound);

struct PointCount {
    Rational R;
    i64 count;  // including the origin
    double rhs;  // 1 + R/H + (R/H)^2/K'^{1/2} + (R/H)^3/(K'm')^{1/2} + (R/H)^4/(K'm')
    double ratio;
    bool within;  // count <= kPointCountConstant * rhs
};
inline constexpr double kPointCountConstant = 256;
PointCount lattice_point_count(const Lattice4& L, const Rational& R, i64 H, i64 K, i64 m);

struct PrepGeomReport {
    HurwitzQuat eta;
    i64 K;
    bool norm_divisible;     // A eta = 0 mod K implies K | nrd(A) on sampled A
    i64 theta_solutions;     // #{theta mod K : eta theta = 0 mod K}
    bool theta_count_ok;     // == K^2
    HurwitzQuat theta;       // shortest nonzero solution
    double theta_constant;   // ||theta|| / sqrt(K)
    HurwitzQuat eta_prime;   // shortest nonzero element of eta O + K O
    double eta_prime_constant;
    bool ok;                 // all four checks with C = kPrepGeomConstant
};
inline constexpr double kPrepGeomConstant = 1.0;
// lambda_4 <= kLambda4Constant * sqrt(K m) at H = 1 (calibrated on random instances).
inline constexpr double kLambda4Constant = 1.0;
PrepGeomReport prepgeom_checks(const HurwitzQuat& eta, i64 K, std::uint64_t seed = 1);

struct RepNumber {
    i64 m;
    i64 enumerated;  // primitive elements of norm m, divided by 24
    i64 formula;
};
RepNumber rep_number(i64 m);

}  // namespace qcl
