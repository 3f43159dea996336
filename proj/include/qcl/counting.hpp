#pragma once

#include <optional>
#include <vector>

#include "qcl/arith.hpp"
#include "qcl/hurwitz.hpp"

namespace qcl {

// Histogram of Hurwitz values keyed by doubled coordinates packed as four
// signed 16-bit lanes (the packing is additive: key(a + b) = key(a) + key(b)).
class SparseDist {
public:
    static i64 pack(const std::array<i64, 4>& doubled);
    static std::array<i64, 4> unpack(i64 key);

    // Sorted by key, multiplicities nonzero.
    const std::vector<std::pair<i64, i128>>& entries() const { return e_; }
    i128 total() const;
    i128 at(i64 key) const;
    std::size_t size() const { return e_.size(); }

    static SparseDist from_unsorted(std::vector<std::pair<i64, i128>> items);

private:
    std::vector<std::pair<i64, i128>> e_;
};

// Elements with max(|w|,|x|,|y|,|z|) <= X, i.e. doubled coordinates in [-2X, 2X]
// of equal parity. `traceless` keeps only w = 0.
std::vector<HurwitzQuat> hurwitz_box(int X, bool traceless = false);

// Distribution of upsilon * gamma^2 over the box.
SparseDist square_distribution(i64 upsilon, int X, bool traceless = false);
SparseDist convolve(const SparseDist& a, const SparseDist& b);

BigInt brute_count(int n, const std::vector<i64>& upsilon, int X);
BigInt conv_count(int n, const std::vector<i64>& upsilon, int X, bool traceless = false);

struct TracelessCount {
    BigInt count;          // solutions with every trd(gamma_i) = 0
    BigInt quadric_count;  // sum upsilon_i (x_i^2 + y_i^2 + z_i^2) = 0 over Z^{3n}
};
TracelessCount traceless_count(int n, const std::vector<i64>& upsilon, int X);

struct GrowthRow {
    int X;
    BigInt count;
    BigInt traceless;
    std::optional<double> slope;            // log2 ratio against the previous row
    std::optional<double> traceless_slope;
};
std::vector<GrowthRow> growth_report(int n, const std::vector<i64>& upsilon, const std::vector<int>& Xs);

}  // namespace qcl
