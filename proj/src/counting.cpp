#include "qcl/counting.hpp"

#include <algorithm>
#include <cmath>

#include "qcl/parallel.hpp"

namespace qcl {

namespace {

constexpr i64 kLane = i64(1) << 16;
constexpr i64 kLaneMax = (i64(1) << 15) - 1;

BigInt to_big128(i128 v) {
    bool neg = v < 0;
    if (neg) v = -v;
    BigInt r = static_cast<std::uint64_t>(v >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(v & ((static_cast<i128>(1) << 64) - 1));
    return neg ? BigInt(-r) : r;
}

void check_request(int n, const std::vector<i64>& upsilon, int X) {
    require(n >= 0 && static_cast<int>(upsilon.size()) == n, "upsilon must have length n");
    require(X >= 0, "height must be non-negative");
    for (i64 u : upsilon) require(u == 1 || u == -1, "signs must be +1 or -1");
    // Lanes of a sum of n squares stay below 24 n X^2.
    if (24.0 * n * X * X + 1 > static_cast<double>(kLaneMax)) throw BudgetError("packed lanes would overflow");
}

}  // namespace

i64 SparseDist::pack(const std::array<i64, 4>& d) {
    for (i64 x : d) require(x >= -kLaneMax && x <= kLaneMax, "lane out of range");
    return ((d[3] * kLane + d[2]) * kLane + d[1]) * kLane + d[0];
}

std::array<i64, 4> SparseDist::unpack(i64 key) {
    std::array<i64, 4> d;
    for (int t = 0; t < 4; ++t) {
        i64 r = key % kLane;
        if (r > kLaneMax) r -= kLane;
        if (r < -kLaneMax) r += kLane;
        d[static_cast<size_t>(t)] = r;
        key = (key - r) / kLane;
    }
    return d;
}

i128 SparseDist::total() const {
    i128 s = 0;
    for (const auto& [k, v] : e_) s += v;
    return s;
}

i128 SparseDist::at(i64 key) const {
    auto it = std::lower_bound(e_.begin(), e_.end(), key, [](const auto& a, i64 k) { return a.first < k; });
    return it != e_.end() && it->first == key ? it->second : 0;
}

SparseDist SparseDist::from_unsorted(std::vector<std::pair<i64, i128>> items) {
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseDist d;
    for (const auto& [k, v] : items) {
        if (!d.e_.empty() && d.e_.back().first == k)
            d.e_.back().second += v;
        else
            d.e_.emplace_back(k, v);
    }
    std::erase_if(d.e_, [](const auto& kv) { return kv.second == 0; });
    return d;
}

std::vector<HurwitzQuat> hurwitz_box(int X, bool traceless) {
    require(X >= 0, "height must be non-negative");
    std::vector<HurwitzQuat> out;
    const i64 B = 2 * X;
    for (i64 a = -B; a <= B; ++a) {
        if (traceless && a != 0) continue;
        for (i64 b = -B; b <= B; ++b)
            for (i64 c = -B; c <= B; ++c)
                for (i64 d = -B; d <= B; ++d) {
                    const i64 par = md(a, 2);
                    if (md(b, 2) != par || md(c, 2) != par || md(d, 2) != par) continue;
                    out.emplace_back(a, b, c, d);
                }
    }
    return out;
}

namespace {

std::array<i64, 4> doubled_value(i64 upsilon, const HurwitzQuat& g) {
    HurwitzQuat s = g * g;
    return {upsilon * s.doubled()[0], upsilon * s.doubled()[1], upsilon * s.doubled()[2], upsilon * s.doubled()[3]};
}

}  // namespace

SparseDist square_distribution(i64 upsilon, int X, bool traceless) {
    std::vector<std::pair<i64, i128>> items;
    for (const auto& g : hurwitz_box(X, traceless)) items.emplace_back(SparseDist::pack(doubled_value(upsilon, g)), 1);
    return SparseDist::from_unsorted(std::move(items));
}

SparseDist convolve(const SparseDist& a, const SparseDist& b) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    if (static_cast<double>(ea.size()) * static_cast<double>(eb.size()) > 2e8)
        throw BudgetError("sparse convolution exceeds the memory budget");
    constexpr size_t shards = 16;
    std::vector<SparseDist> parts(shards);
    for_each_shard(shards, [&](size_t s) {
        std::vector<std::pair<i64, i128>> items;
        for (size_t i = s; i < ea.size(); i += shards)
            for (const auto& [kb, vb] : eb) items.emplace_back(ea[i].first + kb, ea[i].second * vb);
        parts[s] = SparseDist::from_unsorted(std::move(items));
    });
    std::vector<std::pair<i64, i128>> all;
    for (const auto& p : parts) all.insert(all.end(), p.entries().begin(), p.entries().end());
    return SparseDist::from_unsorted(std::move(all));
}

BigInt brute_count(int n, const std::vector<i64>& upsilon, int X) {
    check_request(n, upsilon, X);
    require(n <= 3, "brute_count handles n <= 3");
    if (n == 0) return 1;
    const auto box = hurwitz_box(X);
    if (std::pow(static_cast<double>(box.size()), n) > 1e9) throw BudgetError("brute_count: box^n > 1e9");
    std::vector<std::vector<i64>> keys(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (const auto& g : box) keys[static_cast<size_t>(i)].push_back(SparseDist::pack(doubled_value(upsilon[static_cast<size_t>(i)], g)));
    i64 count = 0;
    const auto& k0 = keys[0];
    if (n == 1) {
        for (i64 a : k0) count += a == 0;
    } else if (n == 2) {
        for (i64 a : k0)
            for (i64 b : keys[1]) count += a + b == 0;
    } else {
        for (i64 a : k0)
            for (i64 b : keys[1]) {
                const i64 t = -(a + b);
                for (i64 c : keys[2]) count += c == t;
            }
    }
    return count;
}

namespace {

SparseDist tree(const std::vector<SparseDist>& slots, size_t lo, size_t hi) {
    if (hi - lo == 1) return slots[lo];
    const size_t mid = (lo + hi) / 2;
    return convolve(tree(slots, lo, mid), tree(slots, mid, hi));
}

}  // namespace

BigInt conv_count(int n, const std::vector<i64>& upsilon, int X, bool traceless) {
    check_request(n, upsilon, X);
    if (n == 0) return 1;
    std::vector<SparseDist> slots;
    for (i64 u : upsilon) slots.push_back(square_distribution(u, X, traceless));
    if (n == 1) return to_big128(slots[0].at(0));
    const size_t mid = slots.size() / 2;
    SparseDist L = tree(slots, 0, mid), R = tree(slots, mid, slots.size());
    i128 s = 0;
    for (const auto& [k, v] : L.entries()) s += v * R.at(-k);
    return to_big128(s);
}

TracelessCount traceless_count(int n, const std::vector<i64>& upsilon, int X) {
    check_request(n, upsilon, X);
    TracelessCount r;
    r.count = conv_count(n, upsilon, X, true);
    const i64 side = 2 * X + 1;
    if (std::pow(static_cast<double>(side), 3.0 * n) > 1e8) throw BudgetError("quadric enumeration > 1e8 points");
    // Independent leg: enumerate Z^{3n} directly.
    std::vector<i64> v(static_cast<size_t>(3 * n), -X);
    i64 c = 0;
    while (true) {
        i64 s = 0;
        for (int i = 0; i < n; ++i) {
            const i64 x = v[static_cast<size_t>(3 * i)], y = v[static_cast<size_t>(3 * i + 1)], z = v[static_cast<size_t>(3 * i + 2)];
            s += upsilon[static_cast<size_t>(i)] * (x * x + y * y + z * z);
        }
        c += s == 0;
        size_t pos = 0;
        while (pos < v.size() && ++v[pos] > X) v[pos++] = -X;
        if (pos == v.size()) break;
    }
    r.quadric_count = c;
    return r;
}

std::vector<GrowthRow> growth_report(int n, const std::vector<i64>& upsilon, const std::vector<int>& Xs) {
    std::vector<GrowthRow> rows;
    for (int X : Xs) {
        GrowthRow row{X, conv_count(n, upsilon, X), conv_count(n, upsilon, X, true), std::nullopt, std::nullopt};
        if (!rows.empty() && rows.back().X > 0 && X > rows.back().X) {
            const double dx = std::log2(static_cast<double>(X) / rows.back().X);
            auto slope = [&](const BigInt& a, const BigInt& b) {
                return (std::log2(a.convert_to<double>()) - std::log2(b.convert_to<double>())) / dx;
            };
            row.slope = slope(row.count, rows.back().count);
            row.traceless_slope = slope(row.traceless, rows.back().traceless);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qcl
