#include "qcl/densities.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qcl/hurwitz.hpp"
#include "qcl/mat2.hpp"
#include "qcl/nonsplit.hpp"
#include "qcl/parallel.hpp"

namespace qcl {

namespace {

// Distribution over the additive group (Z/M)^4, stored densely.
struct Dist4 {
    i64 M = 1;
    std::vector<i128> w;

    i64 size() const { return static_cast<i64>(w.size()); }
};

i64 pack(const std::array<i64, 4>& x, i64 M) { return ((x[0] * M + x[1]) * M + x[2]) * M + x[3]; }

std::array<i64, 4> unpack(i64 v, i64 M) {
    std::array<i64, 4> x;
    for (int t = 3; t >= 0; --t) {
        x[static_cast<size_t>(t)] = v % M;
        v /= M;
    }
    return x;
}

struct Support {
    std::vector<i64> idx;
    std::vector<std::array<i64, 4>> digits;
};

Support support_of(const Dist4& d) {
    Support s;
    for (i64 i = 0; i < d.size(); ++i)
        if (d.w[static_cast<size_t>(i)] != 0) {
            s.idx.push_back(i);
            s.digits.push_back(unpack(i, d.M));
        }
    return s;
}

constexpr size_t kShards = 16;

Dist4 convolve(const Dist4& a, const Dist4& b) {
    const Support sa = support_of(a), sb = support_of(b);
    if (static_cast<double>(sa.idx.size()) * static_cast<double>(sb.idx.size()) > 4e9)
        throw BudgetError("density convolution exceeds the work budget");
    const i64 M = a.M;
    std::vector<std::vector<i128>> part(kShards);
    for_each_shard(kShards, [&](size_t s) {
        auto& out = part[s];
        out.assign(a.w.size(), 0);
        for (size_t i = s; i < sa.idx.size(); i += kShards) {
            const auto& x = sa.digits[i];
            const i128 wa = a.w[static_cast<size_t>(sa.idx[i])];
            for (size_t j = 0; j < sb.idx.size(); ++j) {
                const auto& y = sb.digits[j];
                i64 k = ((((x[0] + y[0]) % M) * M + (x[1] + y[1]) % M) * M + (x[2] + y[2]) % M) * M + (x[3] + y[3]) % M;
                out[static_cast<size_t>(k)] += wa * b.w[static_cast<size_t>(sb.idx[j])];
            }
        }
    });
    Dist4 r{M, std::vector<i128>(a.w.size(), 0)};
    for (const auto& pt : part)
        for (size_t i = 0; i < pt.size(); ++i) r.w[i] += pt[i];
    return r;
}

i64 negate(i64 v, i64 M) {
    auto x = unpack(v, M);
    for (auto& e : x) e = (M - e) % M;
    return pack(x, M);
}

// Slot distributions combined by a balanced tree.
Dist4 combine(const std::vector<Dist4>& slots, size_t lo, size_t hi) {
    if (hi - lo == 1) return slots[lo];
    size_t mid = (lo + hi) / 2;
    return convolve(combine(slots, lo, mid), combine(slots, mid, hi));
}

i128 value_at_zero(const std::vector<Dist4>& slots) {
    if (slots.size() == 1) return slots[0].w[0];
    const size_t mid = slots.size() / 2;
    Dist4 a = combine(slots, 0, mid), b = combine(slots, mid, slots.size());
    i128 s = 0;
    for (i64 i = 0; i < a.size(); ++i)
        if (a.w[static_cast<size_t>(i)] != 0) s += a.w[static_cast<size_t>(i)] * b.w[static_cast<size_t>(negate(i, a.M))];
    return s;
}

void check_width(i64 p, int m, int n) {
    if (4.0 * m * n * std::log2(static_cast<double>(p)) > 120) throw BudgetError("density count exceeds 128-bit range");
}

DensitySample finish(i64 p, bool split, int m, int n, const BigInt& count) {
    DensitySample d{p, split, m, n, count, Rational(0)};
    d.normalized = Rational(count) / rat_pow(p, 4 * m * (n - 1));
    return d;
}

BigInt to_bigint(i128 v) {
    BigInt r = static_cast<i64>(v >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(v & ((static_cast<i128>(1) << 64) - 1));
    return r;
}

std::vector<i64> square_classes_split(i64 p, int m, i64 ups) {
    const i64 M = ipow(p, m);
    const i64 N = M * M * M * M;
    std::vector<i64> out(static_cast<size_t>(N));
    for (i64 idx = 0; idx < N; ++idx) {
        auto Y = unpack(idx, M);
        M2 y2 = m2_mul(Y, Y, M);
        for (auto& e : y2) e = md(ups * e, M);
        out[static_cast<size_t>(idx)] = pack(y2, M);
    }
    return out;
}

std::vector<Dist4> slot_dists(const std::vector<std::vector<i64>>& classes, i64 M) {
    std::vector<Dist4> slots;
    for (const auto& c : classes) {
        Dist4 d{M, std::vector<i128>(c.size(), 0)};
        for (i64 v : c) ++d.w[static_cast<size_t>(v)];
        slots.push_back(std::move(d));
    }
    return slots;
}

void check_args(int m, int n, const std::vector<i64>& upsilon) {
    require(m >= 0, "density level must be non-negative");
    require(n >= 1 && static_cast<int>(upsilon.size()) == n, "upsilon must have length n >= 1");
}

}  // namespace

DensitySample split_density(i64 p, int m, int n, const std::vector<i64>& upsilon) {
    require(p > 2 && is_prime(p), "split_density: p must be an odd prime");
    check_args(m, n, upsilon);
    if (m == 0) return finish(p, true, 0, n, 1);
    if (std::pow(static_cast<double>(p), 4.0 * m) > 1e7) throw BudgetError("split_density: p^{4m} > 1e7");
    check_width(p, m, n);
    const i64 M = ipow(p, m);
    std::vector<std::vector<i64>> cls;
    for (i64 u : upsilon) cls.push_back(square_classes_split(p, m, u));
    return finish(p, true, m, n, to_bigint(value_at_zero(slot_dists(cls, M))));
}

DensitySample split_density_exhaustive(i64 p, int m, int n, const std::vector<i64>& upsilon) {
    require(p > 2 && is_prime(p), "split_density: p must be an odd prime");
    check_args(m, n, upsilon);
    if (m == 0) return finish(p, true, 0, n, 1);
    if (std::pow(static_cast<double>(p), 4.0 * m * n) > 1e8) throw BudgetError("exhaustive density: p^{4mn} > 1e8");
    const i64 M = ipow(p, m);
    const i64 N = M * M * M * M;
    std::vector<std::vector<std::array<i64, 4>>> vals;
    for (i64 u : upsilon) {
        std::vector<std::array<i64, 4>> v;
        for (i64 idx = 0; idx < N; ++idx) {
            auto Y = unpack(idx, M);
            M2 y2 = m2_mul(Y, Y, M);
            for (auto& e : y2) e = md(u * e, M);
            v.push_back(y2);
        }
        vals.push_back(std::move(v));
    }
    std::vector<i64> pos(static_cast<size_t>(n), 0);
    i64 count = 0;
    while (true) {
        std::array<i64, 4> s{0, 0, 0, 0};
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < 4; ++t) s[static_cast<size_t>(t)] += vals[static_cast<size_t>(i)][static_cast<size_t>(pos[static_cast<size_t>(i)])][static_cast<size_t>(t)];
        if (s[0] % M == 0 && s[1] % M == 0 && s[2] % M == 0 && s[3] % M == 0) ++count;
        int i = 0;
        while (i < n && ++pos[static_cast<size_t>(i)] == N) pos[static_cast<size_t>(i++)] = 0;
        if (i == n) break;
    }
    return finish(p, true, m, n, count);
}

DensitySample nonsplit_density(i64 p, int m, int n, const std::vector<i64>& upsilon) {
    require(is_prime(p), "nonsplit_density: p must be prime");
    check_args(m, n, upsilon);
    if (m == 0) return finish(p, false, 0, n, 1);
    if (std::pow(static_cast<double>(p), 4.0 * m) > 1e6) throw BudgetError("nonsplit_density: level too large");
    check_width(p, m, n);
    const i64 M = ipow(p, m);
    const i64 N = M * M * M * M;
    std::vector<std::vector<i64>> cls;
    std::vector<char> admissible(static_cast<size_t>(N), 0);
    if (p == 2) {
        // Hurwitz order; classes are basis coordinates (1, i, j, omega) mod 2^m.
        for (i64 u : upsilon) {
            std::vector<i64> c(static_cast<size_t>(N));
            for (i64 idx = 0; idx < N; ++idx) {
                HurwitzQuat y = HurwitzQuat::from_basis(unpack(idx, M));
                auto b = (u * (y * y)).basis_coords();
                for (auto& e : b) e = md(e, M);
                c[static_cast<size_t>(idx)] = pack(b, M);
            }
            cls.push_back(std::move(c));
        }
        // x in 2^{m-1}(1+i)O: x / 2^{m-1} integral with even reduced norm.
        const i64 h = M / 2;
        for (i64 idx = 0; idx < N; ++idx) {
            auto b = unpack(idx, M);
            if (std::any_of(b.begin(), b.end(), [&](i64 e) { return e % h != 0; })) continue;
            for (auto& e : b) e /= h;
            admissible[static_cast<size_t>(idx)] = HurwitzQuat::from_basis(b).nrd() % 2 == 0;
        }
    } else {
        for (i64 u : upsilon) {
            std::vector<i64> c(static_cast<size_t>(N));
            for (i64 idx = 0; idx < N; ++idx) {
                NonsplitLocalElem y(p, m, unpack(idx, M));
                auto z = (y * y).z();
                for (auto& e : z) e = md(u * e, M);
                c[static_cast<size_t>(idx)] = pack(z, M);
            }
            cls.push_back(std::move(c));
        }
        // alpha + beta pi in pi^{2m-1} O: alpha = 0 mod p^m, beta = 0 mod p^{m-1}.
        const i64 h = M / p;
        for (i64 idx = 0; idx < N; ++idx) {
            auto z = unpack(idx, M);
            admissible[static_cast<size_t>(idx)] = z[0] == 0 && z[1] == 0 && z[2] % h == 0 && z[3] % h == 0;
        }
    }
    auto slots = slot_dists(cls, M);
    Dist4 all = combine(slots, 0, slots.size());
    i128 count = 0;
    for (i64 idx = 0; idx < N; ++idx)
        if (admissible[static_cast<size_t>(idx)]) count += all.w[static_cast<size_t>(idx)];
    return finish(p, false, m, n, to_bigint(count));
}

double local_zeta(double q, double s) { return 1.0 / (1.0 - std::pow(q, -s)); }

double split_tail_bound(i64 q, int n) {
    require(n >= 5, "tail bound needs n >= 5");
    const double Q = static_cast<double>(q);
    return std::pow(Q, -(n - 3) / 2.0) * local_zeta(Q, n - 3) * local_zeta(Q, n / 2.0 - 1) *
           local_zeta(Q, (n - 3) / 2.0);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in [-1, 1) from (seed, sample, coordinate).
double coordinate(std::uint64_t seed, std::uint64_t sample, std::uint64_t coord, std::uint64_t width) {
    std::uint64_t r = splitmix64(seed ^ splitmix64(sample * width + coord));
    return static_cast<double>(r >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

BoxDensity archimedean_density(int n, const std::vector<i64>& upsilon, double eps, std::uint64_t samples,
                               std::uint64_t seed) {
    require(n >= 1 && static_cast<int>(upsilon.size()) == n, "upsilon must have length n");
    require(eps > 0 && eps <= 0.1, "eps must lie in (0, 0.1]");
    require(samples >= 10000, "need at least 1e4 samples");
    constexpr size_t shards = 64;
    std::vector<std::uint64_t> hits(shards, 0);
    const std::uint64_t width = 4 * static_cast<std::uint64_t>(n);
    for_each_shard(shards, [&](size_t s) {
        const std::uint64_t lo = samples * s / shards, hi = samples * (s + 1) / shards;
        for (std::uint64_t i = lo; i < hi; ++i) {
            double P[4] = {0, 0, 0, 0};
            for (int k = 0; k < n; ++k) {
                double y[4];
                for (int t = 0; t < 4; ++t) y[t] = coordinate(seed, i, static_cast<std::uint64_t>(4 * k + t), width);
                const double u = static_cast<double>(upsilon[static_cast<size_t>(k)]);
                P[0] += u * (y[0] * y[0] - y[1] * y[1] - y[2] * y[2] - y[3] * y[3]);
                P[1] += u * 2 * y[0] * y[1];
                P[2] += u * 2 * y[0] * y[2];
                P[3] += u * 2 * y[0] * y[3];
            }
            if (std::fabs(P[0]) <= eps && std::fabs(P[1]) <= eps && std::fabs(P[2]) <= eps && std::fabs(P[3]) <= eps)
                ++hits[s];
        }
    });
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    const double f = static_cast<double>(total) / static_cast<double>(samples);
    const double scale = std::pow(2.0, 4 * n) / std::pow(2 * eps, 4);
    return {scale * f, scale * std::sqrt(f * (1 - f) / static_cast<double>(samples)), total, samples, seed};
}

SingularSeriesReport singular_series(int n, const std::vector<i64>& upsilon, i64 pmax, int m, i64 tail_cutoff) {
    require(n >= 5, "singular_series needs n >= 5");
    require(pmax >= 2 && tail_cutoff >= pmax, "need 2 <= pmax <= tail_cutoff");
    SingularSeriesReport r{n, m, pmax, {}, Rational(1), tail_cutoff, 1.0, 1.0, n > 5};
    for (i64 p = 2; p <= pmax; ++p) {
        if (!is_prime(p)) continue;
        SingularSeriesRow row;
        row.p = p;
        row.split = p != 2;
        row.sample = row.split ? split_density(p, m, n, upsilon) : nonsplit_density(p, m, n, upsilon);
        row.approx = row.sample.normalized.convert_to<double>();
        row.has_bracket = row.split;
        row.bracket = row.split ? split_tail_bound(p, n) : 0.0;
        r.partial_product *= row.sample.normalized;
        r.rows.push_back(row);
    }
    for (i64 p = pmax + 1; p <= tail_cutoff; ++p) {
        if (!is_prime(p)) continue;
        const double b = split_tail_bound(p, n);
        r.tail_lower *= std::max(0.0, 1 - b);
        r.tail_upper *= 1 + b;
    }
    return r;
}

}  // namespace qcl
