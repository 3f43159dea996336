#include "qcl/cyclo.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qcl {

CycloSum::CycloSum(i64 p, int k, std::vector<i64> counts, int s)
    : p_(p), k_(k), s_(s), counts_(std::move(counts)) {
    require(p >= 2 && k >= 0, "bad cyclotomic parameters");
    require(static_cast<i64>(counts_.size()) == ipow(p, k), "counts size must be p^k");
    canonicalize();
}

CycloSum CycloSum::root_of_unity(i64 p, int k, i64 r) {
    std::vector<i64> c(static_cast<size_t>(ipow(p, k)), 0);
    c[static_cast<size_t>(md(r, ipow(p, k)))] = 1;
    return {p, k, std::move(c), 0};
}

void CycloSum::canonicalize() {
    if (s_ < 0) {
        i64 f = ipow(p_, -s_);
        for (auto& c : counts_) c = mul_checked(c, f);
        s_ = 0;
    }
    // Fold the top block using sum_{t mod p} zeta^{r0 + t p^{k-1}} = 0.
    while (k_ > 0) {
        const i64 pk1 = ipow(p_, k_ - 1);
        const i64 top = (p_ - 1) * pk1;
        for (i64 r = top; r < p_ * pk1; ++r) {
            i64 c = counts_[static_cast<size_t>(r)];
            if (c == 0) continue;
            for (i64 t = 0; t < p_; ++t) {
                auto& slot = counts_[static_cast<size_t>(r - top + t * pk1)];
                slot = add_checked(slot, -c);
            }
        }
        // Conductor drops when the support sits on multiples of p.
        bool reducible = true;
        for (i64 r = 0; r < static_cast<i64>(counts_.size()) && reducible; ++r)
            if (r % p_ != 0 && counts_[static_cast<size_t>(r)] != 0) reducible = false;
        if (!reducible) break;
        std::vector<i64> c(static_cast<size_t>(pk1));
        for (i64 r = 0; r < pk1; ++r) c[static_cast<size_t>(r)] = counts_[static_cast<size_t>(r * p_)];
        counts_ = std::move(c);
        --k_;
    }
    bool all_zero = true;
    for (i64 c : counts_) all_zero = all_zero && c == 0;
    if (all_zero) {
        k_ = 0;
        s_ = 0;
        counts_.assign(1, 0);
        return;
    }
    while (s_ > 0) {
        bool div = true;
        for (i64 c : counts_) div = div && c % p_ == 0;
        if (!div) break;
        for (auto& c : counts_) c /= p_;
        --s_;
    }
}

CycloSum cyclo_canonicalize(const CycloSum& v) {
    CycloSum out = v;
    out.canonicalize();
    return out;
}

CycloSum CycloSum::lifted(int k) const {
    CycloSum out;
    out.p_ = p_;
    out.k_ = k;
    out.s_ = s_;
    const i64 step = ipow(p_, k - k_);
    out.counts_.assign(static_cast<size_t>(ipow(p_, k)), 0);
    for (size_t r = 0; r < counts_.size(); ++r) out.counts_[r * static_cast<size_t>(step)] = counts_[r];
    return out;
}

Rational CycloSum::to_rational() const {
    require(is_rational(), "value is not rational");
    return Rational(counts_[0]) / rat_pow(p_, s_);
}

std::complex<long double> CycloSum::to_complex() const {
    const long double pk = static_cast<long double>(ipow(p_, k_));
    long double re = 0, im = 0;
    for (size_t r = 0; r < counts_.size(); ++r) {
        if (counts_[r] == 0) continue;
        long double ang = 2 * std::numbers::pi_v<long double> * static_cast<long double>(r) / pk;
        re += static_cast<long double>(counts_[r]) * std::cos(ang);
        im += static_cast<long double>(counts_[r]) * std::sin(ang);
    }
    long double sc = std::pow(static_cast<long double>(p_), -static_cast<long double>(s_));
    return {re * sc, im * sc};
}

CycloSum CycloSum::conj() const {
    const i64 pk = ipow(p_, k_);
    std::vector<i64> c(counts_.size(), 0);
    for (i64 r = 0; r < pk; ++r) c[static_cast<size_t>(md(-r, pk))] = counts_[static_cast<size_t>(r)];
    return {p_, k_, std::move(c), s_};
}

CycloSum CycloSum::abs2() const { return *this * conj(); }

long double CycloSum::magnitude() const {
    if (is_zero()) return 0;
    if (k_ <= 4) {
        CycloSum a2 = abs2();
        if (a2.is_rational()) return std::sqrt(static_cast<long double>(a2.to_rational()));
    }
    return std::abs(to_complex());
}

CycloSum CycloSum::times_ppow(int e) const {
    CycloSum out = *this;
    out.s_ -= e;
    out.canonicalize();
    return out;
}

namespace {
void check_prime(const CycloSum& a, const CycloSum& b) {
    require(a.p() == b.p(), "cyclotomic sums over different primes");
}
}  // namespace

CycloSum operator+(const CycloSum& a, const CycloSum& b) {
    check_prime(a, b);
    const int k = std::max(a.k_, b.k_);
    const int s = std::max(a.s_, b.s_);
    CycloSum x = a.lifted(k), y = b.lifted(k);
    const i64 fx = ipow(a.p_, s - a.s_), fy = ipow(b.p_, s - b.s_);
    std::vector<i64> c(x.counts_.size());
    for (size_t r = 0; r < c.size(); ++r)
        c[r] = add_checked(mul_checked(x.counts_[r], fx), mul_checked(y.counts_[r], fy));
    return {a.p_, k, std::move(c), s};
}

CycloSum operator-(const CycloSum& a, const CycloSum& b) { return a + (-1) * b; }

CycloSum operator*(i64 c, const CycloSum& a) {
    std::vector<i64> v(a.counts_.size());
    for (size_t r = 0; r < v.size(); ++r) v[r] = mul_checked(c, a.counts_[r]);
    return {a.p_, a.k_, std::move(v), a.s_};
}

CycloSum operator*(const CycloSum& a, const CycloSum& b) {
    check_prime(a, b);
    const int k = std::max(a.k_, b.k_);
    CycloSum x = a.lifted(k), y = b.lifted(k);
    const i64 pk = ipow(a.p_, k);
    std::vector<i64> c(static_cast<size_t>(pk), 0);
    for (i64 r = 0; r < pk; ++r) {
        i64 xr = x.counts_[static_cast<size_t>(r)];
        if (xr == 0) continue;
        for (i64 t = 0; t < pk; ++t) {
            i64 yt = y.counts_[static_cast<size_t>(t)];
            if (yt == 0) continue;
            auto& slot = c[static_cast<size_t>((r + t) % pk)];
            slot = add_checked(slot, mul_checked(xr, yt));
        }
    }
    return {a.p_, k, std::move(c), a.s_ + b.s_};
}

std::string CycloSum::str() const {
    std::ostringstream os;
    os << "p=" << p_ << " k=" << k_ << " s=" << s_ << " counts=[";
    for (size_t r = 0; r < counts_.size(); ++r) os << (r ? "," : "") << counts_[r];
    os << "]";
    return os.str();
}

}  // namespace qcl
