#include "qcl/mat2.hpp"

#include <sstream>

namespace qcl {

std::string Ring::str() const {
    switch (kind) {
        case Z: return "Z";
        case ModPN: return "Z/" + std::to_string(p) + "^" + std::to_string(N);
        case Q: return p ? "Q[1/" + std::to_string(p) + "]" : "Q";
    }
    return "?";
}

Mat2R::Mat2R(Ring ring, const Rational& a, const Rational& b, const Rational& c, const Rational& d)
    : ring_(ring), e_{a, b, c, d} {
    if (ring_.kind == Ring::ModPN) require(ring_.p >= 2 && ring_.N >= 1, "bad residue ring");
    normalize();
}

void Mat2R::normalize() {
    for (auto& x : e_) {
        if (ring_.kind == Ring::Z) {
            require(denominator(x) == 1, "non-integral entry in a Z matrix");
        } else if (ring_.kind == Ring::ModPN) {
            x = Rational(rat_mod(x, ring_.modulus()));
        } else if (ring_.p != 0) {
            BigInt den = denominator(x);
            while (den % ring_.p == 0) den /= ring_.p;
            require(den == 1, "denominator is not a power of " + std::to_string(ring_.p));
        }
    }
}

Rational Mat2R::trd() const {
    Mat2R t(ring_, e_[0] + e_[3], 0, 0, 0);
    return t.e_[0];
}

Rational Mat2R::nrd() const {
    Mat2R t(ring_, e_[0] * e_[3] - e_[1] * e_[2], 0, 0, 0);
    return t.e_[0];
}

Mat2R Mat2R::dagger() const { return {ring_, e_[3], -e_[1], -e_[2], e_[0]}; }

bool Mat2R::is_zero() const {
    for (const auto& x : e_)
        if (x != 0) return false;
    return true;
}

Mat2R Mat2R::to_ring(Ring r) const { return {r, e_[0], e_[1], e_[2], e_[3]}; }

std::array<i64, 4> Mat2R::ints() const {
    require(ring_.kind != Ring::Q, "ints() needs an integral ring");
    std::array<i64, 4> out;
    for (int t = 0; t < 4; ++t) out[t] = static_cast<i64>(numerator(e_[t]));
    return out;
}

namespace {
void check_same(const Mat2R& a, const Mat2R& b) {
    require(a.ring() == b.ring(), "ring mismatch: " + a.ring().str() + " vs " + b.ring().str());
}
}  // namespace

Mat2R operator+(const Mat2R& a, const Mat2R& b) {
    check_same(a, b);
    return {a.ring_, a.e_[0] + b.e_[0], a.e_[1] + b.e_[1], a.e_[2] + b.e_[2], a.e_[3] + b.e_[3]};
}

Mat2R operator-(const Mat2R& a, const Mat2R& b) {
    check_same(a, b);
    return {a.ring_, a.e_[0] - b.e_[0], a.e_[1] - b.e_[1], a.e_[2] - b.e_[2], a.e_[3] - b.e_[3]};
}

Mat2R operator*(const Mat2R& a, const Mat2R& b) {
    check_same(a, b);
    const auto& x = a.e_;
    const auto& y = b.e_;
    return {a.ring_, x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

Mat2R operator*(const Rational& s, const Mat2R& a) {
    return {a.ring_, s * a.e_[0], s * a.e_[1], s * a.e_[2], s * a.e_[3]};
}

bool operator==(const Mat2R& a, const Mat2R& b) { return a.ring_ == b.ring_ && a.e_ == b.e_; }

std::string Mat2R::str() const {
    std::ostringstream os;
    os << "[[" << e_[0] << "," << e_[1] << "],[" << e_[2] << "," << e_[3] << "]] over " << ring_.str();
    return os.str();
}

int m2_val(const M2& x, i64 p, int cap) {
    int v = cap;
    for (i64 e : x)
        if (e != 0) v = std::min(v, vp(e, p));
    return v >= cap ? inf_val : v;
}

}  // namespace qcl
