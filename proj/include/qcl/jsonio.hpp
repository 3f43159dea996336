#pragma once

#include <json.hpp>

#include "qcl/cyclo.hpp"
#include "qcl/hurwitz.hpp"
#include "qcl/mat2.hpp"

namespace qcl {

using Json = nlohmann::json;

// Exact values: big integers as decimal strings, rationals as {num, den}.
inline Json big_json(const BigInt& x) { return x.str(); }
inline Json rat_json(const Rational& x) { return {{"num", numerator(x).str()}, {"den", denominator(x).str()}}; }
inline Json quat_json(const HurwitzQuat& x) {
    const auto& d = x.doubled();
    return {{"doubled", {d[0], d[1], d[2], d[3]}}};
}
inline Json m2_json(const M2& x) { return {x[0], x[1], x[2], x[3]}; }
Json cyclo_json(const CycloSum& v);

}  // namespace qcl
