#include "qcl/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qcl/audit.hpp"
#include "qcl/counting.hpp"
#include "qcl/delta.hpp"
#include "qcl/densities.hpp"
#include "qcl/errors.hpp"
#include "qcl/expsums.hpp"
#include "qcl/geometry.hpp"
#include "qcl/lattices.hpp"
#include "qcl/padic.hpp"
#include "qcl/parallel.hpp"

namespace qcl::cli {

namespace fs = std::filesystem;

namespace {

enum class T { Int, IntList, Signs, Rat, Choice, Xi };

struct ParamSpec {
    std::string name;
    T type;
    std::optional<std::string> def;  // nullopt: required; "": optional, left empty
    std::vector<std::string> choices = {};
};

const std::map<std::string, std::vector<ParamSpec>>& specs() {
    static const std::map<std::string, std::vector<ParamSpec>> s{
        {"count",
         {{"n", T::Int, "2"},
          {"upsilon", T::Signs, std::nullopt},
          {"X", T::Int, "1"},
          {"engine", T::Choice, "conv", {"conv", "brute", "both"}},
          {"traceless", T::Choice, "0", {"0", "1"}}}},
        {"density",
         {{"kind", T::Choice, "split", {"split", "nonsplit", "box", "series"}},
          {"p", T::Int, "3"},
          {"m", T::Int, "1"},
          {"n", T::Int, "2"},
          {"upsilon", T::Signs, ""},
          {"eps", T::Rat, "1/10"},
          {"samples", T::Int, "100000"},
          {"pmax", T::Int, "7"}}},
        {"gauss",
         {{"p", T::Int, std::nullopt},
          {"va", T::Int, "0"},
          {"vt", T::Int, "0"},
          {"xi", T::Xi, "zero"},
          {"units", T::IntList, "1,1,1"},
          {"N", T::Int, "8"}}},
        {"expsum",
         {{"mode", T::Choice, "i0", {"i0", "prime", "sweep"}},
          {"p", T::Int, "3"},
          {"n", T::Int, "1"},
          {"delta", T::IntList, "3,0,0,1"},
          {"gamma", T::IntList, ""},
          {"upsilon", T::Signs, ""},
          {"exhaustive", T::Choice, "1", {"0", "1"}},
          {"samples", T::Int, "200"}}},
        {"lattice",
         {{"mode", T::Choice, "key", {"key", "prep"}},
          {"H", T::Int, "1"},
          {"K", T::Int, "1"},
          {"m", T::Int, "1"},
          {"eta", T::IntList, std::nullopt},
          {"M0", T::IntList, "2,0,0,0"},
          {"R", T::Rat, ""}}},
        {"repnum", {{"m", T::Int, "0"}, {"mmax", T::Int, "0"}}},
        {"singular",
         {{"mode", T::Choice, "kernel", {"kernel", "audit"}},
          {"W", T::IntList, "1,0,0,-1"},
          {"q", T::Int, "3"},
          {"upsilon", T::Signs, "1"}}},
        {"delta-check",
         {{"mode", T::Choice, "sum", {"sum", "poisson", "dual"}},
          {"alpha", T::IntList, "0,0,0,0"},
          {"Q", T::Rat, "8"},
          {"scale", T::Rat, "1"}}},
        {"audit", {{"suite", T::Choice, std::nullopt, audit_suites()}}},
    };
    return s;
}

// Subcommands whose output depends on the seed; the others drop it from the request.
bool uses_seed(const Request& r) {
    const auto& p = r.params;
    if (r.subcommand == "audit") return true;
    if (r.subcommand == "density") return p.at("kind") == "box";
    if (r.subcommand == "expsum") return p.at("mode") == "sweep";
    if (r.subcommand == "lattice") return p.at("mode") == "prep";
    return false;
}

i64 parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw PreconditionError("--" + key + ": expected an integer, got '" + v + "'");
    }
}

std::vector<i64> parse_list(const std::string& key, const std::string& v) {
    std::vector<i64> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(key, item));
    require(!out.empty(), "--" + key + ": empty list");
    return out;
}

std::string join(const std::vector<i64>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::vector<i64> parse_signs(const std::string& key, const std::string& v) {
    if (!v.empty() && v.find_first_not_of("+-") == std::string::npos) {
        std::vector<i64> out;
        for (char c : v) out.push_back(c == '+' ? 1 : -1);
        return out;
    }
    auto out = parse_list(key, v);
    for (i64 x : out) require(x != 0, "--" + key + ": coefficients must be nonzero");
    return out;
}

Rational parse_rat(const std::string& key, const std::string& v) {
    const auto slash = v.find('/');
    const i64 num = parse_int(key, v.substr(0, slash));
    const i64 den = slash == std::string::npos ? 1 : parse_int(key, v.substr(slash + 1));
    require(den != 0, "--" + key + ": zero denominator");
    return Rational(num, den);
}

std::string rat_str(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

std::string normalize(const ParamSpec& s, const std::string& v) {
    switch (s.type) {
        case T::Int: return std::to_string(parse_int(s.name, v));
        case T::IntList: return join(parse_list(s.name, v));
        case T::Signs: return join(parse_signs(s.name, v));
        case T::Rat: return rat_str(parse_rat(s.name, v));
        case T::Xi: return v == "zero" ? v : std::to_string(parse_int(s.name, v));
        case T::Choice:
            require(std::find(s.choices.begin(), s.choices.end(), v) != s.choices.end(),
                    "--" + s.name + ": unsupported value '" + v + "'");
            return v;
    }
    return v;
}

// Typed views of a canonical request.
struct Params {
    const std::map<std::string, std::string>& p;
    i64 i(const std::string& k) const { return parse_int(k, p.at(k)); }
    int small(const std::string& k) const {
        const i64 v = i(k);
        require(v >= -1000000 && v <= 1000000, "--" + k + " out of range");
        return static_cast<int>(v);
    }
    std::vector<i64> list(const std::string& k) const { return parse_list(k, p.at(k)); }
    Rational rat(const std::string& k) const { return parse_rat(k, p.at(k)); }
    const std::string& s(const std::string& k) const { return p.at(k); }
    bool empty(const std::string& k) const { return p.at(k).empty(); }
};

M2 m2_of(const std::vector<i64>& v, const std::string& key) {
    require(v.size() == 4, "--" + key + ": expected 4 entries");
    return {v[0], v[1], v[2], v[3]};
}

HurwitzQuat quat_of(const std::vector<i64>& v, const std::string& key) {
    require(v.size() == 4, "--" + key + ": expected 4 doubled coordinates");
    require(((v[0] ^ v[1]) & 1) == 0 && ((v[0] ^ v[2]) & 1) == 0 && ((v[0] ^ v[3]) & 1) == 0,
            "--" + key + ": doubled coordinates must share parity");
    return HurwitzQuat(v[0], v[1], v[2], v[3]);
}

Json rat_matrix_json(const Mat2R& A) {
    Json a = Json::array();
    for (const auto& e : A.entries()) a.push_back(rat_json(e));
    return a;
}

Json sample_json(const DensitySample& s) {
    return {{"p", s.p}, {"split", s.split}, {"m", s.m}, {"count", big_json(s.count)}, {"normalized", rat_json(s.normalized)}};
}

struct Computed {
    Json result;
    int exit_code = 0;
    std::string log;
};

void verify(Computed& c, bool ok) {
    if (!ok) c.exit_code = static_cast<int>(ErrorKind::Verification);
}

Computed do_count(const Params& P) {
    Computed c;
    const int n = P.small("n"), X = P.small("X");
    const auto u = P.list("upsilon");
    require(n >= 1 && static_cast<int>(u.size()) == n, "count: upsilon must have n entries");
    require(X >= 0, "count: X must be nonnegative");
    const std::string engine = P.s("engine");
    const bool traceless = P.s("traceless") == "1";
    Json counts = Json::object();
    BigInt conv = 0, brute = 0;
    if (engine != "brute") counts["conv"] = big_json(conv = conv_count(n, u, X, traceless));
    if (engine != "conv") {
        // The independent engine for the traceless count is the 3n-variable quadric.
        brute = traceless ? traceless_count(n, u, X).quadric_count : brute_count(n, u, X);
        counts[traceless ? "quadric" : "brute"] = big_json(brute);
    }
    c.result = {{"n", n}, {"upsilon", u}, {"X", X}, {"engine", engine}, {"traceless", traceless}, {"counts", counts},
                {"count", big_json(engine == "brute" ? brute : conv)}};
    if (engine == "both") {
        c.result["equal"] = conv == brute;
        verify(c, conv == brute);
    }
    return c;
}

Computed do_density(const Params& P, std::uint64_t seed) {
    Computed c;
    const std::string kind = P.s("kind");
    const i64 p = P.i("p");
    const int m = P.small("m"), n = P.small("n");
    const auto u = P.list("upsilon");
    require(n >= 1 && static_cast<int>(u.size()) == n, "density: upsilon must have n entries");
    c.result = {{"kind", kind}, {"n", n}, {"upsilon", u}};
    if (kind == "split" || kind == "nonsplit") {
        require(m >= 1, "density: m must be positive");
        Json rows = Json::array();
        for (int k = 1; k <= m; ++k)
            rows.push_back(sample_json(kind == "split" ? split_density(p, k, n, u) : nonsplit_density(p, k, n, u)));
        c.result["rows"] = rows;
    } else if (kind == "box") {
        const i64 samples = P.i("samples");
        require(samples > 0, "density: samples must be positive");
        const auto b = archimedean_density(n, u, P.rat("eps").convert_to<double>(), static_cast<std::uint64_t>(samples), seed);
        c.result["label"] = "box-density";
        c.result["eps"] = rat_json(P.rat("eps"));
        c.result["estimate_approx"] = b.estimate;
        c.result["estimate_stderr"] = b.stderr_;
        c.result["hits"] = b.hits;
        c.result["samples"] = b.samples;
        c.result["seed"] = b.seed;
    } else {
        const auto r = singular_series(n, u, P.i("pmax"), m);
        Json rows = Json::array();
        for (const auto& row : r.rows) {
            Json j = sample_json(row.sample);
            j["normalized_approx"] = row.approx;
            if (row.has_bracket) j["bracket_approx"] = row.bracket;
            rows.push_back(j);
        }
        c.result["rows"] = rows;
        c.result["m"] = m;
        c.result["pmax"] = r.pmax;
        c.result["partial_product"] = rat_json(r.partial_product);
        c.result["tail_cutoff"] = r.tail_cutoff;
        c.result["tail_lower_approx"] = r.tail_lower;
        c.result["tail_upper_approx"] = r.tail_upper;
        c.result["tail_converges"] = r.tail_converges;
    }
    return c;
}

Computed do_gauss(const Params& P) {
    Computed c;
    const i64 p = P.i("p");
    const int N = P.small("N");
    require(p >= 3 && p % 2 == 1, "gauss: p must be an odd prime");
    require(N >= 1 && ipow(p, N) < (i64{1} << 40), "gauss: precision out of range");
    const auto units = P.list("units");
    require(units.size() == 3, "gauss: --units takes three unit parts (a, t, xi)");
    for (i64 x : units) require(md(x, p) != 0, "gauss: unit parts must be prime to p");
    const auto a = PadicScaled::make(p, md(units[0], ipow(p, N)), P.small("va"), N);
    const auto t = PadicScaled::make(p, md(units[1], ipow(p, N)), P.small("vt"), N);
    const auto xi = P.s("xi") == "zero" ? PadicScaled::zero()
                                        : PadicScaled::make(p, md(units[2], ipow(p, N)), P.small("xi"), N);
    const CycloSum g = gauss_sum({p, a, t, xi});
    c.result = {{"p", p}, {"va", a.val}, {"vt", t.val}, {"xi", P.s("xi")}, {"units", units}, {"N", N},
                {"value", cyclo_json(g)}, {"magnitude_approx", static_cast<double>(g.magnitude())}};
    if (g.is_rational()) c.result["value_rational"] = rat_json(g.to_rational());
    const CycloSum a2 = g.abs2();
    if (a2.is_rational()) c.result["abs2"] = rat_json(a2.to_rational());
    return c;
}

Json sweep_json(const Thm81SweepReport& r) {
    return {{"p", r.p},
            {"n", r.n},
            {"delta", r.delta},
            {"mode", r.exhaustive ? "exhaustive" : "sampled"},
            {"cases", r.cases},
            {"nonzero", r.nonzero},
            {"zero_outside_support", r.zero_outside_support},
            {"support_violations", r.support_violations},
            {"bound_violations", r.bound_violations},
            {"tight", r.tight},
            {"max_ratio_approx", static_cast<double>(r.max_ratio)},
            {"w_sum", rat_json(r.w_sum)},
            {"w_bound", r.w_bound}};
}

Computed do_expsum(const Params& P, std::uint64_t seed) {
    Computed c;
    const std::string mode = P.s("mode");
    const i64 p = P.i("p");
    const int n = P.small("n");
    require(n >= 1, "expsum: n must be positive");
    const M2 delta = m2_of(P.list("delta"), "delta");
    const auto u = P.list("upsilon");
    require(static_cast<int>(u.size()) == n, "expsum: upsilon must have n entries");
    auto gammas = [&] {
        require(!P.empty("gamma"), "expsum: --gamma is required");
        const auto g = P.list("gamma");
        require(static_cast<int>(g.size()) == 4 * n, "expsum: --gamma takes 4n entries");
        std::vector<M2> out;
        for (int i = 0; i < n; ++i) out.push_back({g[4 * i], g[4 * i + 1], g[4 * i + 2], g[4 * i + 3]});
        return out;
    };
    c.result = {{"mode", mode}, {"p", p}, {"n", n}};
    if (mode == "i0") {
        auto z = [](const M2& x) { return Mat2R(Ring::integers(), x[0], x[1], x[2], x[3]); };
        LocalIntegralRequest req{p, n, u, z(delta), {}};
        for (const auto& g : gammas()) req.gamma.push_back(z(g));
        const auto v = thm81_audit(req);
        c.result["delta"] = delta;
        c.result["upsilon"] = u;
        c.result["I0"] = cyclo_json(v.I0);
        if (v.I0.is_rational()) c.result["I0_rational"] = rat_json(v.I0.to_rational());
        c.result["support_ok"] = v.support_ok;
        c.result["has_witness"] = v.has_witness;
        c.result["witness_slot"] = v.witness_slot;
        c.result["W"] = rat_json(v.W);
        c.result["bound_ok"] = v.bound_ok;
        c.result["ratio_approx"] = static_cast<double>(v.ratio_approx);
        verify(c, v.support_ok && v.bound_ok);
    } else if (mode == "prime") {
        const auto r = prime_case_report(p, n, gammas());
        c.result["S2"] = r.S2;
        c.result["S3"] = r.S3;
        c.result["S2_formula"] = r.S2_formula;
        c.result["S3_formula"] = r.S3_formula;
        c.result["I0"] = cyclo_json(r.I0);
        c.result["identity_residual_zero"] = r.identity_residual.is_zero();
        verify(c, r.S2 == r.S2_formula && r.S3 == r.S3_formula && r.identity_residual.is_zero());
    } else {
        const i64 samples = P.i("samples");
        require(samples >= 0 && samples <= 1000000, "expsum: samples out of range");
        const auto r = thm81_sweep(p, n, delta, u, P.s("exhaustive") == "1", static_cast<int>(samples), seed);
        c.result["sweep"] = sweep_json(r);
        verify(c, r.support_violations == 0 && r.bound_violations == 0 && r.w_sum <= Rational(r.w_bound));
    }
    return c;
}

Computed do_lattice(const Params& P, std::uint64_t seed) {
    Computed c;
    const HurwitzQuat eta = quat_of(P.list("eta"), "eta");
    const i64 K = P.i("K");
    if (P.s("mode") == "prep") {
        const auto r = prepgeom_checks(eta, K, seed);
        c.result = {{"mode", "prep"},
                    {"eta", quat_json(eta)},
                    {"K", K},
                    {"norm_divisible", r.norm_divisible},
                    {"theta_solutions", r.theta_solutions},
                    {"theta_count_ok", r.theta_count_ok},
                    {"theta", quat_json(r.theta)},
                    {"theta_constant_approx", r.theta_constant},
                    {"eta_prime", quat_json(r.eta_prime)},
                    {"eta_prime_constant_approx", r.eta_prime_constant},
                    {"ok", r.ok}};
        verify(c, r.theta_count_ok && r.norm_divisible);
        return c;
    }
    const i64 H = P.i("H"), m = P.i("m");
    const HurwitzQuat M0 = quat_of(P.list("M0"), "M0");
    const Lattice4 L = lattice_basis(H, K, m, eta, M0);
    const Minima mn = successive_minima(L, Rational(4 * std::lcm(H, m)));
    Json basis = Json::array(), lam = Json::array(), vecs = Json::array();
    for (const auto& b : L.basis()) basis.push_back(quat_json(b));
    for (int i = 0; i < 4; ++i) {
        lam.push_back(rat_json(mn.lambda[static_cast<size_t>(i)]));
        vecs.push_back(quat_json(mn.vectors[static_cast<size_t>(i)]));
    }
    c.result = {{"mode", "key"}, {"H", H}, {"K", K}, {"m", m}, {"eta", quat_json(eta)}, {"M0", quat_json(M0)},
                {"index", L.index}, {"basis", basis}, {"minima", lam}, {"minima_vectors", vecs}};
    if (!P.empty("R")) {
        const auto pc = lattice_point_count(L, P.rat("R"), H, K, m);
        c.result["point_count"] = {{"R", rat_json(pc.R)}, {"count", pc.count}, {"rhs_approx", pc.rhs},
                                   {"ratio_approx", pc.ratio}, {"within", pc.within}};
    }
    return c;
}

Computed do_repnum(const Params& P) {
    Computed c;
    const i64 m = P.i("m"), mmax = P.i("mmax");
    require((m > 0) != (mmax > 0), "repnum: give exactly one of --m and --mmax");
    require(std::max(m, mmax) <= 5000, "repnum: m above 5000");
    Json rows = Json::array();
    bool ok = true;
    for (i64 k = m > 0 ? m : 1; k <= (m > 0 ? m : mmax); ++k) {
        const auto r = rep_number(k);
        ok = ok && r.enumerated == r.formula;
        rows.push_back({{"m", r.m}, {"enumerated", r.enumerated}, {"formula", r.formula}});
    }
    c.result = {{"rows", rows}, {"all_match", ok}};
    verify(c, ok);
    return c;
}

Computed do_singular(const Params& P) {
    Computed c;
    const i64 q = P.i("q");
    if (P.s("mode") == "audit") {
        const auto g = geometry_audit(q);
        c.result = {{"mode", "audit"},
                    {"q", g.q},
                    {"nonzero_W", g.nonzero_W},
                    {"dim_formula_violations", g.dim_formula_violations},
                    {"symmetry_violations", g.symmetry_violations},
                    {"trace_zero_violations", g.trace_zero_violations},
                    {"min_hessian_rank", g.min_hessian_rank},
                    {"hessian_violations", g.hessian_violations},
                    {"intersection_pairs", g.intersections.pairs},
                    {"intersection_violations", g.intersections.intersection_violations},
                    {"proportionality_violations", g.intersections.proportionality_violations},
                    {"max_intersection_dim", g.intersections.max_intersection_dim},
                    {"ok", g.ok}};
        verify(c, g.ok);
        return c;
    }
    const M2 w = m2_of(P.list("W"), "W");
    const Ring ring = q == 0 ? Ring::rationals() : Ring::field(q);
    const Mat2R W(ring, w[0], w[1], w[2], w[3]);
    const auto sp = lw_kernel(W);
    Json basis = Json::array();
    for (const auto& b : sp.basis) basis.push_back(rat_matrix_json(b));
    const auto u = P.list("upsilon");
    c.result = {{"mode", "kernel"},  {"q", q},     {"W", rat_matrix_json(W)},           {"dim", sp.dim},
                {"dim_formula", lw_dim_formula(W)}, {"basis", basis}, {"upsilon", u},
                {"hessian_rank", hessian_rank(W, u)}};
    return c;
}

Computed do_delta(const Params& P) {
    Computed c;
    const std::string mode = P.s("mode");
    if (mode == "dual") {
        const auto a = dual_lattice_audit();
        c.result = {{"mode", mode}, {"dual_is_inverse_of_one_plus_i", a.dual_is_inverse_of_one_plus_i},
                    {"double_dual_is_order", a.double_dual_is_order}, {"index", a.index}};
        verify(c, a.dual_is_inverse_of_one_plus_i && a.double_dual_is_order && a.index == 4);
    } else if (mode == "poisson") {
        const auto r = poisson_check(P.rat("scale"));
        c.result = {{"mode", mode}, {"scale", rat_json(r.scale)}, {"lhs_approx", r.lhs}, {"rhs_approx", r.rhs},
                    {"rel_err_approx", r.rel_err}};
    } else {
        const HurwitzQuat alpha = quat_of(P.list("alpha"), "alpha");
        const auto r = delta_sum(alpha, P.rat("Q"));
        c.result = {{"mode", mode},
                    {"alpha", quat_json(alpha)},
                    {"Q", rat_json(r.Q)},
                    {"difference", rat_json(r.difference)},
                    {"first_terms", r.first_terms},
                    {"second_terms", r.second_terms},
                    {"certificate_ok", r.certificate_ok}};
        if (alpha.is_zero()) {
            c.result["b_term_approx"] = r.b_term;
            c.result["F2_zero_approx"] = r.F2_zero;
            c.result["ratio_approx"] = r.ratio;
            c.result["poisson_residual_approx"] = r.poisson_residual;
        } else {
            verify(c, r.difference == 0 && r.certificate_ok);
        }
    }
    return c;
}

Computed do_audit(const Params& P, std::uint64_t seed) {
    Computed c;
    const auto rep = run_audit(P.s("suite"), seed);
    c.result = rep.to_json();
    std::ostringstream log;
    for (const auto& ch : rep.checks) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3fs", ch.seconds);
        log << "[" << (ch.pass ? "PASS" : "FAIL") << "] " << rep.suite << "/" << ch.name << " " << buf << "\n";
    }
    c.log = log.str();
    verify(c, rep.pass());
    return c;
}

Computed compute(const Request& r) {
    const Params P{r.params};
    const std::uint64_t seed = r.seed.value_or(1);
    if (r.subcommand == "count") return do_count(P);
    if (r.subcommand == "density") return do_density(P, seed);
    if (r.subcommand == "gauss") return do_gauss(P);
    if (r.subcommand == "expsum") return do_expsum(P, seed);
    if (r.subcommand == "lattice") return do_lattice(P, seed);
    if (r.subcommand == "repnum") return do_repnum(P);
    if (r.subcommand == "singular") return do_singular(P);
    if (r.subcommand == "delta-check") return do_delta(P);
    return do_audit(P, seed);
}

Json request_json(const Request& r) {
    Json j = {{"subcommand", r.subcommand}, {"params", r.params}};
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

std::string md5_hex(const std::string& s) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(s.data(), s.size(), md, &len, EVP_md5(), nullptr) != 1)
        throw VerificationError("md5 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// CSV view of a result: one row per natural record of the subcommand.
std::vector<std::vector<std::string>> csv_rows(const std::string& sub, const Json& out) {
    auto str = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    std::vector<std::vector<std::string>> rows;
    if (!out.contains("result")) {
        rows.push_back({"kind", "message"});
        rows.push_back({str(out["error"]["kind"]), str(out["error"]["message"])});
        return rows;
    }
    const Json& r = out["result"];
    if (sub == "count") {
        rows.push_back({"engine", "count"});
        for (const auto& [k, v] : r["counts"].items()) rows.push_back({k, str(v)});
    } else if (r.contains("rows") && r["rows"].is_array() && !r["rows"].empty()) {
        std::vector<std::string> header;
        for (const auto& [k, v] : r["rows"][0].items()) header.push_back(k);
        rows.push_back(header);
        for (const auto& row : r["rows"]) {
            std::vector<std::string> line;
            for (const auto& k : header) line.push_back(row.contains(k) ? str(row[k]) : "");
            rows.push_back(line);
        }
    } else if (sub == "audit") {
        rows.push_back({"check", "pass"});
        for (const auto& ch : r["checks"]) rows.push_back({str(ch["name"]), ch["pass"].get<bool>() ? "1" : "0"});
    } else {
        rows.push_back({"key", "value"});
        for (const auto& [k, v] : r.items()) rows.push_back({k, str(v)});
    }
    return rows;
}

void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows) {
    std::ofstream f(path);
    require(static_cast<bool>(f), "cannot open CSV output " + path);
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::string v = row[i];
            if (v.find_first_of(",\"\n") != std::string::npos) {
                std::string q = "\"";
                for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                v = q + "\"";
            }
            f << (i ? "," : "") << v;
        }
        f << "\n";
    }
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : specs()) v.push_back(k);
        return v;
    }();
    return s;
}

Request canonicalize(const Request& raw) {
    const auto it = specs().find(raw.subcommand);
    require(it != specs().end(), "unknown subcommand '" + raw.subcommand + "'");
    Request r{raw.subcommand, {}, raw.seed};
    for (const auto& [k, v] : raw.params) {
        const bool known = std::any_of(it->second.begin(), it->second.end(), [&](const ParamSpec& s) { return s.name == k; });
        require(known, raw.subcommand + ": unknown parameter --" + k);
    }
    for (const auto& s : it->second) {
        const auto given = raw.params.find(s.name);
        if (given == raw.params.end()) {
            require(s.def.has_value(), raw.subcommand + ": --" + s.name + " is required");
            r.params[s.name] = s.def->empty() ? "" : normalize(s, *s.def);
        } else {
            r.params[s.name] = normalize(s, given->second);
        }
    }
    // Sign patterns default to all +1 of length n.
    if (r.params.count("upsilon") && r.params["upsilon"].empty() && r.params.count("n")) {
        const i64 n = parse_int("n", r.params["n"]);
        require(n >= 1 && n <= 64, raw.subcommand + ": n out of range");
        r.params["upsilon"] = join(std::vector<i64>(static_cast<size_t>(n), 1));
    }
    if (!uses_seed(r))
        r.seed.reset();
    else if (!r.seed)
        r.seed = 1;
    return r;
}

std::string canonical_string(const Request& canonical) { return request_json(canonical).dump(); }

std::string request_hash(const Request& canonical) {
    return md5_hex(canonical_string(canonical) + "\n" + kVersion);
}

Outcome run(const Request& raw, const Options& opt) {
    Outcome o;
    Request req;
    try {
        req = canonicalize(raw);
    } catch (const Error& e) {
        o.exit_code = e.exit_code();
        o.json = render({{"schema", "v1"}, {"subcommand", raw.subcommand},
                         {"error", {{"kind", e.exit_code()}, {"message", e.what()}}}, {"exit_status", o.exit_code}});
        o.log = std::string("error: ") + e.what() + "\n";
        return o;
    }
    const std::string hash = request_hash(req);
    const fs::path cache_file = fs::path(opt.cache_dir) / (hash + ".json");
    set_thread_budget(std::max(1, opt.threads));

    Json out;
    if (opt.use_cache && fs::exists(cache_file)) {
        std::ifstream f(cache_file, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        o.json = ss.str();
        out = Json::parse(o.json);
        o.exit_code = out.at("exit_status").get<int>();
        o.cache_hit = true;
        o.log = "cache hit " + hash + "\n";
    } else {
        try {
            Computed c = compute(req);
            o.exit_code = c.exit_code;
            o.log = c.log;
            out = {{"schema", "v1"}, {"request", request_json(req)}, {"request_hash", hash},
                   {"result", c.result}, {"exit_status", c.exit_code}};
            o.json = render(out);
            if (opt.use_cache) {
                fs::create_directories(opt.cache_dir);
                const fs::path tmp = cache_file.string() + ".tmp";
                {
                    std::ofstream f(tmp, std::ios::binary);
                    f << o.json;
                }
                fs::rename(tmp, cache_file);
            }
        } catch (const Error& e) {
            o.exit_code = e.exit_code();
            out = {{"schema", "v1"}, {"request", request_json(req)}, {"request_hash", hash},
                   {"error", {{"kind", e.exit_code()}, {"message", e.what()}}}, {"exit_status", o.exit_code}};
            o.json = render(out);
            o.log = std::string("error: ") + e.what() + "\n";
        }
    }
    if (!opt.csv_path.empty()) write_csv(opt.csv_path, csv_rows(req.subcommand, out));
    return o;
}

namespace {

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), "cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact verification toolkit for quaternionic quadratic forms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    bool no_cache = false;
    std::optional<int> threads;
    std::string csv, config, cache_dir;
    app.add_flag("--no-cache", no_cache, "Bypass the result cache");
    app.add_option("--threads", threads, "Worker thread budget")->check(CLI::Range(1, 256));
    app.add_option("--csv", csv, "Also write a CSV view of the result to this path");
    app.add_option("--config", config, "key=value file (cache_dir, threads, no_cache)");
    app.add_option("--cache-dir", cache_dir, "Cache directory (QCL_CACHE_DIR overrides)");

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::optional<std::uint64_t>> seeds;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, spec] : specs()) {
        CLI::App* sub = app.add_subcommand(name);
        subs[name] = sub;
        for (const auto& s : spec) {
            std::string help = s.def ? (s.def->empty() ? "optional" : "default " + *s.def) : "required";
            if (!s.choices.empty()) {
                help += "; one of";
                for (const auto& ch : s.choices) help += " " + ch;
            }
            sub->add_option("--" + s.name, values[name][s.name], help);
        }
        sub->add_option("--seed", seeds[name], "Seed for sampled modes");
    }
    std::string suite_pos;
    subs["audit"]->add_option("suite_name", suite_pos, "Suite name (same as --suite)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Precondition);
    }

    Options opt;
    try {
        if (!config.empty()) {
            const auto kv = read_config(config);
            if (kv.count("cache_dir")) opt.cache_dir = kv.at("cache_dir");
            if (kv.count("threads")) opt.threads = static_cast<int>(parse_int("threads", kv.at("threads")));
            if (kv.count("no_cache")) opt.use_cache = kv.at("no_cache") != "1" && kv.at("no_cache") != "true";
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    }
    if (!cache_dir.empty()) opt.cache_dir = cache_dir;
    if (const char* env = std::getenv("QCL_CACHE_DIR"); env && *env) opt.cache_dir = env;
    if (threads) opt.threads = *threads;
    if (no_cache) opt.use_cache = false;
    opt.csv_path = csv;

    Request req;
    for (const auto& [name, sub] : subs) {
        if (!sub->parsed()) continue;
        req.subcommand = name;
        for (const auto& s : specs().at(name))
            if (sub->count("--" + s.name) > 0) req.params[s.name] = values[name][s.name];
        if (name == "audit" && !suite_pos.empty()) req.params["suite"] = suite_pos;
        req.seed = seeds[name];
    }
    Outcome o;
    try {
        o = run(req, opt);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::Precondition);
    }
    out << o.json;
    err << o.log;
    return o.exit_code;
}

}  // namespace qcl::cli
