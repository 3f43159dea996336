#include "qcl/audit.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "qcl/counting.hpp"
#include "qcl/delta.hpp"
#include "qcl/densities.hpp"
#include "qcl/expsums.hpp"
#include "qcl/geometry.hpp"
#include "qcl/lattices.hpp"
#include "qcl/padic.hpp"

namespace qcl {

Json cyclo_json(const CycloSum& v) {
    return {{"p", v.p()}, {"k", v.k()}, {"scale", v.scale()}, {"counts", v.counts()}};
}

bool AuditReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Json AuditReport::to_json() const {
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"suite", suite}, {"seed", seed}, {"pass", pass()}, {"checks", cs}};
}

namespace {

using Rng = std::mt19937_64;

struct Tally {
    i64 cases = 0, failures = 0;
    void add(bool ok) {
        ++cases;
        failures += ok ? 0 : 1;
    }
    Json json() const { return {{"cases", cases}, {"failures", failures}}; }
    bool ok() const { return cases > 0 && failures == 0; }
};

class Runner {
public:
    Runner(std::string suite, std::uint64_t seed) : rep_{std::move(suite), seed, {}} {}
    void check(const std::string& name, const std::function<bool(Json&)>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        Json detail = Json::object();
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const Error& e) {
            detail["error"] = {{"kind", static_cast<int>(e.kind())}, {"message", e.what()}};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep_.checks.push_back({name, ok, detail, s});
    }
    AuditReport done() { return std::move(rep_); }

private:
    AuditReport rep_;
};

M2 rand_m2(Rng& rng, i64 m) {
    std::uniform_int_distribution<i64> d(0, m - 1);
    return {d(rng), d(rng), d(rng), d(rng)};
}

// ---------------------------------------------------------------- gauss-laws

AuditReport gauss_laws(std::uint64_t seed) {
    Runner run("gauss-laws", seed);
    Rng rng(seed);
    Tally identity, vanishing, magnitude, bound, shift;
    for (i64 p : {3, 5, 7}) {
        const int N = 8;
        const i64 m = ipow(p, N);
        std::uniform_int_distribution<i64> d(1, m - 1);
        auto unit = [&] {
            i64 u;
            do u = d(rng);
            while (u % p == 0);
            return u;
        };
        for (int va = 0; va <= 3; ++va)
            for (int vt = 0; vt <= 3; ++vt)
                for (int vx = 0; vx <= 3; ++vx)
                    for (int it = 0; it < 20; ++it) {
                        const i64 ua = unit(), ut = unit(), ux = unit();
                        const auto a = PadicScaled::make(p, ua, va, N), t = PadicScaled::make(p, ut, vt, N),
                                   xi = PadicScaled::make(p, ux, vx, N);
                        const CycloSum g = gauss_sum({p, a, t, xi});
                        const double expect = std::pow(static_cast<double>(p), std::min(va - vt, 0) / 2.0);
                        bound.add(static_cast<double>(g.magnitude()) <= expect + 1e-12);
                        if (va >= vt) identity.add(g == CycloSum::rational(p, vx >= vt ? 1 : 0));
                        if (va <= vt && vx < va) vanishing.add(g.is_zero());
                        if (vx >= std::min(va, vt))
                            magnitude.add(std::fabs(static_cast<double>(g.magnitude()) - expect) <= 1e-12 &&
                                          g.abs2().to_rational() == rat_pow(p, std::min(va - vt, 0)));
                        if (va <= vt && vx >= va) {
                            // psi(-xi^2 / (4 a t)) * G(a, t, 0)
                            const i64 u = md(-mulmod(mulmod(ux, ux, m), inv_mod(mulmod(4, mulmod(ua, ut, m), m), m), m), m);
                            const CycloSum phase = psi_value(p, PadicScaled::make(p, u, 2 * vx - va - vt, N));
                            shift.add(g == phase * gauss_sum({p, a, t, PadicScaled::zero()}));
                        }
                    }
    }
    run.check("identity_case", [&](Json& d) { d = identity.json(); return identity.ok(); });
    run.check("vanishing_case", [&](Json& d) { d = vanishing.json(); return vanishing.ok(); });
    run.check("magnitude_bound", [&](Json& d) { d = bound.json(); return bound.ok(); });
    run.check("magnitude_equality", [&](Json& d) { d = magnitude.json(); return magnitude.ok(); });
    run.check("shift_law", [&](Json& d) { d = shift.json(); return shift.ok(); });
    return run.done();
}

// --------------------------------------------------------------- appendix-b

AuditReport appendix_b(std::uint64_t seed) {
    Runner run("appendix-b", seed);
    Rng rng(seed);
    std::vector<PrimeCaseReport> q3;
    std::array<i64, 4> families{0, 0, 0, 0};
    for (int n : {1, 2})
        for (int it = 0; it < 260; ++it) {
            std::vector<M2> g;
            for (int i = 0; i < n; ++i) {
                M2 x = rand_m2(rng, 3);
                // Structural families: generic, u = 0, u = v = 0, v on the line of u.
                if (it % 4 == 1) x[1] = 0;
                if (it % 4 == 2) x[1] = x[3] = 0;
                if (it % 4 == 3) x[3] = md(2 * x[1], 3);
                g.push_back(x);
            }
            ++families[static_cast<size_t>(it % 4)];
            q3.push_back(prime_case_report(3, n, g));
        }
    run.check("identity_residual_zero", [&](Json& d) {
        Tally t;
        for (const auto& r : q3) t.add(r.identity_residual.is_zero());
        d = t.json();
        d["q"] = 3;
        return t.ok() && t.cases >= 200;
    });
    run.check("s3_closed_formula", [&](Json& d) {
        Tally t;
        for (const auto& r : q3) t.add(r.S3 == r.S3_formula);
        d = t.json();
        d["families"] = {{"generic", families[0]}, {"u_zero", families[1]}, {"u_v_zero", families[2]}, {"v_dependent", families[3]}};
        return t.ok() && t.cases >= 500;
    });
    run.check("s2_closed_formula", [&](Json& d) {
        Tally t;
        Json cells = Json::array();
        for (i64 q : {3, 5})
            for (int n : {1, 2}) {
                Tally c;
                const int samples = q == 5 && n == 2 ? 6 : 40;
                for (int it = 0; it < samples; ++it) {
                    std::vector<M2> g;
                    for (int i = 0; i < n; ++i) g.push_back(rand_m2(rng, q));
                    if (it == 0) g.assign(static_cast<size_t>(n), M2{0, 0, 0, 0});
                    const auto r = prime_case_report(q, n, g);
                    c.add(r.S2 == r.S2_formula);
                    t.add(r.S2 == r.S2_formula);
                }
                Json cell = c.json();
                cell["q"] = q;
                cell["n"] = n;
                cells.push_back(cell);
            }
        d = t.json();
        d["cells"] = cells;
        return t.ok();
    });
    return run.done();
}

// ------------------------------------------------------------------- thm81

AuditReport thm81(std::uint64_t seed) {
    Runner run("thm81", seed);
    std::vector<Thm81SweepReport> reps;
    for (i64 p : {3, 5})
        for (int n : {1, 2})
            for (const M2& d : {M2{p, 0, 0, 1}, M2{p * p, 0, 0, 1}, M2{p, 0, 0, p}}) {
                const int k = vp(d[0] * d[3], p);
                const bool exhaustive = !(p == 5 && n == 2 && k == 2);
                const std::vector<i64> ups(static_cast<size_t>(n), 1);
                reps.push_back(thm81_sweep(p, n, d, ups, exhaustive, exhaustive ? 0 : 400, seed));
            }
    auto cells = [&] {
        Json a = Json::array();
        for (const auto& r : reps)
            a.push_back({{"p", r.p},
                         {"n", r.n},
                         {"delta", m2_json(r.delta)},
                         {"mode", r.exhaustive ? "exhaustive" : "sampled"},
                         {"cases", r.cases},
                         {"nonzero", r.nonzero},
                         {"zero_outside_support", r.zero_outside_support},
                         {"support_violations", r.support_violations},
                         {"bound_violations", r.bound_violations},
                         {"tight", r.tight},
                         {"max_ratio_approx", static_cast<double>(r.max_ratio)},
                         {"w_sum", rat_json(r.w_sum)},
                         {"w_bound", r.w_bound}});
        return a;
    };
    run.check("support_and_witness", [&](Json& d) {
        i64 bad = 0, cases = 0;
        for (const auto& r : reps) {
            bad += r.support_violations;
            cases += r.cases;
        }
        d = {{"cases", cases}, {"violations", bad}, {"cells", cells()}};
        return bad == 0;
    });
    run.check("magnitude_bound", [&](Json& d) {
        i64 bad = 0, nonzero = 0;
        for (const auto& r : reps) {
            bad += r.bound_violations;
            nonzero += r.nonzero;
        }
        d = {{"nonzero", nonzero}, {"violations", bad}};
        return bad == 0 && nonzero > 0;
    });
    run.check("w_sum_bound", [&](Json& d) {
        bool ok = true;
        Json extra = Json::array();
        for (const auto& r : reps) ok = ok && r.w_sum <= Rational(r.w_bound);
        const std::vector<std::tuple<i64, int, M2>> etas = {
            {3, 1, {3, 0, 0, 1}}, {3, 1, {1, 1, 1, 4}}, {5, 1, {5, 0, 0, 1}}, {3, 2, {9, 0, 0, 1}}, {3, 2, {1, 2, 4, 17}}, {5, 2, {1, 1, 4, 29}}};
        for (const auto& [p, k, eta] : etas) {
            const Rational s = build_w_table(eta, p, k).sum();
            ok = ok && s <= Rational(k + 1);
            extra.push_back({{"p", p}, {"eta", m2_json(eta)}, {"sum", rat_json(s)}, {"bound", k + 1}});
        }
        d = {{"extra_eta", extra}};
        return ok;
    });
    run.check("dagger_congruence", [&](Json& d) {
        const auto a = congruence_sweep(3, {3, 0, 0, 1}, 1, true, 0, 0);
        const auto b = congruence_sweep(3, {9, 0, 0, 1}, 2, false, 300, seed);
        d = {{"exhaustive_pairs", a.pairs}, {"sampled_pairs", b.pairs}, {"violations", a.violations + b.violations}};
        return a.violations == 0 && b.violations == 0 && a.nonzero > 0;
    });
    return run.done();
}

// --------------------------------------------------------------- densities

AuditReport densities(std::uint64_t) {
    Runner run("densities", 0);
    run.check("split_conv_equals_exhaustion", [&](Json& d) {
        struct C {
            i64 p;
            int m;
            std::vector<i64> u;
        };
        Json cells = Json::array();
        bool ok = true;
        for (const C& c : {C{3, 1, {1}}, C{3, 1, {1, -1}}, C{3, 1, {1, 1}}, C{3, 1, {1, 1, -1}}, C{3, 1, {2, 1, 1}},
                           C{3, 1, {1, 1, 1, 1}}, C{5, 1, {1, 2}}, C{5, 1, {1, -1}}, C{7, 1, {1, -1}}, C{3, 2, {1}},
                           C{3, 2, {1, -1}}}) {
            const int n = static_cast<int>(c.u.size());
            const auto a = split_density(c.p, c.m, n, c.u), b = split_density_exhaustive(c.p, c.m, n, c.u);
            ok = ok && a.count == b.count;
            cells.push_back({{"p", c.p}, {"m", c.m}, {"upsilon", c.u}, {"count", big_json(a.count)}, {"exhaustive", big_json(b.count)}});
        }
        d = {{"cells", cells}};
        return ok;
    });
    run.check("split_tail_bracket", [&](Json& d) {
        const double b = split_tail_bound(3, 5);
        Json rows = Json::array();
        bool ok = true;
        for (int m : {1, 2}) {
            const auto s = split_density(3, m, 5, {1, 1, 1, 1, 1});
            const double v = s.normalized.convert_to<double>();
            ok = ok && s.normalized > 0 && std::fabs(v - 1) <= b;
            rows.push_back({{"m", m}, {"normalized", rat_json(s.normalized)}, {"deviation_approx", std::fabs(v - 1)}});
        }
        d = {{"bound_approx", b}, {"rows", rows}};
        return ok;
    });
    run.check("nonsplit_positive_stabilizing", [&](Json& d) {
        bool ok = true;
        Json cells = Json::array();
        for (const std::vector<i64>& u : {std::vector<i64>{1, 1, 1, 1, 1}, std::vector<i64>{1, 1, 1, -1, -1}}) {
            std::vector<double> v;
            Json rows = Json::array();
            for (int m = 1; m <= 3; ++m) {
                const auto s = nonsplit_density(2, m, 5, u);
                ok = ok && s.normalized > 0;
                v.push_back(s.normalized.convert_to<double>());
                rows.push_back({{"m", m}, {"count", big_json(s.count)}, {"normalized", rat_json(s.normalized)}});
            }
            ok = ok && std::fabs(v[2] - v[1]) < std::fabs(v[1] - v[0]);
            cells.push_back({{"upsilon", u}, {"rows", rows}});
        }
        d = {{"p", 2}, {"n", 5}, {"cells", cells}};
        return ok;
    });
    return run.done();
}

// ---------------------------------------------------------------- lattices

struct Instance {
    i64 H, K, m;
    HurwitzQuat eta, M0;
};

Instance random_instance(Rng& rng, i64 H) {
    std::uniform_int_distribution<i64> c(-50, 50), small(-3, 3);
    while (true) {
        const HurwitzQuat eta = HurwitzQuat::from_basis({c(rng), c(rng), c(rng), c(rng)});
        const i64 N = eta.nrd();
        if (!eta.is_primitive() || N < 2 || N > 10000) continue;
        std::vector<i64> ms, ks;
        for (i64 d = 1; d <= N; ++d)
            if (N % d == 0) ms.push_back(d);
        const i64 m = ms[rng() % ms.size()];
        for (i64 d = 1; d <= m; d += 2)
            if (m % d == 0) ks.push_back(d);
        const i64 K = ks[rng() % ks.size()];
        return {H, K, m, eta, HurwitzQuat::from_basis({small(rng), small(rng), small(rng), small(rng)})};
    }
}

Json instance_json(const Instance& in) {
    return {{"H", in.H}, {"K", in.K}, {"m", in.m}, {"eta", quat_json(in.eta)}, {"M0", quat_json(in.M0)}};
}

AuditReport lattices(std::uint64_t seed) {
    Runner run("lattices", seed);
    Rng rng(seed);
    std::vector<Instance> ins;
    std::vector<Lattice4> lat;
    std::vector<Minima> mins;
    for (int t = 0; t < 100; ++t) {
        // Every other instance has H = 1.
        ins.push_back(random_instance(rng, t % 2 == 0 ? 1 : 1 + static_cast<i64>(rng() % 6)));
        lat.push_back(lattice_basis(ins.back().H, ins.back().K, ins.back().m, ins.back().eta, ins.back().M0));
        mins.push_back(successive_minima(lat.back(), Rational(2 * std::lcm(ins.back().H, ins.back().m))));
    }
    run.check("containment", [&](Json& d) {
        Tally t;
        for (size_t i = 0; i < ins.size(); ++i) {
            const i64 big = std::lcm(ins[i].H, ins[i].m);
            bool ok = true;
            for (int k = 0; k < 4; ++k) {
                Vec4 e{0, 0, 0, 0};
                e[static_cast<size_t>(k)] = big;
                ok = ok && lat[i].contains(HurwitzQuat::from_basis(e));
            }
            for (const auto& b : lat[i].basis()) {
                for (i64 c : b.basis_coords()) ok = ok && c % ins[i].H == 0;
                ok = ok && in_key_lattice(b, ins[i].H, ins[i].K, ins[i].m, ins[i].eta, ins[i].M0);
            }
            t.add(ok);
        }
        d = t.json();
        return t.ok();
    });
    run.check("minkowski_bracket", [&](Json& d) {
        Tally t;
        for (size_t i = 0; i < ins.size(); ++i) {
            Rational prod = 2;
            for (const auto& l : mins[i].lambda) prod *= l;
            t.add(Rational(lat[i].index, 24) <= prod && prod <= Rational(lat[i].index));
        }
        d = t.json();
        return t.ok();
    });
    run.check("lambda2_squared_ge_K_over_4", [&](Json& d) {
        Tally t;
        double worst = 1e300;
        Json witness;
        for (size_t i = 0; i < ins.size(); ++i) {
            if (ins[i].H != 1) continue;
            const Rational l2sq = mins[i].lambda[1] * mins[i].lambda[1];
            t.add(4 * l2sq >= ins[i].K);
            const double r = (l2sq / ins[i].K).convert_to<double>();
            if (r < worst) {
                worst = r;
                witness = instance_json(ins[i]);
                witness["lambda2"] = rat_json(mins[i].lambda[1]);
            }
        }
        // Pinned instance with two unit vectors in the lattice: lambda_2 = 1/2 at K = 3.
        const Instance pin{1, 3, 3, HurwitzQuat(-8, -8, -6, -2), HurwitzQuat::one()};
        const Minima pm = successive_minima(lattice_basis(pin.H, pin.K, pin.m, pin.eta, pin.M0), 8);
        const Rational pl2sq = pm.lambda[1] * pm.lambda[1];
        const bool pinned_ok = 4 * pl2sq >= pin.K;
        Json pinned = instance_json(pin);
        pinned["lambda2"] = rat_json(pm.lambda[1]);
        pinned["lambda2_sq_over_K"] = rat_json(pl2sq / pin.K);
        pinned["pass"] = pinned_ok;
        d = {{"random", t.json()}, {"random_min_ratio_approx", worst}, {"random_worst_instance", witness},
             {"pinned", pinned}, {"holds_with_K_over_12", worst >= 1.0 / 12 - 1e-12 && 12 * pl2sq >= pin.K}};
        return t.ok() && pinned_ok;
    });
    run.check("lambda4_upper", [&](Json& d) {
        Tally t;
        double worst = 0;
        for (size_t i = 0; i < ins.size(); ++i) {
            if (ins[i].H != 1) continue;
            const double r = mins[i].lambda[3].convert_to<double>() / std::sqrt(static_cast<double>(ins[i].K * ins[i].m));
            worst = std::max(worst, r);
            t.add(r <= kLambda4Constant);
        }
        d = t.json();
        d["constant_approx"] = kLambda4Constant;
        d["max_ratio_approx"] = worst;
        return t.ok();
    });
    run.check("point_count_bound", [&](Json& d) {
        Tally t;
        i64 skipped = 0;
        double worst = 0;
        for (size_t i = 0; i < ins.size(); ++i) {
            const double s = std::sqrt(static_cast<double>(ins[i].K)), sm = std::sqrt(static_cast<double>(ins[i].K * ins[i].m));
            for (double R : {1.0, s, sm, 2 * sm}) {
                // Volume estimate 32 R^4 / index; radii beyond the enumeration budget are skipped.
                if (32 * std::pow(R, 4) / static_cast<double>(lat[i].index) > 1e6) {
                    ++skipped;
                    continue;
                }
                const auto pc = lattice_point_count(lat[i], Rational(static_cast<i64>(std::floor(2 * R)), 2), ins[i].H, ins[i].K, ins[i].m);
                t.add(pc.within);
                worst = std::max(worst, pc.ratio);
            }
        }
        d = t.json();
        d["skipped_radii"] = skipped;
        d["constant_approx"] = kPointCountConstant;
        d["max_ratio_approx"] = worst;
        return t.ok();
    });
    run.check("prep_geometry", [&](Json& d) {
        Tally count, small;
        double worst = 0;
        Rng r2(seed + 1);
        for (const auto& in : ins) {
            const auto rep = prepgeom_checks(in.eta, in.K, r2());
            count.add(rep.theta_count_ok && rep.norm_divisible);
            small.add(rep.ok);
            worst = std::max({worst, rep.theta_constant, rep.eta_prime_constant});
        }
        d = {{"theta_count", count.json()}, {"short_vectors", small.json()}, {"constant_approx", kPrepGeomConstant},
             {"max_ratio_approx", worst}};
        return count.ok() && small.ok();
    });
    run.check("rep_numbers", [&](Json& d) {
        Tally t;
        for (i64 m = 1; m <= 500; ++m) {
            const auto r = rep_number(m);
            t.add(r.enumerated == r.formula);
        }
        d = t.json();
        d["m_max"] = 500;
        return t.ok();
    });
    return run.done();
}

// ---------------------------------------------------------------- geometry

AuditReport geometry(std::uint64_t seed) {
    Runner run("geometry", seed);
    std::vector<GeometryAudit> g{geometry_audit(3), geometry_audit(5)};
    auto per_q = [&](const std::function<i64(const GeometryAudit&)>& f) {
        Json a = Json::object();
        i64 total = 0;
        for (const auto& x : g) {
            a[std::to_string(x.q)] = f(x);
            total += f(x);
        }
        return std::pair{a, total};
    };
    run.check("lw_dimension_formula", [&](Json& d) {
        auto [a, t] = per_q([](const GeometryAudit& x) { return x.dim_formula_violations; });
        d = {{"violations", a}};
        return t == 0;
    });
    run.check("lw_symmetry", [&](Json& d) {
        auto [a, t] = per_q([](const GeometryAudit& x) { return x.symmetry_violations; });
        d = {{"violations", a}};
        return t == 0;
    });
    run.check("traceless_W", [&](Json& d) {
        auto [a, t] = per_q([](const GeometryAudit& x) { return x.trace_zero_violations; });
        d = {{"violations", a}};
        return t == 0;
    });
    run.check("pairwise_intersection", [&](Json& d) {
        auto [a, t] = per_q([](const GeometryAudit& x) {
            return x.intersections.intersection_violations + x.intersections.proportionality_violations;
        });
        auto [pairs, np] = per_q([](const GeometryAudit& x) { return x.intersections.pairs; });
        d = {{"violations", a}, {"pairs", pairs}};
        return t == 0 && np > 0;
    });
    run.check("hessian_rank", [&](Json& d) {
        auto [a, t] = per_q([](const GeometryAudit& x) { return x.hessian_violations; });
        Json mins = Json::object();
        for (const auto& x : g) mins[std::to_string(x.q)] = {x.min_hessian_rank[0], x.min_hessian_rank[1]};
        d = {{"violations", a}, {"min_rank_n1_n2", mins}};
        return t == 0;
    });
    run.check("hessian_certificate_rational", [&](Json& d) {
        Rng rng(seed);
        std::uniform_int_distribution<i64> c(-9, 9);
        Tally t;
        while (t.cases < 1000) {
            auto r = [&] { return Rational(c(rng), 1 + static_cast<i64>(rng() % 9)); };
            const Mat2R Z(Ring::rationals(), r(), r(), r(), r());
            if (Z.trd() == 0 || Z.nrd() == 0) continue;
            t.add(hessian_matrices(Z).identity_ok);
        }
        d = t.json();
        return t.ok();
    });
    return run.done();
}

// ------------------------------------------------------------------- delta

AuditReport delta(std::uint64_t seed) {
    Runner run("delta", seed);
    run.check("nonzero_alpha_exact_zero", [&](Json& d) {
        Rng rng(seed);
        Tally t;
        Json levels = Json::array();
        for (i64 Q : {8, 16, 32}) {
            std::uniform_int_distribution<i64> c(-Q * Q / 2, Q * Q / 2);
            i64 done = 0, with_terms = 0, terms = 0;
            while (done < 20) {
                const i64 par = done % 2;
                const HurwitzQuat alpha(2 * c(rng) + par, 2 * c(rng) + par, 2 * c(rng) + par, 2 * c(rng) + par);
                if (alpha.is_zero() || 4 * alpha.nrd() > Q * Q * Q * Q) continue;
                const auto r = delta_sum(alpha, Q);
                t.add(r.difference == 0 && r.certificate_ok);
                with_terms += r.first_terms > 0;
                terms += r.first_terms;
                ++done;
            }
            levels.push_back({{"Q", Q}, {"alphas", done}, {"alphas_with_terms", with_terms}, {"paired_terms", terms}});
        }
        d = t.json();
        d["levels"] = levels;
        return t.ok();
    });
    std::vector<DeltaResult> zero;
    for (i64 Q : {8, 16, 32}) zero.push_back(delta_sum(HurwitzQuat(), Q));
    run.check("zero_alpha_ratio", [&](Json& d) {
        Json rows = Json::array();
        bool improving = true;
        for (size_t i = 0; i < zero.size(); ++i) {
            rows.push_back({{"Q", big_json(numerator(zero[i].Q))},
                            {"difference", rat_json(zero[i].difference)},
                            {"ratio_approx", zero[i].ratio}});
            if (i) improving = improving && std::fabs(zero[i].ratio - 1) < std::fabs(zero[i - 1].ratio - 1);
        }
        d = {{"rows", rows}, {"F2_zero_approx", zero[0].F2_zero}};
        return improving && std::fabs(zero.back().ratio - 1) <= 0.01;
    });
    run.check("poisson_b_term", [&](Json& d) {
        Json rows = Json::array();
        bool ok = true;
        for (size_t i = 0; i < zero.size(); ++i) {
            const double tail = std::fabs(zero[i].b_term - zero[i].F2_zero);
            rows.push_back({{"Q", big_json(numerator(zero[i].Q))}, {"b_term_approx", zero[i].b_term},
                            {"residual_approx", zero[i].poisson_residual}, {"dual_tail_approx", tail}});
            ok = ok && zero[i].poisson_residual <= 1e-9;
            if (i) ok = ok && tail < std::fabs(zero[i - 1].b_term - zero[i - 1].F2_zero) / 4;
        }
        d = {{"rows", rows}};
        return ok;
    });
    run.check("poisson_gaussian", [&](Json& d) {
        Json rows = Json::array();
        bool ok = true;
        for (const Rational& s : {Rational(1, 8), Rational(1, 2), Rational(1), Rational(3), Rational(8)}) {
            const auto r = poisson_check(s);
            ok = ok && r.rel_err < 1e-10;
            rows.push_back({{"scale", rat_json(s)}, {"rel_err_approx", r.rel_err}});
        }
        const auto a = dual_lattice_audit();
        ok = ok && a.dual_is_inverse_of_one_plus_i && a.double_dual_is_order && a.index == 4;
        d = {{"rows", rows}, {"dual_is_inverse_of_one_plus_i", a.dual_is_inverse_of_one_plus_i},
             {"double_dual_is_order", a.double_dual_is_order}, {"index", a.index}};
        return ok;
    });
    return run.done();
}

// ---------------------------------------------------------------- counting

AuditReport counting(std::uint64_t) {
    Runner run("counting", 0);
    auto patterns = [](int n) {
        std::vector<std::vector<i64>> out;
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<i64> u;
            for (int i = 0; i < n; ++i) u.push_back(mask >> i & 1 ? -1 : 1);
            out.push_back(u);
        }
        return out;
    };
    run.check("conv_equals_brute", [&](Json& d) {
        Tally t;
        Json rows = Json::array();
        for (int n : {2, 3})
            for (int X : {1, 2})
                for (const auto& u : patterns(n)) {
                    const BigInt a = conv_count(n, u, X), b = brute_count(n, u, X);
                    t.add(a == b);
                    rows.push_back({{"n", n}, {"X", X}, {"upsilon", u}, {"count", big_json(a)}});
                }
        d = t.json();
        d["rows"] = rows;
        return t.ok();
    });
    run.check("traceless_equals_quadric", [&](Json& d) {
        Tally t;
        for (int n : {2, 3})
            for (int X : {1, 2})
                for (const auto& u : patterns(n)) {
                    const auto r = traceless_count(n, u, X);
                    t.add(r.count == r.quadric_count);
                }
        d = t.json();
        return t.ok();
    });
    return run.done();
}

}  // namespace

const std::vector<std::string>& audit_suites() {
    static const std::vector<std::string> s{"gauss-laws", "appendix-b", "thm81", "densities", "lattices", "geometry", "delta", "counting"};
    return s;
}

AuditReport run_audit(const std::string& suite, std::uint64_t seed) {
    if (suite == "gauss-laws") return gauss_laws(seed);
    if (suite == "appendix-b") return appendix_b(seed);
    if (suite == "thm81") return thm81(seed);
    if (suite == "densities") return densities(seed);
    if (suite == "lattices") return lattices(seed);
    if (suite == "geometry") return geometry(seed);
    if (suite == "delta") return delta(seed);
    if (suite == "counting") return counting(seed);
    throw PreconditionError("unknown audit suite: " + suite);
}

}  // namespace qcl
