/*
   Copyright 2026 The equitoda Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef EQUITODA_SUITES_HPP
#define EQUITODA_SUITES_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "equitoda/dispersionless.hpp"
#include "equitoda/equivariant.hpp"
#include "equitoda/random.hpp"
#include "equitoda/stirling.hpp"
#include "equitoda/todacore.hpp"

namespace equitoda {

struct RunConfig {
    int eps_order = 4;
    int depth = 6;
    Window window{-6, 2};
    int z_order = 5;
    int tau_cap = 6;
    int stirling_n = 8;
    bool z_zero = false;
    std::uint64_t seed = 20260401;
};

inline json config_json(const RunConfig& c)
{
    return json{{"epsOrder", c.eps_order},
                {"coeffDepth", c.depth},
                {"lambdaWindow", json::array({c.window.lo, c.window.hi})},
                {"zOrder", c.z_order},
                {"tauDegreeCap", c.tau_cap},
                {"stirlingN", c.stirling_n},
                {"zSymbolsZero", c.z_zero},
                {"seed", c.seed}};
}

/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
inline RunConfig config_from_json(const json& j, RunConfig base = {})
{
    if (!j.is_object()) {
        throw ConfigError("config file must hold a JSON object");
    }
    auto as_int = [](const json& v, const std::string& key) {
        if (!v.is_number_integer()) {
            throw ConfigError("config key '" + key + "' must be an integer");
        }
        return v.get<long long>();
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "epsOrder") {
            base.eps_order = static_cast<int>(as_int(v, key));
        } else if (key == "coeffDepth" || key == "depth") {
            base.depth = static_cast<int>(as_int(v, key));
        } else if (key == "lambdaWindow" || key == "window") {
            if (!v.is_array() || v.size() != 2) {
                throw ConfigError("config key '" + key + "' must be [lo, hi]");
            }
            base.window = {static_cast<int>(as_int(v[0], key)), static_cast<int>(as_int(v[1], key))};
        } else if (key == "zOrder") {
            base.z_order = static_cast<int>(as_int(v, key));
        } else if (key == "tauDegreeCap" || key == "tauCap") {
            base.tau_cap = static_cast<int>(as_int(v, key));
        } else if (key == "stirlingN") {
            base.stirling_n = static_cast<int>(as_int(v, key));
        } else if (key == "zSymbolsZero" || key == "zZero") {
            if (!v.is_boolean()) {
                throw ConfigError("config key '" + key + "' must be a boolean");
            }
            base.z_zero = v.get<bool>();
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                throw ConfigError("config key 'seed' must be a non-negative integer");
            }
            base.seed = v.get<std::uint64_t>();
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return base;
}

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"chain",      "commute",       "delta-z",    "dispersionless", "e-identity",
                                                "equivariant", "lax",          "pi",         "properties",     "serialization",
                                                "stirling",   "toda-eq",       "zs"};
    return names;
}

inline LaxConfig lax_config(const RunConfig& c) { return LaxConfig{c.eps_order, c.depth, c.window}; }

/// Throws ConfigError when `cfg` cannot support `suite`.
inline void validate_config(const RunConfig& cfg, const std::string& suite)
{
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
        throw ConfigError("unknown suite '" + suite + "'");
    }
    if (cfg.eps_order < 0 || cfg.eps_order > 8) {
        throw ConfigError("epsOrder must lie in [0, 8], got " + std::to_string(cfg.eps_order));
    }
    if (cfg.depth < 2) {
        throw ConfigError("coeffDepth must be at least 2, got " + std::to_string(cfg.depth));
    }
    if (cfg.window.lo > cfg.window.hi) {
        throw ConfigError("lambda window [" + std::to_string(cfg.window.lo) + ", " + std::to_string(cfg.window.hi) +
                          "] is empty");
    }
    if (suite == "lax" || suite == "zs" || suite == "equivariant") {
        validate_lax_window(lax_config(cfg));
    }
    if (suite == "equivariant" && cfg.depth < 3) {
        throw ConfigError("equivariant suite needs coeffDepth >= 3 to reach a_3");
    }
    if (suite == "e-identity" && cfg.window.hi < 1) {
        throw ConfigError("e-identity needs the lambda window to reach degree 1; minimal window is [0, 1]");
    }
    if (suite == "dispersionless" && cfg.tau_cap < 0) {
        throw ConfigError("tauDegreeCap must be non-negative");
    }
    if (suite == "pi" && cfg.z_order < 1) {
        throw ConfigError("zOrder must be at least 1");
    }
    if (suite == "stirling" && cfg.stirling_n < 1) {
        throw ConfigError("stirlingN must be at least 1");
    }
}

struct SuiteResult {
    std::string name;
    std::vector<Report> reports;
    double seconds = 0;

    bool pass() const
    {
        return std::all_of(reports.begin(), reports.end(), [](const Report& r) { return r.pass; });
    }

    json to_json(bool timing = true) const
    {
        json rs = json::array();
        for (const auto& r : reports) {
            rs.push_back(r.to_json());
        }
        json out{{"suite", name}, {"status", pass() ? "pass" : "fail"}, {"reports", rs}};
        if (timing) {
            out["seconds"] = seconds;
        }
        return out;
    }
};

namespace detail {

/// Passes iff `inner` fails.
inline Report expect_rejected(Report inner, const std::string& identity)
{
    Report r;
    r.identity = identity;
    r.params = inner.params;
    if (inner.pass) {
        r.fail(std::nullopt, std::nullopt, "expected a nonzero residual");
    }
    return r;
}

/// Lax/ZS engines need room below the window; three extra coefficients cover n <= 3.
inline int lax_engine_depth(const RunConfig& c) { return std::max(c.depth, 1 - c.window.lo + 3); }

inline void suite_lax(const RunConfig& c, std::vector<Report>& out)
{
    TodaEngine hi(c.eps_order + 1, lax_engine_depth(c));
    for (int n = 1; n <= 3; ++n) {
        for (bool barred : {false, true}) {
            out.push_back(verify_lax(hi, n, barred, lax_config(c)));
        }
    }
}

inline void suite_zs(const RunConfig& c, std::vector<Report>& out)
{
    TodaEngine hi(c.eps_order + 1, lax_engine_depth(c));
    for (auto [m, n] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
        for (int kind : {1, 2}) {
            out.push_back(verify_zs(hi, kind, m, n, lax_config(c)));
        }
    }
}

inline void suite_commute(const RunConfig& c, std::vector<Report>& out)
{
    TodaEngine e(c.eps_order, std::max(c.depth, 6));
    const std::vector<Gen> gens{gen::q, gen::v, gen::vbar, gen::a(2), gen::abar(2)};
    for (int m = 1; m <= 2; ++m) {
        for (int n = 1; n <= 2; ++n) {
            if (m < n) {
                out.push_back(verify_commutativity(e, m, false, n, false, gens));
                out.push_back(verify_commutativity(e, m, true, n, true, gens));
            }
            out.push_back(verify_commutativity(e, m, false, n, true, gens));
        }
    }
}

inline void suite_toda_eq(const RunConfig& c, std::vector<Report>& out)
{
    TodaEngine e(c.eps_order, std::max(c.depth, 3));
    out.push_back(verify_flow_genesis(e));
    out.push_back(verify_toda_equation(e));
}

inline void suite_chain(const RunConfig& c, std::vector<Report>& out)
{
    TodaEngine e(c.eps_order, std::max(c.depth, 6));
    for (int n = 1; n <= 3; ++n) {
        out.push_back(toda_chain_check(e, n));
        out.push_back(verify_alpha_kills_flows(e, n));
        out.push_back(verify_power_conjugation(e, n));
    }
}

inline void suite_equivariant(const RunConfig& c, std::vector<Report>& out)
{
    const int N = c.eps_order, D = c.depth;
    ReducedLax rl = solve_coefficients(D + 1, N + 1, c.z_zero);
    out.push_back(verify_closed_forms(rl, false));
    out.push_back(verify_degeneration(D, N));
    Window u = intersect(c.window, Window{1 - D, 1});
    out.push_back(verify_constraint(rl, false, u));
    out.push_back(verify_constraint(rl, true, Window{-u.hi, -u.lo}));
    out.push_back(psi_member(rl.l(), u));
    out.push_back(detail::expect_rejected(psi_member(DiffOp::lambda(-1, N + 1, DMode::reduced), u),
                                          "psi rejects Lambda^-1"));
    ReducedLax uncorrected = rl.with_coefficient(3, closed_form_a3(N + 1, c.z_zero));
    out.push_back(detail::expect_rejected(verify_constraint(uncorrected, false, u), "constraint rejects the uncorrected a3"));
}

inline void suite_delta_z(const RunConfig& c, std::vector<Report>& out)
{
    const int N = c.eps_order, D = std::max(c.depth, 7);
    TodaEngine e(N, D), hi(N + 1, D);
    ReducedLax rl = solve_coefficients(D, N, c.z_zero);
    for (int n = 1; n <= 3; ++n) {
        for (int k = 1; k <= 3; ++k) {
            for (bool barred : {false, true}) {
                out.push_back(verify_delta_z(e, hi, rl, n, k, barred));
            }
        }
    }
}

inline void suite_e_identity(const RunConfig& c, std::vector<Report>& out)
{
    EquivConfig ec;
    out.push_back(verify_e_identity(solve_coefficients(c.depth, c.eps_order, false), ec.z_cap, c.window));
    out.push_back(verify_e_identity(solve_coefficients(c.depth, c.eps_order, true), ec.z_cap, c.window));
}

inline void suite_dispersionless(const RunConfig& c, std::vector<Report>& out)
{
    DLConfig dc;
    dc.depth = c.depth;
    dc.tau_cap = c.tau_cap;
    dc.z_order = c.z_order;
    out.push_back(verify_l0_constraint(dc, false));
    out.push_back(verify_l0_constraint(dc, true));
    out.push_back(verify_e_iterates(2, c.depth));
    out.push_back(verify_dl_cross_module(c.depth));
    Report kp;
    kp.identity = "{K0, log(K0/Lambda)} = dK0";
    expect_zero_on(kp, poisson(k0(), log_k0_over_lambda(c.depth)) - dl::d(k0()), Window{1 - c.depth, 1});
    out.push_back(kp);
}

inline void suite_pi(const RunConfig& c, std::vector<Report>& out)
{
    out.push_back(verify_pi_recursion(c.z_order));
    out.push_back(verify_epi(c.z_order));
}

inline void suite_stirling(const RunConfig& c, std::vector<Report>& out)
{
    out.push_back(verify_inversion(c.stirling_n));
    Report ex;
    ex.identity = "stirling worked values";
    auto want = [&](bool ok, const std::string& what) {
        if (!ok) {
            ex.fail(std::nullopt, std::nullopt, what);
        }
    };
    want(stirling_first(3, 1) == Rational(2) && stirling_first(3, 2) == Rational(3) && stirling_first(3, 3) == Rational(1),
         "s(3, k)");
    want(sym_e(1, 2) == Rational(3, 2), "e1(1, 1/2)");
    want(sym_h(2, 2) == Rational(7, 4), "h2(1, 1/2)");
    BasisMatrix f = forward_matrix(2);
    want(f[1][1] == TauPoly(Rational(2)) && f[1][0] == TauPoly::monomial(1, 2), "delta_2 row");
    BasisMatrix g = inverse_matrix(2);
    want(g[1][0] == TauPoly::monomial(1, -1) && g[1][1] == TauPoly(Rational(1, 2)), "d_1 row");
    out.push_back(ex);
}

template <class T, class To, class From>
bool round_trips(const T& x, To to, From from)
{
    std::string text = to(x).dump();
    T y = from(parse_json_text(text));
    return y == x && to(y).dump() == text;
}

inline void suite_serialization(const RunConfig& c, std::vector<Report>& out)
{
    Report r;
    r.identity = "serialization round trip";
    rnd::Rng rng(c.seed);
    int counts[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 100; ++i) {
        const int order = rnd::uniform(rng, 0, 4), kind = i % 5;
        bool ok = true;
        switch (kind) {
        case 0:
            ok = round_trips(rnd::poly(rng, order), poly_to_json,
                             [order](const json& j) { return poly_from_json(j, order); });
            break;
        case 1:
            ok = round_trips(rnd::local(rng, order), local_to_json, [](const json& j) { return local_from_json(j); });
            break;
        case 2:
            ok = round_trips(rnd::op(rng, order), op_to_json, [](const json& j) { return op_from_json(j); });
            break;
        case 3:
            ok = round_trips(rnd::shift(rng, order), shift_to_json,
                             [order](const json& j) { return shift_from_json(j, order); });
            break;
        default:
            ok = round_trips(rnd::matrix(rng), matrix_to_json, [](const json& j) { return matrix_from_json(j); });
        }
        ++counts[kind];
        if (!ok) {
            r.fail(std::nullopt, std::nullopt, "value " + std::to_string(i) + " did not round-trip");
        }
    }
    if (!round_trips(build_l(c.eps_order, 4), op_to_json, [](const json& j) { return op_from_json(j); })) {
        r.fail(std::nullopt, std::nullopt, "L at depth 4 did not round-trip");
    }
    r.params = json{{"values", 100},
                    {"seed", c.seed},
                    {"perKind",
                     {{"DiffPoly", counts[0]}, {"LocalPoly", counts[1]}, {"DiffOp", counts[2]}, {"ShiftOp", counts[3]},
                      {"matrix", counts[4]}}}};
    out.push_back(r);
}

/// nabla f P g = 1/2 nabla(f [2] P g) - 1/2 [2](f dg) for independent f, g.
inline Report verify_product_rule(int order)
{
    Report r;
    r.identity = "nabla/P product rule";
    r.params = json{{"epsOrder", order}};
    LocalPoly f = lp_var(gen::aux(0), order), g = lp_var(gen::aux(1), order);
    LocalPoly pg = p_op(order).apply(g);
    LocalPoly lhs = nabla(order).apply(f) * pg;
    LocalPoly rhs = Rational(1, 2) * nabla(order).apply(f * bracket_k(2, order).apply(pg)) -
                    Rational(1, 2) * bracket_k(2, order).apply(f * d_apply(g));
    expect_zero(r, lhs - rhs);
    return r;
}

inline void suite_properties(const RunConfig& c, std::vector<Report>& out)
{
    rnd::Rng rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
    Report anti, assoc, poisson_lim;
    anti.identity = "conjugation is an anti-automorphism";
    assoc.identity = "operator product is associative";
    poisson_lim.identity = "poisson limit of the commutator";
    for (int i = 0; i < 50; ++i) {
        const int order = i % 5;
        DiffOp a = rnd::op(rng, order), b = rnd::op(rng, order);
        if (!(op_conjugate(a * b) == op_conjugate(b) * op_conjugate(a))) {
            anti.fail(std::nullopt, std::nullopt, "bar(AB) != bar(B) bar(A) for sample " + std::to_string(i));
        }
        if (!(op_conjugate(op_conjugate(a)) == a)) {
            anti.fail(std::nullopt, std::nullopt, "bar(bar(A)) != A for sample " + std::to_string(i));
        }
    }
    for (int i = 0; i < 50; ++i) {
        const int order = i % 5;
        DiffOp a = rnd::op(rng, order), b = rnd::op(rng, order), d = rnd::op(rng, order);
        if (!((a * b) * d == a * (b * d))) {
            assoc.fail(std::nullopt, std::nullopt, "(AB)C != A(BC) for sample " + std::to_string(i));
        }
    }
    for (int i = 0; i < 20; ++i) {
        poisson_lim.absorb(verify_poisson_limit(rnd::dl_op(rng), rnd::dl_op(rng)));
    }
    anti.params = json{{"samples", 50}, {"seed", c.seed}};
    assoc.params = json{{"samples", 50}, {"seed", c.seed}};
    poisson_lim.params = json{{"samples", 20}, {"seed", c.seed}};
    out.push_back(anti);
    out.push_back(assoc);
    out.push_back(poisson_lim);
    out.push_back(verify_product_rule(c.eps_order));
}

} // namespace detail

/// Runs one suite; identity failures and algebra errors land in the reports.
inline SuiteResult run_suite(const std::string& name, const RunConfig& cfg)
{
    using Fn = void (*)(const RunConfig&, std::vector<Report>&);
    static const std::map<std::string, Fn> table{
        {"lax", detail::suite_lax},
        {"zs", detail::suite_zs},
        {"commute", detail::suite_commute},
        {"toda-eq", detail::suite_toda_eq},
        {"chain", detail::suite_chain},
        {"equivariant", detail::suite_equivariant},
        {"delta-z", detail::suite_delta_z},
        {"e-identity", detail::suite_e_identity},
        {"dispersionless", detail::suite_dispersionless},
        {"pi", detail::suite_pi},
        {"stirling", detail::suite_stirling},
        {"serialization", detail::suite_serialization},
        {"properties", detail::suite_properties},
    };
    validate_config(cfg, name);
    SuiteResult res;
    res.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
        table.at(name)(cfg, res.reports);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        Report r;
        r.identity = name + " suite";
        r.fail(std::nullopt, std::nullopt, std::string("error: ") + e.what());
        res.reports.push_back(r);
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : res.reports) {
        r.config = config_json(cfg);
    }
    return res;
}

/// Worker count: EQUITODA_THREADS if set, else the hardware concurrency.
inline unsigned thread_cap()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* s = std::getenv("EQUITODA_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v >= 1) {
            return static_cast<unsigned>(v);
        }
    }
    return hw;
}

struct RunResult {
    RunConfig config;
    std::vector<SuiteResult> suites;
    double seconds = 0;

    bool pass() const
    {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass(); });
    }

    json to_json(bool timing = true) const
    {
        json ss = json::array();
        for (const auto& s : suites) {
            ss.push_back(s.to_json(timing));
        }
        json out{{"config", config_json(config)}, {"status", pass() ? "pass" : "fail"}, {"suites", ss}};
        if (timing) {
            out["seconds"] = seconds;
        }
        return out;
    }
};

/// Expands "all", validates every suite up front, then runs them in parallel.
inline RunResult run_suites(std::vector<std::string> names, const RunConfig& cfg)
{
    if (std::find(names.begin(), names.end(), "all") != names.end()) {
        names = suite_names();
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    for (const auto& n : names) {
        validate_config(cfg, n);
    }
    RunResult rr;
    rr.config = cfg;
    rr.suites.resize(names.size());
    auto t0 = std::chrono::steady_clock::now();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < names.size();) {
            rr.suites[i] = run_suite(names[i], cfg);
        }
    };
    const unsigned n_threads = std::min<unsigned>(thread_cap(), static_cast<unsigned>(names.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    rr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rr;
}

} // namespace equitoda

#endif // EQUITODA_SUITES_HPP
