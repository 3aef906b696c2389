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

#ifndef EQUITODA_EQUIVARIANT_HPP
#define EQUITODA_EQUIVARIANT_HPP

#include <map>
#include <memory>
#include <string>

#include "equitoda/model.hpp"
#include "equitoda/todacore.hpp"

namespace equitoda {

struct EquivConfig {
    int eps_order = default_eps_order;
    int depth = 6;
    Window window{-6, 2};
    int z_cap = 2;
    bool z_zero = false;
};

inline json config_json(const EquivConfig& c)
{
    return json{{"epsOrder", c.eps_order},
                {"depth", c.depth},
                {"window", json::array({c.window.lo, c.window.hi})},
                {"zCap", c.z_cap},
                {"zSymbolsZero", c.z_zero}};
}

/// y = q nabla(v - vbar) - tau dq in the free algebra.
inline LocalPoly y_generator(int order)
{
    LocalPoly q = lp_var(gen::q, order);
    LocalPoly dv = lp_var(gen::v, order) - lp_var(gen::vbar, order);
    return q * nabla(order).apply(dv) - lp_tau(order) * d_apply(q);
}

/// z_k = p_{-1}(k) - q p_1(k) - tau P p_0(k) from a free-algebra engine (needs depth >= k + 1).
inline LocalPoly z_in_free_algebra(const TodaEngine& e, int k)
{
    if (k < 1) {
        throw std::invalid_argument("z_in_free_algebra: k must be positive");
    }
    const int N = e.order();
    DiffOp lk = e.power(k);
    return lk.coeff(-1) - lp_var(gen::q, N) * lk.coeff(1) - lp_tau(N) * p_op(N).apply(lk.coeff(0));
}

/// Lax coefficients a_1..a_depth expressed in the reduced model.
class ReducedLax {
public:
    ReducedLax(int order, int depth, bool z_zero, std::map<int, LocalPoly> table)
        : order_(order), depth_(depth), z_zero_(z_zero), table_(std::move(table))
    {
        model_ = std::make_shared<ModelReduction>(order);
        for (const auto& [k, a] : table_) {
            if (k >= 2) {
                model_->set_coefficient(k, a);
            }
        }
    }

    int order() const { return order_; }
    int depth() const { return depth_; }
    bool z_zero() const { return z_zero_; }
    const std::map<int, LocalPoly>& table() const { return table_; }
    const LocalPoly& a(int k) const { return table_.at(k); }
    const ModelReduction& model() const { return *model_; }

    /// L = Lambda + sum a_k Lambda^{1-k}, trusted on [1 - depth, 1].
    DiffOp l() const
    {
        DiffOp out = DiffOp::window_op(1 - depth_, 1, false, true, order_, DMode::reduced);
        out.set(1, lp_scalar(order_, 1));
        for (const auto& [k, a] : table_) {
            out.set(1 - k, a);
        }
        return out;
    }

    /// Conjugate operator with abar_k pushed into the model.
    DiffOp lbar() const
    {
        auto m = model_;
        return op_conjugate(l(), [m](const LocalPoly& p) { return m->eliminate_vbar(p); });
    }

    /// Replaces one coefficient (negative controls).
    ReducedLax with_coefficient(int k, const LocalPoly& a) const
    {
        auto t = table_;
        t.insert_or_assign(k, a);
        return ReducedLax(order_, depth_, z_zero_, std::move(t));
    }

private:
    int order_;
    int depth_;
    bool z_zero_;
    std::map<int, LocalPoly> table_;
    std::shared_ptr<ModelReduction> model_;
};

/// Finite operator Lambda + sum_{k <= n} a_k Lambda^{1-k}, exact on both sides.
inline DiffOp truncated_lax(const std::map<int, LocalPoly>& table, int n, int order)
{
    DiffOp out = DiffOp::window_op(1 - n, 1, true, true, order, DMode::reduced);
    out.set(1, lp_scalar(order, 1));
    for (int k = 1; k <= n; ++k) {
        out.set(1 - k, table.at(k));
    }
    return out;
}

/// Solves a_{n+1} = [n]^{-1}(q p_1(n) + tau P p_0(n) + z_n - R_n), R_n the part of p_{-1}(n) without a_{n+1}.
inline ReducedLax solve_coefficients(int depth, int order, bool z_zero = false)
{
    if (depth < 2) {
        throw ConfigError("solve_coefficients: depth must be at least 2");
    }
    const DMode md = DMode::reduced;
    std::map<int, LocalPoly> table;
    table.emplace(1, lp_var(gen::v, order));
    LocalPoly q = lp_var(gen::q, order), tau = lp_tau(order);
    for (int n = 1; n < depth; ++n) {
        DiffOp ln = truncated_lax(table, n, order);
        DiffOp pw = ln;
        for (int j = 2; j <= n; ++j) {
            pw = DiffOp::mul(pw, ln, Window{-1 - (n - j), j});
        }
        LocalPoly rhs = q * pw.coeff(1) + tau * p_op(order).apply(pw.coeff(0), md) - pw.coeff(-1);
        if (!z_zero) {
            rhs = rhs + lp_var(gen::z(n), order);
        }
        table.emplace(n + 1, bracket_k_inv(n, order).apply(rhs, md));
    }
    return ReducedLax(order, depth, z_zero, std::move(table));
}

/// q + tau P v + z_1.
inline LocalPoly closed_form_a2(int order, bool z_zero = false)
{
    LocalPoly out = lp_var(gen::q, order) + lp_tau(order) * p_op(order).apply(lp_var(gen::v, order), DMode::reduced);
    return z_zero ? out : out + lp_var(gen::z(1), order);
}

/// tau(P(1/4 [2]v^2 + q) - 1/2 v [2]P v) + tau^2 P v - z_1 v + 1/2 z_2.
inline LocalPoly closed_form_a3(int order, bool z_zero = false)
{
    const DMode md = DMode::reduced;
    const ShiftOp& P = p_op(order);
    const ShiftOp& b2 = bracket_k(2, order);
    LocalPoly q = lp_var(gen::q, order), v = lp_var(gen::v, order), tau = lp_tau(order);
    LocalPoly pv = P.apply(v, md);
    LocalPoly inner = Rational(1, 4) * b2.apply(v * v, md) + q;
    LocalPoly out = tau * (P.apply(inner, md) - Rational(1, 2) * v * b2.apply(pv, md)) + tau * tau * pv;
    if (!z_zero) {
        out = out - lp_var(gen::z(1), order) * v + Rational(1, 2) * lp_var(gen::z(2), order);
    }
    return out;
}

/// tau z_1 + tau^2 (P^2 - P) v: solved a_3 minus closed_form_a3.
inline LocalPoly a3_correction(int order, bool z_zero = false)
{
    const DMode md = DMode::reduced;
    const ShiftOp& P = p_op(order);
    LocalPoly tau = lp_tau(order), pv = P.apply(lp_var(gen::v, order), md);
    LocalPoly out = tau * tau * (P.apply(pv, md) - pv);
    return z_zero ? out : out + tau * lp_var(gen::z(1), order);
}

/// Checks the solved a_2, a_3 against the closed forms; `reference = false` adds a3_correction.
inline Report verify_closed_forms(const ReducedLax& rl, bool reference = true)
{
    Report r;
    r.identity = reference ? "equivariant closed forms a2, a3 (reference form)" : "equivariant closed forms a2, a3";
    r.params = json{{"epsOrder", rl.order()}, {"zSymbolsZero", rl.z_zero()}, {"a3ReferenceForm", reference}};
    expect_zero(r, rl.a(2) - closed_form_a2(rl.order(), rl.z_zero()), "a2");
    if (rl.depth() >= 3) {
        LocalPoly want = closed_form_a3(rl.order(), rl.z_zero());
        if (!reference) {
            want += a3_correction(rl.order(), rl.z_zero());
        }
        expect_zero(r, rl.a(3) - want, "a3");
    }
    return r;
}

/// K = Lambda + v + q Lambda^{-1}.
inline DiffOp k_operator(int order, DMode mode = DMode::reduced)
{
    DiffOp k = DiffOp::window_op(-1, 1, true, true, order, mode);
    k.set(1, lp_scalar(order, 1));
    k.set(0, lp_var(gen::v, order));
    k.set(-1, lp_var(gen::q, order));
    return k;
}

/// eps^{-1}[K, A] - tau dA; A one eps-order above the result.
inline DiffOp constraint_residual(const DiffOp& a)
{
    const int N = a.order() - 1;
    DiffOp lhs = eps_div(commutator(k_operator(a.order(), a.mode()), a));
    DiffOp rhs = a.apply_shift(d_op(a.order())).map([&](const LocalPoly& c) { return lp_tau(a.order()) * c; });
    return lhs - rhs.truncated(N);
}

/// Both forms of the constraint for an operator solved at eps-order cfg.eps_order + 1.
inline Report verify_constraint(const ReducedLax& rl, bool barred, Window w)
{
    Report r;
    r.identity = barred ? "equivariant constraint (barred)" : "equivariant constraint";
    r.params = json{{"epsOrder", rl.order() - 1}, {"depth", rl.depth()}, {"window", json::array({w.lo, w.hi})},
                    {"zSymbolsZero", rl.z_zero()}};
    DiffOp res = constraint_residual(barred ? rl.lbar() : rl.l());
    if (barred) {
        res = res.map([&](const LocalPoly& c) { return rl.model()(c); });
    }
    expect_zero_on(r, res, w);
    return r;
}

/// Membership in {A : eps^{-1}[K, A] = tau dA}, A one eps-order above the check.
inline Report psi_member(const DiffOp& a, Window w)
{
    Report r;
    r.identity = "psi membership";
    r.params = json{{"epsOrder", a.order() - 1}, {"window", json::array({w.lo, w.hi})}};
    expect_zero_on(r, constraint_residual(a), w);
    return r;
}

/// f_j(k): coefficient of Lambda^{-j} in eps^{-1}[K, L^k] - tau dL^k over the free algebra.
inline LocalPoly f_coefficient(const TodaEngine& hi, int j, int k)
{
    return constraint_residual(hi.power(k)).coeff(-j);
}

/// delta_n z_k (or its barred form) pushed into the model; also the closed formula
/// sum_j [j](p_j(n) f_j(k)) and each f_j(k).
inline Report verify_delta_z(const TodaEngine& e, const TodaEngine& hi, const ReducedLax& rl, int n, int k,
                             bool barred)
{
    Report r;
    r.identity = std::string(barred ? "deltabar_" : "delta_") + std::to_string(n) + " z_" + std::to_string(k);
    r.params = json{{"n", n}, {"k", k}, {"barred", barred}, {"epsOrder", e.order()}, {"depth", e.depth()}};
    if (k + 1 > e.flow_depth(n)) {
        throw ConfigError("verify_delta_z: depth " + std::to_string(e.depth()) + " too small for n = " +
                          std::to_string(n) + ", k = " + std::to_string(k));
    }
    const int N = e.order();
    const ModelReduction& m = rl.model();
    LocalPoly zk = z_in_free_algebra(e, k);
    LocalPoly zr = m(zk);
    expect_zero(r, zr - (rl.z_zero() ? LocalPoly(N) : lp_var(gen::z(k), N)), "z_k reduces to its symbol");
    auto d = e.flow(n, barred);
    expect_zero(r, m(d.apply(zk)), "flow image");
    if (!barred) {
        LocalAccumulator acc(N);
        for (int j = 1; j <= n; ++j) {
            LocalPoly fj = f_coefficient(hi, j, k).truncated(N);
            expect_zero(r, m(fj), "f_" + std::to_string(j) + "(" + std::to_string(k) + ")");
            acc.add(bracket_k(j, N).apply(e.p(j, n) * fj));
        }
        expect_zero(r, m(acc.result()), "closed formula");
    }
    return r;
}

/// L^{-1} = sum_m (-X)^m Lambda^{-1} with L = Lambda(1 + X); trusted on [lo(L) - 1, -1].
inline DiffOp lax_inverse(const DiffOp& l)
{
    const int order = l.order();
    const DMode md = l.mode();
    const int bottom = l.lo() - 1;
    DiffOp x = DiffOp::mul(DiffOp::lambda(-1, order, md), l - DiffOp::lambda(1, order, md), Window{bottom, -1});
    DiffOp neg = -x;
    DiffOp term = DiffOp::lambda(-1, order, md);
    DiffOp sum = term;
    for (int m = 1; -1 - m >= bottom; ++m) {
        term = DiffOp::mul(neg, term, Window{bottom, -1 - m});
        sum = sum + term;
    }
    return sum.clipped(Window{bottom, -1});
}

/// The derivation e with e(v) = 1 and e(q) = e(u) = e(z_k) = 0 on the model.
inline EvolutionaryDerivation e_derivation(int order)
{
    EvolutionaryDerivation e(DMode::reduced);
    e.set(gen::q, LocalPoly(order));
    e.set(gen::u, LocalPoly(order));
    e.set(gen::v, lp_scalar(order, 1));
    return e;
}

/// (L - tau + sum_{k <= zcap} z_k L^{-k}) e(L) - L on the degrees unaffected by truncation.
inline Report verify_e_identity(const ReducedLax& rl, int z_cap, Window w)
{
    Report r;
    r.identity = "e(L) identity";
    const int N = rl.order();
    auto e = e_derivation(N);
    DiffOp l = rl.l();
    DiffOp el = l.map([&](const LocalPoly& c) { return e.apply(c); });
    DiffOp factor = l - scalar_op(lp_tau(N), DMode::reduced);
    int low = l.lo() - 1;
    if (!rl.z_zero() && z_cap >= 1) {
        DiffOp inv = lax_inverse(l);
        DiffOp pw = inv;
        for (int k = 1; k <= z_cap; ++k) {
            if (k > 1) {
                pw = DiffOp::mul(pw, inv, Window{low, -k});
            }
            factor = factor + pw.map([&](const LocalPoly& c) { return lp_var(gen::z(k), N) * c; });
        }
        w = intersect(w, Window{-z_cap, w.hi});
    }
    DiffOp res = DiffOp::mul(factor, el, w) - l;
    r.params = json{{"epsOrder", N}, {"depth", rl.depth()}, {"zCap", z_cap}, {"zSymbolsZero", rl.z_zero()}};
    expect_zero_on(r, res, w);
    return r;
}

/// Keeps only monomials free of q, u, v jets; throws Localized if a q power survives.
inline LocalPoly tilde_alpha(const LocalPoly& p)
{
    DiffPoly kept = p.numerator().filter([](const Monomial& m) {
        for (const auto& f : m.factors()) {
            if (!gen::is_constant(JetVar::unpack(f.var).generator)) {
                return false;
            }
        }
        return true;
    });
    if (p.q_power() > 0 && !kept.is_zero()) {
        throw Localized("tilde_alpha: q^{-" + std::to_string(p.q_power()) + "} survives");
    }
    return LocalPoly(kept);
}

/// Degeneration: tau = 0 and z = 0 give a_2 = q and a_k = 0 for k >= 3.
inline Report verify_degeneration(int depth, int order)
{
    Report r;
    r.identity = "equivariant degeneration to the Toda chain";
    r.params = json{{"epsOrder", order}, {"depth", depth}};
    ReducedLax rl = solve_coefficients(depth, order, true);
    auto kill_tau = [](const LocalPoly& p) {
        DiffPoly out(p.order());
        for (const auto& [m, c] : p.numerator().terms()) {
            ScalarSeries c0(c.order());
            for (const auto& [e, t, x] : triples(c)) {
                if (t == 0) {
                    c0 = c0 + ScalarSeries::monomial(c.order(), e, 0, x);
                }
            }
            out.add_term(m, c0);
        }
        return LocalPoly(out, p.q_power());
    };
    expect_zero(r, kill_tau(rl.a(2)) - lp_var(gen::q, order), "a2");
    for (int k = 3; k <= depth; ++k) {
        expect_zero(r, kill_tau(rl.a(k)), "a" + std::to_string(k));
    }
    return r;
}

} // namespace equitoda

#endif // EQUITODA_EQUIVARIANT_HPP
