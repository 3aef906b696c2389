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

#ifndef EQUITODA_TODACORE_HPP
#define EQUITODA_TODACORE_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "equitoda/diffop.hpp"
#include "equitoda/report.hpp"

namespace equitoda {

struct LaxConfig {
    int eps_order = default_eps_order;
    int depth = 6;
    Window window{-6, 2};
};

/// L = Lambda + sum_{k=1}^{depth} a_k Lambda^{1-k}, trusted on [1-depth, 1].
inline DiffOp build_l(int order, int depth)
{
    DiffOp l = DiffOp::window_op(1 - depth, 1, false, true, order);
    l.set(1, lp_scalar(order, 1));
    for (int k = 1; k <= depth; ++k) {
        l.set(1 - k, lp_var(gen::a(k), order));
    }
    return l;
}

struct LaxPair {
    DiffOp l;
    DiffOp lbar;
};

inline LaxPair build_lax(int order, int depth)
{
    DiffOp l = build_l(order, depth);
    return {l, op_conjugate(l)};
}

/// Write-once memo keyed by K; concurrent fills of one key compute the same value.
template <class K, class V>
class OnceMap {
public:
    template <class F>
    V get(const K& key, F make) const
    {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = m_.find(key);
            if (it != m_.end()) {
                return it->second;
            }
        }
        V v = make();
        std::lock_guard<std::mutex> lk(mu_);
        return m_.emplace(key, std::move(v)).first->second;
    }

private:
    mutable std::mutex mu_;
    mutable std::map<K, V> m_;
};

/// The free Toda lattice at a fixed epsilon order and coefficient depth: powers of L
/// and Lbar, B_n, C_n, and the flows on generators.
class TodaEngine {
public:
    TodaEngine(int order, int depth) : order_(order), depth_(depth), lax_(build_lax(order, depth)) {}

    int order() const { return order_; }
    int depth() const { return depth_; }
    const DiffOp& l() const { return lax_.l; }
    const DiffOp& lbar() const { return lax_.lbar; }

    /// L^n, trusted on [n - depth, n].
    DiffOp power(int n) const
    {
        check_n(n);
        return powers_.get(n, [&] { return n == 1 ? lax_.l : power(n - 1) * lax_.l; });
    }
    /// Lbar^n, trusted on [-n, depth - n].
    DiffOp power_bar(int n) const
    {
        check_n(n);
        return powers_bar_.get(n, [&] { return n == 1 ? lax_.lbar : power_bar(n - 1) * lax_.lbar; });
    }
    /// p_k(n), the Lambda^k coefficient of L^n.
    LocalPoly p(int k, int n) const { return power(n).coeff(k); }

    DiffOp b(int n) const { return power(n).plus(); }
    DiffOp c(int n) const { return -power_bar(n).minus(); }

    /// delta_n (barred = false) or its conjugate, on q, a_k (k <= depth - n) and abar_k (k <= depth).
    EvolutionaryDerivation flow(int n, bool barred) const
    {
        check_n(n);
        return flows_.get(std::make_pair(n, barred), [&] { return barred ? make_barred(n) : make_flow(n); });
    }

    /// Largest k with delta_n a_k available.
    int flow_depth(int n) const { return depth_ - n; }

private:
    static void check_n(int n)
    {
        if (n < 1) {
            throw std::invalid_argument("flows are indexed by n >= 1");
        }
    }

    EvolutionaryDerivation make_flow(int n) const
    {
        const int N = order_;
        EvolutionaryDerivation d(DMode::free);
        const ShiftOp& nab = nabla(N);
        LocalPoly q = lp_var(gen::q, N);
        d.set(gen::q, q * nab.apply(p(0, n)));
        for (int k = 1; k <= flow_depth(n); ++k) {
            LocalPoly r = nab.apply(p(-k, n));
            for (int j = 1; j <= k - 1; ++j) {
                LocalPoly pj = p(j - k, n);
                if (pj.is_zero()) {
                    continue;
                }
                LocalPoly aj = lp_var(gen::a(j), N);
                r += shift_exp(1 - j, N).apply(pj) * nabla_bracket(k - j, N).apply(aj);
                r -= shift_exp(j - k, N).apply(aj) * nabla_bracket(j - 1, N).apply(pj);
            }
            d.set(gen::a(k), r);
        }
        for (int k = 1; k <= depth_; ++k) {
            auto w = [&](int m) { return q_bracket(m, N) * (m <= n ? p(m, n) : LocalPoly(N)); };
            LocalPoly r = nab.apply(w(k));
            for (int j = 1; j <= k - 1; ++j) {
                LocalPoly wj = w(k - j);
                if (wj.is_zero()) {
                    continue;
                }
                LocalPoly bj = lp_var(gen::abar(j), N);
                r += shift_exp(1 - j, N).apply(wj) * nabla_bracket(k - j, N).apply(bj);
                r -= shift_exp(j - k, N).apply(bj) * nabla_bracket(j - 1, N).apply(wj);
            }
            d.set(gen::abar(k), r);
        }
        return d;
    }

    EvolutionaryDerivation make_barred(int n) const
    {
        EvolutionaryDerivation f = flow(n, false);
        EvolutionaryDerivation d(DMode::free);
        d.set(gen::q, conjugate_poly(f.image(gen::q)));
        for (const auto& [g, img] : f.images()) {
            if (g != gen::q) {
                d.set(gen::conjugate(g), conjugate_poly(img));
            }
        }
        return d;
    }

    int order_;
    int depth_;
    LaxPair lax_;
    OnceMap<int, DiffOp> powers_, powers_bar_;
    OnceMap<std::pair<int, bool>, EvolutionaryDerivation> flows_;
};

/// Flows read off eps^{-1}[B_n, L] and eps^{-1}[B_n, Lbar] (or C_n for the barred flows).
/// The engine must run one epsilon order above the result.
inline EvolutionaryDerivation flow_direct(const TodaEngine& e, int n, bool barred)
{
    const int N = e.order() - 1;
    DiffOp gen_op = barred ? e.c(n) : e.b(n);
    DiffOp dl = eps_div(commutator(gen_op, e.l()));
    DiffOp dlb = eps_div(commutator(gen_op, e.lbar()));
    EvolutionaryDerivation d(DMode::free);
    d.set(gen::q, dlb.coeff(-1));
    for (int k = 1; k <= e.depth(); ++k) {
        if (dl.known(1 - k)) {
            d.set(gen::a(k), dl.coeff(1 - k));
        }
        if (dlb.known(k - 1)) {
            // abar_k = q^{[k-1]} X with X the Lambda^{k-1} coefficient of Lbar
            LocalPoly dlogq = dlb.coeff(-1) * LocalPoly::q_inverse(N);
            LocalPoly shift_sum(N);
            for (int j = 0; j < k - 1; ++j) {
                shift_sum += shift_exp(k - 2 - 2 * j, N).apply(dlogq);
            }
            d.set(gen::abar(k),
                  q_bracket(k - 1, N) * dlb.coeff(k - 1) + lp_var(gen::abar(k), N) * shift_sum);
        }
    }
    return d;
}


inline json config_json(const LaxConfig& c)
{
    return json{{"epsOrder", c.eps_order}, {"depth", c.depth}, {"window", json::array({c.window.lo, c.window.hi})}};
}

/// The Lax checks need the whole of L inside the working window.
inline void validate_lax_window(const LaxConfig& c)
{
    if (c.window.lo > 1 - c.depth || c.window.hi < 1) {
        throw ConfigError("lambda window [" + std::to_string(c.window.lo) + ", " + std::to_string(c.window.hi) +
                          "] is too small for depth " + std::to_string(c.depth) + "; minimal window is [" +
                          std::to_string(1 - c.depth) + ", 1]");
    }
}

/// Applies a derivation to the coefficients of an operator. Coefficients whose generators
/// have no image end the trusted window on that side.
inline DiffOp apply_derivation(const EvolutionaryDerivation& d, const DiffOp& a)
{
    std::map<int, LocalPoly> done;
    int lo = a.lo(), hi = a.hi();
    bool eb = a.exact_below(), ea = a.exact_above();
    const bool from_top = a.exact_above();
    for (int i = 0; i <= a.hi() - a.lo(); ++i) {
        int k = from_top ? a.hi() - i : a.lo() + i;
        try {
            LocalPoly c = a.coeff(k);
            done.emplace(k, c.is_zero() ? c : d.apply(c));
        } catch (const MissingImage&) {
            if (from_top) {
                lo = k + 1;
                eb = false;
            } else {
                hi = k - 1;
                ea = false;
            }
            break;
        }
    }
    int order = a.order();
    for (const auto& [k, c] : done) {
        order = std::min(order, c.order());
    }
    DiffOp out = DiffOp::window_op(lo, hi, eb, ea, order, a.mode());
    for (const auto& [k, c] : done) {
        if (k >= lo && k <= hi) {
            out.set(k, c);
        }
    }
    return out;
}

/// Flow genesis: delta_1 q = q nabla v, delta_1 vbar = nabla q, deltabar_1 v = nabla q, delta_1 v = nabla a_2.
inline Report verify_flow_genesis(const TodaEngine& e)
{
    const int N = e.order();
    Report r{"flow-genesis"};
    auto d1 = e.flow(1, false), db1 = e.flow(1, true);
    const ShiftOp& nab = nabla(N);
    LocalPoly q = lp_var(gen::q, N), v = lp_var(gen::v, N);
    expect_zero(r, d1.image(gen::q) - q * nab.apply(v), "delta1 q");
    expect_zero(r, d1.image(gen::vbar) - nab.apply(q), "delta1 vbar");
    expect_zero(r, db1.image(gen::v) - nab.apply(q), "deltabar1 v");
    expect_zero(r, d1.image(gen::v) - nab.apply(lp_var(gen::a(2), N)), "delta1 v");
    return r;
}

/// Toda equation in polynomial form.
inline Report verify_toda_equation(const TodaEngine& e)
{
    const int N = e.order();
    Report r{"toda-equation"};
    const ShiftOp& nab = nabla(N);
    LocalPoly q = lp_var(gen::q, N);
    auto d1 = e.flow(1, false), db1 = e.flow(1, true);
    expect_zero(r, nab.apply(d1.image(gen::vbar)) - nab.apply(nab.apply(q)), "nabla(delta1 vbar) - nabla^2 q");
    expect_zero(r, db1.image(gen::q) - q * nab.apply(lp_var(gen::vbar, N)), "deltabar1 q - q nabla vbar");
    // delta_1 deltabar_1 log q = nabla^2 q, as delta_1 of (deltabar_1 q)/q
    LocalPoly lhs = d1.apply(db1.image(gen::q) * LocalPoly::q_inverse(N));
    expect_zero(r, lhs - nab.apply(nab.apply(q)), "delta1 deltabar1 log q - nabla^2 q");
    return r;
}

/// delta_n L = eps^{-1}[B_n, L] and delta_n Lbar = eps^{-1}[B_n, Lbar]; with C_n and the
/// barred flow when barred. The engine runs one epsilon order above cfg.eps_order.
inline Report verify_lax(const TodaEngine& hi, int n, bool barred, const LaxConfig& cfg)
{
    validate_lax_window(cfg);
    Report r{"lax"};
    r.params = json{{"n", n}, {"barred", barred}};
    r.config = config_json(cfg);
    const int N = hi.order() - 1;
    DiffOp g = barred ? hi.c(n) : hi.b(n);
    auto d = hi.flow(n, barred);
    Window w = cfg.window;
    for (int which = 0; which < 2; ++which) {
        const DiffOp& target = which == 0 ? hi.l() : hi.lbar();
        DiffOp lhs = apply_derivation(d, target).truncated(N);
        DiffOp rhs = eps_div(commutator(g, target, Window{w.lo, w.hi}));
        expect_zero_on(r, lhs - rhs, w, which == 0 ? "L" : "Lbar");
    }
    return r;
}

/// Zakharov-Shabat: kind 1 delta_m B_n - delta_n B_m = eps^{-1}[B_m, B_n];
/// kind 2 delta_m C_n - deltabar_n B_m = eps^{-1}[B_m, C_n].
inline Report verify_zs(const TodaEngine& hi, int kind, int m, int n, const LaxConfig& cfg)
{
    Report r{kind == 1 ? "zs1" : "zs2"};
    r.params = json{{"m", m}, {"n", n}};
    r.config = config_json(cfg);
    const int N = hi.order() - 1;
    int need = kind == 1 ? m + n + 1 : std::max(m, n) + 1;
    if (hi.depth() < need) {
        throw ConfigError("zs" + std::to_string(kind) + "(" + std::to_string(m) + "," + std::to_string(n) +
                          ") needs depth >= " + std::to_string(need));
    }
    DiffOp bm = hi.b(m);
    DiffOp other = kind == 1 ? hi.b(n) : hi.c(n);
    DiffOp lhs = apply_derivation(hi.flow(m, false), other) - apply_derivation(hi.flow(n, kind == 2), bm);
    DiffOp rhs = eps_div(commutator(bm, other));
    expect_zero_on(r, lhs.truncated(N) - rhs, cfg.window);
    return r;
}

/// [delta_m, delta_n] (each possibly barred) applied to each generator.
inline Report verify_commutativity(const TodaEngine& e, int m, bool bm, int n, bool bn, const std::vector<Gen>& gens)
{
    Report r{"commute"};
    json names = json::array();
    for (Gen g : gens) {
        names.push_back(gen::name(g));
    }
    r.params = json{{"m", m}, {"mBarred", bm}, {"n", n}, {"nBarred", bn}, {"generators", names}};
    auto dm = e.flow(m, bm), dn = e.flow(n, bn);
    for (Gen g : gens) {
        LocalPoly x = lp_var(g, e.order());
        try {
            expect_zero(r, dm.apply(dn.apply(x)) - dn.apply(dm.apply(x)), gen::name(g));
        } catch (const MissingImage& ex) {
            throw ConfigError(std::string("commutativity on ") + gen::name(g) + " needs a larger depth (" + ex.what() +
                              ")");
        }
    }
    return r;
}

/// Every flow image lies in the ideal generated by derivatives: alpha kills it.
inline Report verify_alpha_kills_flows(const TodaEngine& e, int n)
{
    Report r{"alpha-flows"};
    r.params = json{{"n", n}};
    for (bool b : {false, true}) {
        const EvolutionaryDerivation d = e.flow(n, b);
        for (const auto& [g, img] : d.images()) {
            auto a = alpha_eval(img);
            if (!a.is_zero()) {
                r.fail(std::nullopt, img, (b ? "deltabar " : "delta ") + gen::name(g));
            }
        }
    }
    return r;
}

/// The Toda chain: vbar = v, a_2 = abar_2 = q, higher a_k = abar_k = 0 is preserved by delta_n.
inline Report toda_chain_check(const TodaEngine& e, int n)
{
    if (n < 1) {
        throw std::invalid_argument("flows are indexed by n >= 1");
    }
    const int N = e.order();
    Report r{"toda-chain"};
    Substitution chain(DMode::free, N);
    LocalPoly q = lp_var(gen::q, N);
    chain.set(gen::vbar, lp_var(gen::v, N));
    chain.set(gen::a(2), q);
    chain.set(gen::abar(2), q);
    for (int k = 3; k <= e.depth(); ++k) {
        chain.set(gen::a(k), LocalPoly(N));
        chain.set(gen::abar(k), LocalPoly(N));
    }
    auto d = e.flow(n, false);
    std::vector<std::pair<std::string, LocalPoly>> ideal = {
        {"v - vbar", lp_var(gen::v, N) - lp_var(gen::vbar, N)},
        {"a2 - q", lp_var(gen::a(2), N) - q},
        {"abar2 - q", lp_var(gen::abar(2), N) - q},
    };
    int top = 0;
    for (int k = 3; k <= e.depth(); ++k) {
        if (d.has(gen::a(k)) && d.has(gen::abar(k))) {
            ideal.emplace_back(gen::name(gen::a(k)), lp_var(gen::a(k), N));
            ideal.emplace_back(gen::name(gen::abar(k)), lp_var(gen::abar(k), N));
            top = k;
        }
    }
    r.params = json{{"n", n}, {"highestGenerator", top}};
    for (const auto& [label, x] : ideal) {
        expect_zero(r, chain(d.apply(x)), "delta" + std::to_string(n) + "(" + label + ")");
    }
    return r;
}

/// op_conjugate(L^n) agrees with Lbar^n on the jointly trusted window.
inline Report verify_power_conjugation(const TodaEngine& e, int n)
{
    Report r{"power-conjugation"};
    r.params = json{{"n", n}};
    DiffOp a = op_conjugate(e.power(n)), b = e.power_bar(n);
    Window w{-n, e.depth()};
    expect_zero_on(r, a - b, w);
    return r;
}

} // namespace equitoda

#endif // EQUITODA_TODACORE_HPP
