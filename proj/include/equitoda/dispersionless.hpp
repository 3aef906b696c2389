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

#ifndef EQUITODA_DISPERSIONLESS_HPP
#define EQUITODA_DISPERSIONLESS_HPP

#include <map>
#include <string>
#include <vector>

#include "equitoda/equivariant.hpp"
#include "equitoda/stirling.hpp"

namespace equitoda {

// Laurent series in Lambda over the eps = 0 ring are DiffOps at eps-order 0 in the
// reduced mode: the twisted product degenerates to the commutative one.
using DLLaurent = DiffOp;

/// z-degree -> coefficient; exact below, known through `hi`.
struct DLZSeries {
    int hi = 0;
    std::map<int, LocalPoly> c;

    LocalPoly at(int d) const
    {
        if (d > hi) {
            throw WindowUnderflow("z-series coefficient of degree " + std::to_string(d) + " beyond " +
                                  std::to_string(hi));
        }
        auto it = c.find(d);
        return it == c.end() ? LocalPoly(0) : it->second;
    }
    void add(int d, const LocalPoly& p)
    {
        if (d > hi || p.is_zero()) {
            return;
        }
        auto it = c.find(d);
        if (it == c.end()) {
            c.emplace(d, p);
        } else {
            it->second = it->second + p;
            if (it->second.is_zero()) {
                c.erase(it);
            }
        }
    }
};

struct DLConfig {
    int depth = 6;
    int n_terms = -1;
    int tau_cap = 6;
    int z_order = 5;
};

namespace dl {

inline LocalPoly var(Gen g) { return lp_var(g, 0); }
inline LocalPoly scalar(const Rational& r) { return lp_scalar(0, r); }
inline LocalPoly tau_pow(int d, const Rational& c = 1) { return lp_const(ScalarSeries::monomial(0, 0, d, c)); }

inline DLLaurent constant(const LocalPoly& p) { return DiffOp::monomial(0, p, DMode::reduced); }
inline DLLaurent lambda(int k) { return DiffOp::lambda(k, 0, DMode::reduced); }

inline DLLaurent scaled(const DLLaurent& a, const LocalPoly& c)
{
    return a.map([&](const LocalPoly& p) { return c * p; });
}

/// Lambda d/dLambda.
inline DLLaurent degree_op(const DLLaurent& a)
{
    DiffOp out = DiffOp::window_op(a.lo(), a.hi(), a.exact_below(), a.exact_above(), a.order(), a.mode());
    for (const auto& [k, c] : a.coeffs()) {
        if (k != 0) {
            out.set(k, Rational(k) * c);
        }
    }
    return out;
}

inline DLLaurent d(const DLLaurent& a)
{
    return a.map([](const LocalPoly& p) { return d_apply(p, DMode::reduced); });
}

/// X = v Lambda^{-1} + q Lambda^{-2}, so that K_0 / Lambda = 1 + X.
inline DLLaurent x_part()
{
    DiffOp x = DiffOp::window_op(-2, -1, true, true, 0, DMode::reduced);
    x.set(-1, var(gen::v));
    x.set(-2, var(gen::q));
    return x;
}

/// sum_m c_m X^m truncated to degrees >= lo (c_0 included).
inline DLLaurent series_in_x(const std::vector<Rational>& c, int lo)
{
    DiffOp out = DiffOp::window_op(lo, 0, false, true, 0, DMode::reduced);
    DLLaurent x = x_part();
    DLLaurent pw = lambda(0);
    for (std::size_t m = 0; m < c.size() && -static_cast<int>(m) >= lo; ++m) {
        if (m > 0) {
            pw = DiffOp::mul(pw, x, Window{lo, 0});
        }
        out = out + c[m] * pw.clipped(Window{lo, 0});
    }
    return out;
}

/// (K_0 / Lambda)^{-n} through degree lo.
inline DLLaurent k0_over_lambda_pow(int n, int lo)
{
    std::vector<Rational> c;
    Rational b(1);
    for (int m = 0; m <= -lo; ++m) {
        c.push_back(b);
        b = b * Rational(-n - m) / Rational(m + 1);
    }
    return series_in_x(c, lo);
}

/// Lambda -> q / Lambda on a commutative series.
inline DLLaurent flip(const DLLaurent& a)
{
    DiffOp out = DiffOp::window_op(-a.hi(), -a.lo(), a.exact_above(), a.exact_below(), a.order(), a.mode());
    for (const auto& [k, c] : a.coeffs()) {
        LocalPoly f = c;
        for (int i = 0; i < std::abs(k); ++i) {
            f = f * (k > 0 ? var(gen::q) : LocalPoly::q_inverse(0));
        }
        out.set(-k, f);
    }
    return out;
}

inline LocalPoly tau_negate(const LocalPoly& p)
{
    DiffPoly out(p.order());
    for (const auto& [m, c] : p.numerator().terms()) {
        out.add_term(m, scalar_conjugate(c));
    }
    return LocalPoly(out, p.q_power());
}

/// Drops tau-degrees above cap.
inline LocalPoly tau_truncate(const LocalPoly& p, int cap)
{
    DiffPoly out(p.order());
    for (const auto& [m, c] : p.numerator().terms()) {
        ScalarSeries s(c.order());
        for (int e = 0; e <= c.order(); ++e) {
            std::vector<Rational> keep;
            for (int t = 0; t <= std::min(cap, c[e].degree()); ++t) {
                keep.push_back(c[e][t]);
            }
            s[e] = TauPoly(std::move(keep));
        }
        out.add_term(m, s);
    }
    return LocalPoly(out, p.q_power());
}

} // namespace dl

/// K_0 = Lambda + v + q Lambda^{-1}.
inline DLLaurent k0() { return k_operator(0, DMode::reduced); }

/// {A, B} = (Lambda d_Lambda A) dB - dA (Lambda d_Lambda B).
inline DLLaurent poisson(const DLLaurent& a, const DLLaurent& b)
{
    return dl::degree_op(a) * dl::d(b) - dl::d(a) * dl::degree_op(b);
}

/// eps^{-1}[A, B] reduces to {A, B} at eps^0; A, B eps-free, given at eps-order 1 in reduced mode.
inline Report verify_poisson_limit(const DiffOp& a, const DiffOp& b)
{
    Report r;
    r.identity = "poisson limit of the commutator";
    DiffOp lim = eps_div(commutator(a, b)).truncated(0);
    DiffOp pb = poisson(a.truncated(0), b.truncated(0));
    expect_zero_on(r, lim - pb, Window{a.lo() + b.lo(), a.hi() + b.hi()});
    return r;
}

/// log(1 + v Lambda^{-1} + q Lambda^{-2}) through Lambda^{-depth}.
inline DLLaurent log_k0_over_lambda(int depth)
{
    if (depth < 1) {
        throw ConfigError("log_k0_over_lambda: depth must be positive");
    }
    std::vector<Rational> c{Rational(0)};
    for (int m = 1; m <= depth; ++m) {
        c.push_back(Rational(m % 2 ? 1 : -1, m));
    }
    return dl::series_in_x(c, -depth);
}

/// Shared engine for the closed forms: with j = 0 it is L_0, for j > 0 the j-th e-iterate.
/// `with_u` replaces log(K_0/Lambda) by u + log(K_0/Lambda); `literal_sign` uses (-1)^{n-k-j}.
inline DLLaurent dl_closed_form(int j, int depth, int n_terms, bool with_u = false, bool literal_sign = false)
{
    if (depth < 1 || j < 0) {
        throw ConfigError("dl_closed_form: need depth >= 1 and j >= 0");
    }
    // a degree-0 part in the log power bounds term n only by Lambda^{-n}
    const bool flat = with_u || j > 0;
    int lo = 1 - depth;
    if (n_terms < 0) {
        n_terms = std::max(0, depth - 1);
    }
    lo = std::max(lo, -n_terms - (flat ? 0 : 1));
    const Window w{lo, 1};
    DLLaurent lg = log_k0_over_lambda(std::max(1, -lo)).clipped(Window{lo, 0});
    if (with_u) {
        lg = lg + dl::constant(dl::var(gen::u));
    }
    std::vector<DLLaurent> lg_pow{dl::lambda(0)};
    auto lg_power = [&](int p) -> const DLLaurent& {
        while (static_cast<int>(lg_pow.size()) <= p) {
            lg_pow.push_back(DiffOp::mul(lg_pow.back(), lg, Window{lo, 0}));
        }
        return lg_pow[p];
    };
    DiffOp out = DiffOp::window_op(lo, 1, false, true, 0, DMode::reduced);
    if (j == 0) {
        out = out + k0();
    }
    for (int n = std::max(0, j - 1); n <= n_terms; ++n) {
        if (-n < lo) {
            break;
        }
        DiffOp inner = DiffOp::window_op(lo + n, 0, false, true, 0, DMode::reduced);
        for (int k = 0; k <= std::min(n, n - j + 1); ++k) {
            int p = n - k - j + 1;
            int sgn_exp = literal_sign ? n - k - j : n - k;
            Rational c = stirling_first(n, k) / factorial(p);
            if (c.is_zero()) {
                continue;
            }
            if (((sgn_exp % 2) + 2) % 2 == 1) {
                c = -c;
            }
            inner = inner + c * lg_power(p).clipped(Window{lo + n, 0});
        }
        DLLaurent term = DiffOp::mul(inner, dl::k0_over_lambda_pow(n, lo + n), Window{lo + n, 0});
        term = DiffOp::mul(dl::lambda(-n), term, w);
        out = out + dl::scaled(term, dl::tau_pow(n + 1 - j));
    }
    return out.clipped(w);
}

/// The closed form of the Lax operator at eps = 0, z = 0, trusted on [1 - depth, 1].
inline DLLaurent l0(int depth, int n_terms = -1) { return dl_closed_form(0, depth, n_terms); }

/// Conjugate closed form: tau -> -tau and Lambda -> q/Lambda applied to the u-shifted display.
inline DLLaurent lbar0(int depth, int n_terms = -1)
{
    DLLaurent t = dl_closed_form(0, depth, n_terms, true);
    return dl::flip(t.map(dl::tau_negate));
}

/// j-th e-iterate from the closed form.
inline DLLaurent e_iterate(int j, int depth, int n_terms = -1, bool literal_sign = false)
{
    return dl_closed_form(j, depth, n_terms, false, literal_sign);
}

/// j-fold application of e to l0.
inline DLLaurent e_repeated(int j, int depth, int n_terms = -1)
{
    auto e = e_derivation(0);
    DLLaurent a = l0(depth, n_terms);
    for (int i = 0; i < j; ++i) {
        a = a.map([&](const LocalPoly& p) { return e.apply(p); });
    }
    return a;
}

/// {K_0, L_0} = tau dL_0 (or the conjugate) on the trusted window, tau-degrees <= cap.
inline Report verify_l0_constraint(const DLConfig& cfg, bool barred)
{
    Report r;
    r.identity = barred ? "dispersionless constraint (barred)" : "dispersionless constraint";
    r.params = json{{"depth", cfg.depth}, {"nTerms", cfg.n_terms}, {"tauDegreeCap", cfg.tau_cap}};
    DLLaurent l = barred ? lbar0(cfg.depth + 1, cfg.n_terms < 0 ? -1 : cfg.n_terms + 1)
                         : l0(cfg.depth + 1, cfg.n_terms < 0 ? -1 : cfg.n_terms + 1);
    DLLaurent res = poisson(k0(), l) - dl::scaled(dl::d(l), dl::tau_pow(1));
    res = res.map([&](const LocalPoly& p) { return dl::tau_truncate(p, cfg.tau_cap); });
    Window w = barred ? Window{-1, cfg.depth - 1} : Window{1 - cfg.depth, 1};
    expect_zero_on(r, res, w);
    return r;
}

/// Closed-form e-iterates against repeated application, j = 0..jmax.
inline Report verify_e_iterates(int jmax, int depth)
{
    Report r;
    r.identity = "dispersionless e-iterates";
    r.params = json{{"jMax", jmax}, {"depth", depth}};
    for (int j = 0; j <= jmax; ++j) {
        DLLaurent diff = e_iterate(j, depth) - e_repeated(j, depth);
        expect_zero_on(r, diff, Window{1 - depth, 1}, "j=" + std::to_string(j));
    }
    return r;
}

/// Closed forms against the solved equivariant Lax at eps = 0, z = 0.
inline Report verify_dl_cross_module(int depth)
{
    Report r;
    r.identity = "dispersionless closed forms vs solved Lax";
    r.params = json{{"depth", depth}};
    ReducedLax rl = solve_coefficients(depth, 0, true);
    expect_zero_on(r, l0(depth) - rl.l(), Window{1 - depth, 1}, "L0");
    expect_zero_on(r, lbar0(depth) - rl.lbar(), Window{-1, depth - 1}, "Lbar0");
    return r;
}

/// [n]! = (1 + z tau)...(n + z tau) for n >= 0, as z-degree -> tau-polynomial.
inline std::map<int, TauPoly> n_bang(int n)
{
    if (n < 0) {
        throw std::out_of_range("n_bang: use inv_n_bang for negative n");
    }
    std::vector<TauPoly> p{TauPoly(Rational(1))};
    for (int i = 1; i <= n; ++i) {
        std::vector<TauPoly> q(p.size() + 1);
        for (std::size_t d = 0; d < p.size(); ++d) {
            q[d] += p[d] * TauPoly(Rational(i));
            q[d + 1] += p[d] * TauPoly::tau();
        }
        p = std::move(q);
    }
    std::map<int, TauPoly> out;
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (!p[d].is_zero()) {
            out.emplace(static_cast<int>(d), p[d]);
        }
    }
    return out;
}

/// 1/[n]! through z-degree z_order; for n = -m < 0 the polynomial (tau z)(tau z - 1)...(tau z - m + 1).
inline std::map<int, TauPoly> inv_n_bang(int n, int z_order)
{
    std::map<int, TauPoly> out;
    if (n >= 0) {
        auto s = inverse_rising_series(n, std::max(z_order, 0));
        for (int d = 0; d <= z_order; ++d) {
            if (!s[d].is_zero()) {
                out.emplace(d, s[d]);
            }
        }
        return out;
    }
    std::vector<TauPoly> p{TauPoly(Rational(1))};
    for (int i = 0; i < -n; ++i) {
        std::vector<TauPoly> q(p.size() + 1);
        for (std::size_t d = 0; d < p.size(); ++d) {
            q[d] += p[d] * TauPoly(Rational(-i));
            q[d + 1] += p[d] * TauPoly::tau();
        }
        p = std::move(q);
    }
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (!p[d].is_zero()) {
            out.emplace(static_cast<int>(d), p[d]);
        }
    }
    return out;
}

/// pi_k(z) for each k in ks: Lambda^k coefficients of sum_n z^n/[n]! L_0^n, exact through z_order.
inline std::map<int, DLZSeries> pi_series(const std::vector<int>& ks, int z_order)
{
    int kmin = 0;
    for (int k : ks) {
        kmin = std::min(kmin, k);
    }
    const int depth = z_order + 2 - kmin;
    DLLaurent l = l0(depth);
    std::map<int, DLZSeries> out;
    for (int k : ks) {
        out[k].hi = z_order;
    }
    auto accumulate = [&](int n, const DLLaurent& pw) {
        std::map<int, TauPoly> coef = inv_n_bang(n, z_order - n);
        for (int k : ks) {
            if (!pw.known(k)) {
                throw WindowUnderflow("pi_series: power " + std::to_string(n) + " unknown at Lambda^" +
                                      std::to_string(k));
            }
            LocalPoly c = pw.coeff(k);
            if (c.is_zero()) {
                continue;
            }
            for (const auto& [d, t] : coef) {
                out[k].add(n + d, lp_const(ScalarSeries(0, t)) * c);
            }
        }
    };
    DLLaurent pw = dl::lambda(0);
    accumulate(0, pw);
    for (int n = 1; n <= z_order; ++n) {
        pw = DiffOp::mul(pw, l, Window{kmin - (z_order - n), n});
        accumulate(n, pw);
    }
    if (kmin < 0) {
        DLLaurent inv = lax_inverse(l);
        DLLaurent ipw = dl::lambda(0);
        for (int m = 1; m <= -kmin; ++m) {
            ipw = DiffOp::mul(ipw, inv, Window{kmin, -m});
            accumulate(-m, ipw);
        }
    }
    return out;
}

inline DLZSeries pi_k(int k, int z_order) { return pi_series({k}, z_order).at(k); }

/// pi_{-1} = q pi_1 + tau pi_0 through z_order.
inline Report verify_pi_recursion(int z_order)
{
    Report r;
    r.identity = "pi recursion";
    r.params = json{{"zOrder", z_order}};
    auto pis = pi_series({-1, 0, 1}, z_order);
    LocalPoly q = dl::var(gen::q), tau = dl::tau_pow(1);
    for (int d = -1; d <= z_order; ++d) {
        LocalPoly res = pis[-1].at(d) - q * pis[1].at(d) - tau * pis[0].at(d);
        if (!res.is_zero()) {
            r.fail(std::nullopt, res, "z^" + std::to_string(d));
        }
    }
    return r;
}

/// e(pi_k) = z pi_k and d_q pi_k = z pi_{k+1} for k in {-1, 0, 1}.
inline Report verify_epi(int z_order)
{
    Report r;
    r.identity = "pi derivation identities";
    r.params = json{{"zOrder", z_order}};
    auto pis = pi_series({-1, 0, 1, 2}, z_order);
    auto e = e_derivation(0);
    for (int k = -1; k <= 1; ++k) {
        for (int d = -1; d <= z_order; ++d) {
            LocalPoly p = pis[k].at(d);
            LocalPoly lhs1 = e.apply(p) - pis[k].at(d - 1);
            if (!lhs1.is_zero()) {
                r.fail(std::nullopt, lhs1, "e(pi_" + std::to_string(k) + ") at z^" + std::to_string(d));
            }
            LocalPoly lhs2 = partial_q(p) - pis[k + 1].at(d - 1);
            if (!lhs2.is_zero()) {
                r.fail(std::nullopt, lhs2, "d_q pi_" + std::to_string(k) + " at z^" + std::to_string(d));
            }
        }
    }
    return r;
}

} // namespace equitoda

#endif // EQUITODA_DISPERSIONLESS_HPP
