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

#ifndef EQUITODA_DIFFALG_HPP
#define EQUITODA_DIFFALG_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "equitoda/coeffring.hpp"

namespace equitoda {

// ---------------------------------------------------------------------------
// Generators
//
// Generator ids encode the canonical order
//   q < u < v < vbar < a2 < abar2 < a3 < ... < z1 < zbar1 < ... < aux symbols.
// a_k has id 2k and abar_k has id 2k+1, so v = a_1 and vbar = abar_1.
// ---------------------------------------------------------------------------

using Gen = std::uint32_t;

namespace gen {

inline constexpr Gen q = 0;
inline constexpr Gen u = 1;
inline constexpr Gen z_base = 1u << 20;
inline constexpr Gen aux_base = 1u << 22;

constexpr Gen a(int k) { return 2u * static_cast<Gen>(k); }
constexpr Gen abar(int k) { return 2u * static_cast<Gen>(k) + 1u; }
inline constexpr Gen v = a(1);
inline constexpr Gen vbar = abar(1);
constexpr Gen z(int k) { return z_base + 2u * static_cast<Gen>(k); }
constexpr Gen zbar(int k) { return z_base + 2u * static_cast<Gen>(k) + 1u; }
constexpr Gen aux(int i) { return aux_base + static_cast<Gen>(i); }

enum class Kind { q, u, a, abar, z, zbar, aux };

constexpr Kind kind(Gen g)
{
    if (g == q) {
        return Kind::q;
    }
    if (g == u) {
        return Kind::u;
    }
    if (g >= aux_base) {
        return Kind::aux;
    }
    if (g >= z_base) {
        return ((g - z_base) % 2 == 0) ? Kind::z : Kind::zbar;
    }
    return (g % 2 == 0) ? Kind::a : Kind::abar;
}

/// k for a_k, abar_k, z_k, zbar_k; i for aux symbols; 0 otherwise.
constexpr int index(Gen g)
{
    switch (kind(g)) {
    case Kind::a:
    case Kind::abar:
        return static_cast<int>(g / 2);
    case Kind::z:
    case Kind::zbar:
        return static_cast<int>((g - z_base) / 2);
    case Kind::aux:
        return static_cast<int>(g - aux_base);
    default:
        return 0;
    }
}

/// z_k and zbar_k are annihilated by the derivation.
constexpr bool is_constant(Gen g)
{
    Kind k = kind(g);
    return k == Kind::z || k == Kind::zbar;
}

/// Involution on generators: a_k <-> abar_k, z_k <-> zbar_k; q, u and aux symbols are real.
constexpr Gen conjugate(Gen g)
{
    switch (kind(g)) {
    case Kind::a:
    case Kind::z:
        return g + 1;
    case Kind::abar:
    case Kind::zbar:
        return g - 1;
    default:
        return g;
    }
}

inline const char* const aux_names[] = {"f", "g", "h", "w"};

inline std::string name(Gen g)
{
    int k = index(g);
    switch (kind(g)) {
    case Kind::q:
        return "q";
    case Kind::u:
        return "u";
    case Kind::a:
        return k == 1 ? "v" : "a" + std::to_string(k);
    case Kind::abar:
        return k == 1 ? "vbar" : "abar" + std::to_string(k);
    case Kind::z:
        return "z" + std::to_string(k);
    case Kind::zbar:
        return "zbar" + std::to_string(k);
    case Kind::aux:
        return k < 4 ? aux_names[k] : "x" + std::to_string(k);
    }
    return "?";
}

inline bool parse(std::string_view s, Gen& out)
{
    auto num = [](std::string_view t, int& k) {
        if (t.empty() || t.size() > 6) {
            return false;
        }
        k = 0;
        for (char c : t) {
            if (c < '0' || c > '9') {
                return false;
            }
            k = k * 10 + (c - '0');
        }
        return k >= 1;
    };
    int k = 0;
    if (s == "q") { out = q; return true; }
    if (s == "u") { out = u; return true; }
    if (s == "v") { out = v; return true; }
    if (s == "vbar") { out = vbar; return true; }
    for (int i = 0; i < 4; ++i) {
        if (s == aux_names[i]) { out = aux(i); return true; }
    }
    if (s.starts_with("abar") && num(s.substr(4), k) && k >= 2) { out = abar(k); return true; }
    if (s.starts_with("zbar") && num(s.substr(4), k)) { out = zbar(k); return true; }
    if (s.starts_with("a") && num(s.substr(1), k) && k >= 2) { out = a(k); return true; }
    if (s.starts_with("z") && num(s.substr(1), k)) { out = z(k); return true; }
    if (s.starts_with("x") && num(s.substr(1), k) && k >= 4) { out = aux(k); return true; }
    return false;
}

} // namespace gen

/// A jet variable d^n x, packed as (generator << 8) | n so that packed order is
/// (generator, derivOrder) order.
struct JetVar {
    Gen generator;
    int deriv;

    static constexpr int max_deriv = 255;
    std::uint32_t packed() const { return (generator << 8) | static_cast<std::uint32_t>(deriv); }
    static JetVar unpack(std::uint32_t p) { return {p >> 8, static_cast<int>(p & 0xffu)}; }
};

inline std::uint32_t jet(Gen g, int n = 0)
{
    if (n < 0 || n > JetVar::max_deriv) {
        throw std::out_of_range("jet: derivative order out of range");
    }
    if (gen::is_constant(g) && n > 0) {
        throw std::invalid_argument("jet: constants have no derivatives");
    }
    return JetVar{g, n}.packed();
}

struct Factor {
    std::uint32_t var;
    std::uint32_t pow;
    friend bool operator==(const Factor&, const Factor&) = default;
};

/// Commutative monomial: factors sorted by packed jet variable, positive powers.
class Monomial {
public:
    using Storage = boost::container::small_vector<Factor, 4>;

    Monomial() = default;
    explicit Monomial(std::uint32_t var, std::uint32_t pow = 1)
    {
        if (pow > 0) {
            f_.push_back({var, pow});
        }
    }

    const Storage& factors() const { return f_; }
    bool empty() const { return f_.empty(); }
    std::uint32_t degree() const
    {
        std::uint32_t d = 0;
        for (const auto& f : f_) {
            d += f.pow;
        }
        return d;
    }
    std::uint32_t power_of(std::uint32_t var) const
    {
        for (const auto& f : f_) {
            if (f.var == var) {
                return f.pow;
            }
        }
        return 0;
    }

    /// Multiplies in var^pow (pow may be negative as long as the result stays >= 0).
    void mul(std::uint32_t var, int pow)
    {
        auto it = std::lower_bound(f_.begin(), f_.end(), var,
                                   [](const Factor& f, std::uint32_t v) { return f.var < v; });
        if (it != f_.end() && it->var == var) {
            int np = static_cast<int>(it->pow) + pow;
            if (np < 0) {
                throw std::logic_error("Monomial: negative power");
            }
            if (np == 0) {
                f_.erase(it);
            } else {
                it->pow = static_cast<std::uint32_t>(np);
            }
        } else if (pow > 0) {
            f_.insert(it, Factor{var, static_cast<std::uint32_t>(pow)});
        } else if (pow < 0) {
            throw std::logic_error("Monomial: negative power");
        }
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b)
    {
        Monomial out;
        out.f_.reserve(a.f_.size() + b.f_.size());
        auto i = a.f_.begin(), j = b.f_.begin();
        while (i != a.f_.end() && j != b.f_.end()) {
            if (i->var < j->var) {
                out.f_.push_back(*i++);
            } else if (j->var < i->var) {
                out.f_.push_back(*j++);
            } else {
                out.f_.push_back({i->var, i->pow + j->pow});
                ++i;
                ++j;
            }
        }
        out.f_.insert(out.f_.end(), i, a.f_.end());
        out.f_.insert(out.f_.end(), j, b.f_.end());
        return out;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }

    /// Canonical order: total degree, then lexicographic on (var, pow) sequence.
    friend bool operator<(const Monomial& a, const Monomial& b)
    {
        auto da = a.degree(), db = b.degree();
        if (da != db) {
            return da < db;
        }
        std::size_t n = std::min(a.f_.size(), b.f_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.f_[i].var != b.f_[i].var) {
                return a.f_[i].var < b.f_[i].var;
            }
            if (a.f_[i].pow != b.f_[i].pow) {
                return a.f_[i].pow < b.f_[i].pow;
            }
        }
        return a.f_.size() < b.f_.size();
    }

    Storage& mutable_factors() { return f_; }

private:
    Storage f_;
};

/// How the derivation acts on q. In the reduced model dq = q du is rewritten eagerly,
/// so q never carries derivative jets there.
enum class DMode { free, reduced };

// ---------------------------------------------------------------------------
// DiffPoly
// ---------------------------------------------------------------------------

/// Differential polynomial with ScalarSeries coefficients, truncated at a common eps order.
class DiffPoly {
public:
    using Terms = std::map<Monomial, ScalarSeries>;

    explicit DiffPoly(int order = default_eps_order) : order_(order) {}

    static DiffPoly constant(const ScalarSeries& s)
    {
        DiffPoly p(s.order());
        p.add_term(Monomial{}, s);
        return p;
    }
    static DiffPoly scalar(int order, const Rational& r) { return constant(ScalarSeries::constant(order, r)); }
    static DiffPoly one(int order) { return scalar(order, 1); }
    static DiffPoly tau(int order) { return constant(ScalarSeries::tau(order)); }
    static DiffPoly var(Gen g, int n, int order)
    {
        DiffPoly p(order);
        p.add_term(Monomial(jet(g, n)), ScalarSeries::one(order));
        return p;
    }
    static DiffPoly var(Gen g, int order) { return var(g, 0, order); }

    int order() const { return order_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Adds c * m, truncating c to this order.
    void add_term(const Monomial& m, const ScalarSeries& c)
    {
        if (c.order() < order_) {
            *this = truncated(c.order());
        }
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            ScalarSeries t = c.truncated(order_);
            if (!t.is_zero()) {
                terms_.emplace(m, std::move(t));
            }
            return;
        }
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }

    /// Coefficient of a monomial (zero series if absent).
    ScalarSeries coeff(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? ScalarSeries(order_) : it->second;
    }
    ScalarSeries constant_term() const { return coeff(Monomial{}); }

    DiffPoly truncated(int order) const
    {
        if (order >= order_) {
            return *this;
        }
        DiffPoly out(order);
        for (const auto& [m, c] : terms_) {
            ScalarSeries t = c.truncated(order);
            if (!t.is_zero()) {
                out.terms_.emplace_hint(out.terms_.end(), m, std::move(t));
            }
        }
        return out;
    }

    DiffPoly& operator+=(const DiffPoly& o)
    {
        if (o.order_ < order_) {
            *this = truncated(o.order_);
        }
        for (const auto& [m, c] : o.terms_) {
            add_term(m, c);
        }
        return *this;
    }
    DiffPoly& operator-=(const DiffPoly& o)
    {
        if (o.order_ < order_) {
            *this = truncated(o.order_);
        }
        for (const auto& [m, c] : o.terms_) {
            add_term(m, -c);
        }
        return *this;
    }
    DiffPoly& operator*=(const Rational& r)
    {
        if (r.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) {
            c *= r;
        }
        return *this;
    }
    DiffPoly& operator*=(const ScalarSeries& s)
    {
        *this = *this * DiffPoly::constant(s);
        return *this;
    }

    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator-(DiffPoly a)
    {
        for (auto& [m, c] : a.terms_) {
            c = -c;
        }
        return a;
    }
    friend DiffPoly operator*(DiffPoly a, const Rational& r) { return a *= r; }
    friend DiffPoly operator*(const Rational& r, DiffPoly a) { return a *= r; }

    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b)
    {
        const int n = std::min(a.order_, b.order_);
        DiffPoly out(n);
        if (a.is_zero() || b.is_zero()) {
            return out;
        }
        std::vector<int> vb;
        vb.reserve(b.terms_.size());
        for (const auto& [m, c] : b.terms_) {
            vb.push_back(c.valuation());
        }
        for (const auto& [ma, ca] : a.terms_) {
            int va = ca.valuation();
            if (va > n) {
                continue;
            }
            std::size_t idx = 0;
            for (const auto& [mb, cb] : b.terms_) {
                if (va + vb[idx++] > n) {
                    continue;
                }
                Monomial m = ma * mb;
                auto it = out.terms_.find(m);
                if (it == out.terms_.end()) {
                    it = out.terms_.emplace(std::move(m), ScalarSeries(n)).first;
                }
                it->second.fma(ca, cb);
            }
        }
        out.prune();
        return out;
    }

    /// Multiplies by c * m.
    /// With result_order >= 0 the caller vouches that the product is exact to that order
    /// (used when the operands were truncated against each other's valuations).
    DiffPoly mul_term(const Monomial& m, const ScalarSeries& c, int result_order = -1) const
    {
        const int n = result_order >= 0 ? result_order : std::min(order_, c.order());
        DiffPoly out(n);
        for (const auto& [mm, cc] : terms_) {
            ScalarSeries s(n);
            s.fma(cc, c);
            if (!s.is_zero()) {
                out.terms_.emplace(mm * m, std::move(s));
            }
        }
        return out;
    }

    /// Multiplies by q^e (e may be negative when every term has enough q).
    DiffPoly mul_q_power(int e) const
    {
        if (e == 0) {
            return *this;
        }
        DiffPoly out(order_);
        for (const auto& [m, c] : terms_) {
            Monomial mm = m;
            mm.mul(jet(gen::q), e);
            out.terms_.emplace(std::move(mm), c);
        }
        return out;
    }

    /// Smallest power of q (underived) over all terms; 0 for the zero polynomial.
    int min_q_power() const
    {
        if (terms_.empty()) {
            return 0;
        }
        std::uint32_t mn = UINT32_MAX;
        for (const auto& [m, c] : terms_) {
            mn = std::min(mn, m.power_of(jet(gen::q)));
            if (mn == 0) {
                break;
            }
        }
        return static_cast<int>(mn);
    }

    friend DiffPoly eps_div(const DiffPoly& a)
    {
        if (a.order_ == 0) {
            if (!a.is_zero()) {
                throw NonDivisible("eps_div: no epsilon headroom at order 0");
            }
        }
        DiffPoly out(std::max(a.order_ - 1, 0));
        for (const auto& [m, c] : a.terms_) {
            if (!c[0].is_zero()) {
                std::ostringstream os;
                os << "eps_div: nonzero epsilon^0 component on a monomial of degree " << m.degree();
                throw NonDivisible(os.str());
            }
            ScalarSeries d = eps_div(c);
            if (!d.is_zero()) {
                out.terms_.emplace(m, std::move(d));
            }
        }
        return out;
    }

    friend bool operator==(const DiffPoly& a, const DiffPoly& b)
    {
        return a.order_ == b.order_ && a.terms_ == b.terms_;
    }

    /// Keeps only terms whose monomial satisfies pred.
    template <class Pred>
    DiffPoly filter(Pred pred) const
    {
        DiffPoly out(order_);
        for (const auto& [m, c] : terms_) {
            if (pred(m)) {
                out.terms_.emplace_hint(out.terms_.end(), m, c);
            }
        }
        return out;
    }

    /// Applies f to every monomial, summing the images.
    template <class F>
    DiffPoly map_monomials(F f) const
    {
        DiffPoly out(order_);
        for (const auto& [m, c] : terms_) {
            out.add_term(f(m), c);
        }
        return out;
    }

    Terms& mutable_terms() { return terms_; }

private:
    void prune()
    {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
        }
    }

    int order_;
    Terms terms_;
};

// ---------------------------------------------------------------------------
// LocalPoly: q^{-m} * numerator
// ---------------------------------------------------------------------------

class LocalPoly {
public:
    explicit LocalPoly(int order = default_eps_order) : num_(order) {}
    LocalPoly(DiffPoly num, int q_power = 0) : num_(std::move(num)), qpow_(q_power)  // NOLINT
    {
        if (qpow_ < 0) {
            num_ = num_.mul_q_power(-qpow_);
            qpow_ = 0;
        }
        normalize();
    }

    static LocalPoly q_inverse(int order) { return LocalPoly(DiffPoly::one(order), 1); }

    const DiffPoly& numerator() const { return num_; }
    int q_power() const { return qpow_; }
    int order() const { return num_.order(); }
    bool is_zero() const { return num_.is_zero(); }

    /// Throws Localized when a q-denominator is present.
    const DiffPoly& polynomial() const
    {
        if (qpow_ > 0) {
            throw Localized("expected a polynomial, got a q-localized value");
        }
        return num_;
    }

    LocalPoly truncated(int order) const { return LocalPoly(num_.truncated(order), qpow_); }

    friend LocalPoly operator+(const LocalPoly& a, const LocalPoly& b)
    {
        int m = std::max(a.qpow_, b.qpow_);
        DiffPoly s = a.num_.mul_q_power(m - a.qpow_);
        s += b.num_.mul_q_power(m - b.qpow_);
        return LocalPoly(std::move(s), m);
    }
    friend LocalPoly operator-(const LocalPoly& a) { return LocalPoly(-a.num_, a.qpow_); }
    friend LocalPoly operator-(const LocalPoly& a, const LocalPoly& b) { return a + (-b); }
    friend LocalPoly operator*(const LocalPoly& a, const LocalPoly& b)
    {
        return LocalPoly(a.num_ * b.num_, a.qpow_ + b.qpow_);
    }
    friend LocalPoly operator*(const Rational& r, const LocalPoly& a) { return LocalPoly(a.num_ * r, a.qpow_); }
    LocalPoly& operator+=(const LocalPoly& o) { return *this = *this + o; }
    LocalPoly& operator-=(const LocalPoly& o) { return *this = *this - o; }
    LocalPoly& operator*=(const LocalPoly& o) { return *this = *this * o; }

    friend LocalPoly eps_div(const LocalPoly& a) { return LocalPoly(eps_div(a.num_), a.qpow_); }

    friend bool operator==(const LocalPoly& a, const LocalPoly& b)
    {
        return a.qpow_ == b.qpow_ && a.num_ == b.num_;
    }

private:
    void normalize()
    {
        if (num_.is_zero()) {
            qpow_ = 0;
            return;
        }
        if (qpow_ > 0) {
            int d = std::min(qpow_, num_.min_q_power());
            if (d > 0) {
                num_ = num_.mul_q_power(-d);
                qpow_ -= d;
            }
        }
    }

    DiffPoly num_;
    int qpow_ = 0;
};

inline LocalPoly lp_var(Gen g, int order) { return LocalPoly(DiffPoly::var(g, order)); }
inline LocalPoly lp_jet(Gen g, int n, int order) { return LocalPoly(DiffPoly::var(g, n, order)); }
inline LocalPoly lp_scalar(int order, const Rational& r) { return LocalPoly(DiffPoly::scalar(order, r)); }
inline LocalPoly lp_const(const ScalarSeries& s) { return LocalPoly(DiffPoly::constant(s)); }
inline LocalPoly lp_tau(int order) { return LocalPoly(DiffPoly::tau(order)); }

/// Sums LocalPolys with different q-denominators, bringing them to a common one once.
class LocalAccumulator {
public:
    explicit LocalAccumulator(int order) : order_(order) {}
    void add(const LocalPoly& p) { add(p.numerator(), p.q_power()); }
    void add(const DiffPoly& num, int q_power)
    {
        auto it = parts_.find(q_power);
        if (it == parts_.end()) {
            parts_.emplace(q_power, num);
        } else {
            it->second += num;
        }
    }
    LocalPoly result() const
    {
        if (parts_.empty()) {
            return LocalPoly(order_);
        }
        int m = parts_.rbegin()->first;
        DiffPoly s(order_);
        for (const auto& [k, n] : parts_) {
            s += n.mul_q_power(m - k);
        }
        return LocalPoly(std::move(s), m);
    }

private:
    int order_;
    std::map<int, DiffPoly> parts_;
};

// ---------------------------------------------------------------------------
// Derivation, conjugation, evaluation
// ---------------------------------------------------------------------------

/// The derivation d on a polynomial: d(d^n x) = d^{n+1} x, d(z_k) = 0, and in the
/// reduced model d q = q * du.
inline DiffPoly d_apply(const DiffPoly& p, DMode mode = DMode::free)
{
    DiffPoly out(p.order());
    const std::uint32_t qv = jet(gen::q);
    const std::uint32_t u1 = jet(gen::u, 1);
    for (const auto& [m, c] : p.terms()) {
        for (const auto& f : m.factors()) {
            JetVar jv = JetVar::unpack(f.var);
            if (gen::is_constant(jv.generator)) {
                continue;
            }
            Monomial mm = m;
            ScalarSeries cc = c;
            cc *= Rational(static_cast<long>(f.pow));
            if (mode == DMode::reduced && f.var == qv) {
                mm.mul(u1, 1);
            } else {
                mm.mul(f.var, -1);
                mm.mul(jet(jv.generator, jv.deriv + 1), 1);
            }
            out.add_term(mm, cc);
        }
    }
    return out;
}

/// d(q^{-m} N) = q^{-m-1}(q dN - m (dq) N), or q^{-m}(dN - m u_1 N) in the reduced model.
inline LocalPoly d_apply(const LocalPoly& p, DMode mode = DMode::free)
{
    const int m = p.q_power();
    DiffPoly dn = d_apply(p.numerator(), mode);
    if (m == 0) {
        return LocalPoly(std::move(dn));
    }
    if (mode == DMode::reduced) {
        DiffPoly corr = p.numerator() * DiffPoly::var(gen::u, 1, p.order());
        corr *= Rational(m);
        return LocalPoly(dn - corr, m);
    }
    DiffPoly s = dn.mul_q_power(1);
    DiffPoly corr = p.numerator() * DiffPoly::var(gen::q, 1, p.order());
    corr *= Rational(m);
    s -= corr;
    return LocalPoly(std::move(s), m + 1);
}

inline DiffPoly conjugate_poly(const DiffPoly& p)
{
    DiffPoly out(p.order());
    for (const auto& [m, c] : p.terms()) {
        Monomial mm;
        for (const auto& f : m.factors()) {
            JetVar jv = JetVar::unpack(f.var);
            mm.mul(jet(gen::conjugate(jv.generator), jv.deriv), static_cast<int>(f.pow));
        }
        out.add_term(mm, scalar_conjugate(c));
    }
    return out;
}

/// Involution: a_k <-> abar_k, z_k <-> zbar_k, tau -> -tau; q and u are fixed.
inline LocalPoly conjugate_poly(const LocalPoly& p)
{
    return LocalPoly(conjugate_poly(p.numerator()), p.q_power());
}

/// The homomorphism sending every generator to 0.
inline ScalarSeries alpha_eval(const DiffPoly& p) { return p.constant_term(); }
inline ScalarSeries alpha_eval(const LocalPoly& p) { return alpha_eval(p.polynomial()); }

/// Repeated derivatives of a fixed element, computed lazily.
class JetTower {
public:
    JetTower(LocalPoly base, DMode mode) : mode_(mode) { d_.push_back(std::move(base)); }
    const LocalPoly& operator[](int n)
    {
        while (static_cast<int>(d_.size()) <= n) {
            d_.push_back(d_apply(d_.back(), mode_));
        }
        return d_[n];
    }

private:
    DMode mode_;
    std::deque<LocalPoly> d_;
};

/// Derivation commuting with d, determined by its values on underived generators.
class EvolutionaryDerivation {
public:
    EvolutionaryDerivation() = default;
    explicit EvolutionaryDerivation(DMode mode, bool constants_fixed = true)
        : mode_(mode), constants_fixed_(constants_fixed)
    {
    }

    void set(Gen g, LocalPoly image) { images_.insert_or_assign(g, std::move(image)); }
    bool has(Gen g) const { return images_.count(g) != 0; }
    const LocalPoly& image(Gen g) const
    {
        auto it = images_.find(g);
        if (it == images_.end()) {
            throw MissingImage("evolutionary derivation has no image for " + gen::name(g));
        }
        return it->second;
    }
    const std::map<Gen, LocalPoly>& images() const { return images_; }
    DMode mode() const { return mode_; }

    LocalPoly apply(const LocalPoly& p) const
    {
        const int order = p.order();
        LocalAccumulator acc(order);
        std::map<Gen, JetTower> towers;
        auto jet_image = [&](Gen g, int n) -> const LocalPoly& {
            auto it = towers.find(g);
            if (it == towers.end()) {
                it = towers.emplace(g, JetTower(image(g), mode_)).first;
            }
            return it->second[n];
        };
        const int m = p.q_power();
        for (const auto& [mono, c] : p.numerator().terms()) {
            for (const auto& f : mono.factors()) {
                JetVar jv = JetVar::unpack(f.var);
                if (gen::is_constant(jv.generator) && constants_fixed_ && !has(jv.generator)) {
                    continue;
                }
                if (mode_ == DMode::reduced && jv.generator == gen::q && jv.deriv > 0) {
                    throw std::logic_error("reduced-model polynomial carries a q jet");
                }
                Monomial rest = mono;
                rest.mul(f.var, -1);
                ScalarSeries cc = c;
                cc *= Rational(static_cast<long>(f.pow));
                const LocalPoly& img = jet_image(jv.generator, jv.deriv);
                acc.add(img.numerator().mul_term(rest, cc), img.q_power() + m);
            }
        }
        if (m > 0) {
            // d(q^{-m}) = -m q^{-m-1} (dq)
            const LocalPoly& dq = jet_image(gen::q, 0);
            DiffPoly t = p.numerator() * dq.numerator();
            t *= Rational(-m);
            acc.add(t, m + 1 + dq.q_power());
        }
        return acc.result();
    }

private:
    DMode mode_ = DMode::free;
    bool constants_fixed_ = true;
    std::map<Gen, LocalPoly> images_;
};

inline LocalPoly evolutionary_apply(const EvolutionaryDerivation& d, const LocalPoly& p) { return d.apply(p); }

/// Ring homomorphism commuting with d: generators in `images` are replaced by their
/// images (jets by derivatives of the images, computed in `mode`); all other
/// generators are kept, with q jets rewritten when mode is reduced.
class Substitution {
public:
    Substitution(DMode mode, int order) : mode_(mode), order_(order) {}

    void set(Gen g, LocalPoly image)
    {
        if (g == gen::q) {
            throw std::invalid_argument("Substitution: q cannot be substituted");
        }
        images_.insert_or_assign(g, std::move(image));
        towers_.clear();
    }
    bool has(Gen g) const { return images_.count(g) != 0; }
    const std::map<Gen, LocalPoly>& images() const { return images_; }

    /// When set, generators rejected by the predicate raise MissingCoefficient.
    void require(std::function<bool(Gen)> must_map) { must_map_ = std::move(must_map); }

    LocalPoly operator()(const LocalPoly& p) const
    {
        LocalAccumulator acc(std::min(order_, p.order()));
        for (const auto& [mono, c] : p.numerator().terms()) {
            Monomial kept;
            LocalPoly prod = lp_const(c.truncated(order_));
            bool any = false;
            for (const auto& f : mono.factors()) {
                JetVar jv = JetVar::unpack(f.var);
                const LocalPoly* img = image_of(jv);
                if (!img) {
                    kept.mul(f.var, static_cast<int>(f.pow));
                    continue;
                }
                for (std::uint32_t i = 0; i < f.pow; ++i) {
                    prod = prod * *img;
                }
                any = true;
            }
            (void)any;
            acc.add(prod.numerator().mul_term(kept, ScalarSeries::one(prod.order())),
                    prod.q_power() + p.q_power());
        }
        return acc.result();
    }

private:
    const LocalPoly* image_of(JetVar jv) const
    {
        Gen g = jv.generator;
        if (must_map_ && !has(g) && must_map_(g)) {
            throw MissingCoefficient("no reduction supplied for " + gen::name(g));
        }
        bool q_jet = (g == gen::q && jv.deriv > 0 && mode_ == DMode::reduced);
        if (!has(g) && !q_jet) {
            return nullptr;
        }
        std::lock_guard<std::mutex> lk(*mu_);
        auto it = towers_.find(g);
        if (it == towers_.end()) {
            LocalPoly base = has(g) ? images_.at(g) : lp_var(gen::q, order_);
            it = towers_.emplace(g, JetTower(std::move(base), mode_)).first;
        }
        return &it->second[jv.deriv];
    }

    DMode mode_;
    int order_;
    std::map<Gen, LocalPoly> images_;
    std::function<bool(Gen)> must_map_;
    mutable std::map<Gen, JetTower> towers_;
    std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
};

/// Partial derivative with respect to the underived q (q must carry no jets).
inline LocalPoly partial_q(const LocalPoly& p)
{
    const std::uint32_t qv = jet(gen::q);
    const int m = p.q_power();
    DiffPoly out(p.order());
    for (const auto& [mono, c] : p.numerator().terms()) {
        for (const auto& f : mono.factors()) {
            JetVar jv = JetVar::unpack(f.var);
            if (jv.generator == gen::q && jv.deriv > 0) {
                throw std::logic_error("partial_q: q jets present");
            }
        }
        int e = static_cast<int>(mono.power_of(qv)) - m;
        if (e == 0) {
            continue;
        }
        ScalarSeries cc = c;
        cc *= Rational(e);
        out.add_term(mono, cc);
    }
    // every surviving term was multiplied by q^{e-1}/q^{e}: one more q in the denominator
    return LocalPoly(std::move(out), m + 1);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string to_string(const TauPoly& t)
{
    std::ostringstream os;
    bool first = true;
    for (int d = t.degree(); d >= 0; --d) {
        Rational c = t[d];
        if (c.is_zero()) {
            continue;
        }
        if (!first) {
            os << (c.sign() < 0 ? " - " : " + ");
        } else if (c.sign() < 0) {
            os << "-";
        }
        Rational a = c.sign() < 0 ? -c : c;
        if (d == 0 || !a.is_one()) {
            os << a.str();
        }
        if (d > 0) {
            os << (d == 0 || !a.is_one() ? "*" : "") << "tau" << (d > 1 ? "^" + std::to_string(d) : "");
        }
        first = false;
    }
    return first ? "0" : os.str();
}

inline std::string jet_name(std::uint32_t var, bool unicode)
{
    JetVar jv = JetVar::unpack(var);
    std::string n = gen::name(jv.generator);
    if (jv.deriv == 0) {
        return n;
    }
    if (unicode) {
        static const char* const sup[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
        std::string s = "∂";
        if (jv.deriv > 1) {
            for (char ch : std::to_string(jv.deriv)) {
                s += sup[ch - '0'];
            }
        }
        return s + n;
    }
    return "D" + (jv.deriv > 1 ? "^" + std::to_string(jv.deriv) : std::string()) + "(" + n + ")";
}

inline std::string to_string(const DiffPoly& p, bool unicode = false)
{
    if (p.is_zero()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        for (int e = 0; e <= c.order(); ++e) {
            if (c[e].is_zero()) {
                continue;
            }
            os << (first ? "" : " + ") << "(" << to_string(c[e]) << ")";
            if (e > 0) {
                os << (unicode ? "·ε" : "*eps") << (e > 1 ? "^" + std::to_string(e) : "");
            }
            for (const auto& f : m.factors()) {
                os << (unicode ? "·" : "*") << jet_name(f.var, unicode)
                   << (f.pow > 1 ? "^" + std::to_string(f.pow) : "");
            }
            first = false;
        }
    }
    return os.str();
}

inline std::string to_string(const LocalPoly& p, bool unicode = false)
{
    std::string s = to_string(p.numerator(), unicode);
    if (p.q_power() == 0) {
        return s;
    }
    return "q^-" + std::to_string(p.q_power()) + " * [" + s + "]";
}

} // namespace equitoda

#endif // EQUITODA_DIFFALG_HPP
