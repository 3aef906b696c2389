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

#ifndef EQUITODA_COEFFRING_HPP
#define EQUITODA_COEFFRING_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "equitoda/errors.hpp"
#include "equitoda/rational.hpp"

namespace equitoda {

/// Default epsilon truncation order.
inline constexpr int default_eps_order = 4;

/// Polynomial in tau with exact rational coefficients, no trailing zeros.
class TauPoly {
public:
    TauPoly() = default;
    TauPoly(const Rational& c)  // NOLINT(google-explicit-constructor)
    {
        if (!c.is_zero()) {
            c_.push_back(c);
        }
    }
    explicit TauPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

    static TauPoly monomial(int deg, const Rational& c = 1)
    {
        if (c.is_zero()) {
            return {};
        }
        std::vector<Rational> v(static_cast<std::size_t>(deg) + 1);
        v[deg] = c;
        return TauPoly(std::move(v));
    }
    static TauPoly tau() { return monomial(1); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational operator[](int d) const
    {
        return (d >= 0 && d < static_cast<int>(c_.size())) ? c_[d] : Rational{};
    }

    TauPoly& operator+=(const TauPoly& o)
    {
        if (o.c_.size() > c_.size()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t i = 0; i < o.c_.size(); ++i) {
            c_[i] += o.c_[i];
        }
        trim();
        return *this;
    }
    TauPoly& operator-=(const TauPoly& o)
    {
        if (o.c_.size() > c_.size()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t i = 0; i < o.c_.size(); ++i) {
            c_[i] -= o.c_[i];
        }
        trim();
        return *this;
    }
    TauPoly& operator*=(const Rational& r)
    {
        if (r.is_zero()) {
            c_.clear();
            return *this;
        }
        for (auto& x : c_) {
            x *= r;
        }
        return *this;
    }

    friend TauPoly operator+(TauPoly a, const TauPoly& b) { return a += b; }
    friend TauPoly operator-(TauPoly a, const TauPoly& b) { return a -= b; }
    friend TauPoly operator-(TauPoly a)
    {
        for (auto& x : a.c_) {
            x = -x;
        }
        return a;
    }
    friend TauPoly operator*(const TauPoly& a, const TauPoly& b)
    {
        TauPoly out;
        out.fma(a, b);
        return out;
    }
    friend bool operator==(const TauPoly& a, const TauPoly& b) { return a.c_ == b.c_; }

    /// *this += a * b
    void fma(const TauPoly& a, const TauPoly& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return;
        }
        std::size_t n = a.c_.size() + b.c_.size() - 1;
        if (c_.size() < n) {
            c_.resize(n);
        }
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) {
                continue;
            }
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                if (!b.c_[j].is_zero()) {
                    fma_into(c_[i + j], a.c_[i], b.c_[j]);
                }
            }
        }
        trim();
    }

    /// tau -> -tau
    TauPoly conjugate() const
    {
        TauPoly out = *this;
        for (std::size_t i = 1; i < out.c_.size(); i += 2) {
            out.c_[i] = -out.c_[i];
        }
        return out;
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero()) {
            c_.pop_back();
        }
    }

    std::vector<Rational> c_;
};

/// Truncated power series in epsilon with TauPoly coefficients, degrees 0..order.
class ScalarSeries {
public:
    ScalarSeries() : ScalarSeries(default_eps_order) {}
    explicit ScalarSeries(int order) : c_(static_cast<std::size_t>(order) + 1)
    {
        if (order < 0) {
            throw std::invalid_argument("ScalarSeries: negative order");
        }
    }
    ScalarSeries(int order, const TauPoly& constant) : ScalarSeries(order) { c_[0] = constant; }

    static ScalarSeries constant(int order, const Rational& r) { return ScalarSeries(order, TauPoly(r)); }
    static ScalarSeries one(int order) { return constant(order, 1); }
    static ScalarSeries tau(int order) { return ScalarSeries(order, TauPoly::tau()); }
    /// c * eps^e * tau^t (zero when e exceeds the order)
    static ScalarSeries monomial(int order, int e, int t, const Rational& c = 1)
    {
        ScalarSeries s(order);
        if (e <= order) {
            s.c_[e] = TauPoly::monomial(t, c);
        }
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const TauPoly& operator[](int e) const { return c_[e]; }
    TauPoly& operator[](int e) { return c_[e]; }

    bool is_zero() const
    {
        return std::all_of(c_.begin(), c_.end(), [](const TauPoly& t) { return t.is_zero(); });
    }
    /// Lowest epsilon degree with a nonzero coefficient, order()+1 if zero.
    int valuation() const
    {
        for (int e = 0; e <= order(); ++e) {
            if (!c_[e].is_zero()) {
                return e;
            }
        }
        return order() + 1;
    }
    int tau_degree() const
    {
        int d = -1;
        for (const auto& t : c_) {
            d = std::max(d, t.degree());
        }
        return d;
    }

    ScalarSeries truncated(int order) const
    {
        ScalarSeries out(std::min(order, this->order()));
        for (int e = 0; e <= out.order(); ++e) {
            out.c_[e] = c_[e];
        }
        return out;
    }

    ScalarSeries& operator+=(const ScalarSeries& o)
    {
        if (o.order() < order()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t e = 0; e < c_.size(); ++e) {
            c_[e] += o.c_[e];
        }
        return *this;
    }
    ScalarSeries& operator-=(const ScalarSeries& o)
    {
        if (o.order() < order()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t e = 0; e < c_.size(); ++e) {
            c_[e] -= o.c_[e];
        }
        return *this;
    }
    ScalarSeries& operator*=(const Rational& r)
    {
        for (auto& t : c_) {
            t *= r;
        }
        return *this;
    }

    friend ScalarSeries operator+(ScalarSeries a, const ScalarSeries& b) { return a += b; }
    friend ScalarSeries operator-(ScalarSeries a, const ScalarSeries& b) { return a -= b; }
    friend ScalarSeries operator-(ScalarSeries a)
    {
        for (auto& t : a.c_) {
            t = -t;
        }
        return a;
    }
    friend ScalarSeries operator*(const ScalarSeries& a, const ScalarSeries& b)
    {
        ScalarSeries out(std::min(a.order(), b.order()));
        out.fma(a, b);
        return out;
    }
    friend bool operator==(const ScalarSeries& a, const ScalarSeries& b) { return a.c_ == b.c_; }

    /// *this += a * b, truncated at this->order().
    void fma(const ScalarSeries& a, const ScalarSeries& b)
    {
        const int n = order();
        for (int i = 0; i <= std::min(n, a.order()); ++i) {
            if (a.c_[i].is_zero()) {
                continue;
            }
            for (int j = 0; i + j <= n && j <= b.order(); ++j) {
                if (!b.c_[j].is_zero()) {
                    c_[i + j].fma(a.c_[i], b.c_[j]);
                }
            }
        }
    }

    /// Multiplication by eps^-1. Throws NonDivisible if the eps^0 part is nonzero.
    friend ScalarSeries eps_div(const ScalarSeries& a)
    {
        if (!a.c_[0].is_zero()) {
            throw NonDivisible("eps_div: nonzero epsilon^0 component");
        }
        if (a.order() == 0) {
            throw NonDivisible("eps_div: no epsilon headroom at order 0");
        }
        ScalarSeries out(a.order() - 1);
        for (int e = 1; e <= a.order(); ++e) {
            out.c_[e - 1] = a.c_[e];
        }
        return out;
    }

    /// tau -> -tau, epsilon fixed.
    friend ScalarSeries scalar_conjugate(const ScalarSeries& a)
    {
        ScalarSeries out = a;
        for (auto& t : out.c_) {
            t = t.conjugate();
        }
        return out;
    }

private:
    std::vector<TauPoly> c_;
};

inline ScalarSeries scalar_mul(const ScalarSeries& a, const ScalarSeries& b) { return a * b; }

/// (eps-degree, tau-degree, coefficient) triples in lexicographic order.
inline std::vector<std::tuple<int, int, Rational>> triples(const ScalarSeries& s)
{
    std::vector<std::tuple<int, int, Rational>> out;
    for (int e = 0; e <= s.order(); ++e) {
        const auto& c = s[e].coeffs();
        for (int t = 0; t < static_cast<int>(c.size()); ++t) {
            if (!c[t].is_zero()) {
                out.emplace_back(e, t, c[t]);
            }
        }
    }
    return out;
}

} // namespace equitoda

#endif // EQUITODA_COEFFRING_HPP
