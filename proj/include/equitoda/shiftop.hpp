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

#ifndef EQUITODA_SHIFTOP_HPP
#define EQUITODA_SHIFTOP_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <mutex>
#include <tuple>
#include <vector>

#include "equitoda/diffalg.hpp"

namespace equitoda {

/// Truncated infinite-order differential operator sum_m c_m d^m with constant coefficients.
class ShiftOp {
public:
    explicit ShiftOp(int order = default_eps_order) : order_(order) {}

    static ShiftOp identity(int order) { return scalar(order, 1); }
    static ShiftOp scalar(int order, const Rational& r)
    {
        ShiftOp s(order);
        s.set(0, ScalarSeries::constant(order, r));
        return s;
    }

    int order() const { return order_; }
    /// Highest stored d-power plus one.
    int size() const { return static_cast<int>(c_.size()); }
    ScalarSeries coeff(int m) const { return m < size() ? c_[m] : ScalarSeries(order_); }
    bool is_zero() const
    {
        for (const auto& c : c_) {
            if (!c.is_zero()) {
                return false;
            }
        }
        return true;
    }

    void set(int m, const ScalarSeries& c)
    {
        if (m < 0) {
            throw std::out_of_range("ShiftOp: negative d-power " + std::to_string(m));
        }
        if (m >= size()) {
            c_.resize(m + 1, ScalarSeries(order_));
        }
        c_[m] = c.truncated(order_);
        trim();
    }
    void add(int m, const ScalarSeries& c)
    {
        if (m < 0) {
            throw std::out_of_range("ShiftOp: negative d-power " + std::to_string(m));
        }
        if (m >= size()) {
            c_.resize(m + 1, ScalarSeries(order_));
        }
        c_[m] += c;
        trim();
    }

    friend ShiftOp operator+(const ShiftOp& a, const ShiftOp& b)
    {
        ShiftOp out(std::min(a.order_, b.order_));
        for (int m = 0; m < std::max(a.size(), b.size()); ++m) {
            out.add(m, a.coeff(m).truncated(out.order_) + b.coeff(m).truncated(out.order_));
        }
        return out;
    }
    friend ShiftOp operator-(const ShiftOp& a) { return ShiftOp::scalar(a.order_, -1) * a; }
    friend ShiftOp operator-(const ShiftOp& a, const ShiftOp& b) { return a + (-b); }
    friend ShiftOp operator*(const Rational& r, ShiftOp a)
    {
        for (auto& c : a.c_) {
            c *= r;
        }
        a.trim();
        return a;
    }

    /// Composition; constant coefficients commute, so this is a plain product in d.
    friend ShiftOp operator*(const ShiftOp& a, const ShiftOp& b)
    {
        const int n = std::min(a.order_, b.order_);
        ShiftOp out(n);
        if (a.c_.empty() || b.c_.empty()) {
            return out;
        }
        out.c_.assign(a.c_.size() + b.c_.size() - 1, ScalarSeries(n));
        for (int i = 0; i < a.size(); ++i) {
            if (a.c_[i].valuation() > n) {
                continue;
            }
            for (int j = 0; j < b.size(); ++j) {
                out.c_[i + j].fma(a.c_[i], b.c_[j]);
            }
        }
        out.trim();
        return out;
    }

    friend bool operator==(const ShiftOp& a, const ShiftOp& b) { return a.order_ == b.order_ && a.c_ == b.c_; }

    /// Series inverse; the d^0 coefficient must have a nonzero tau-free constant and every
    /// other part must carry a positive power of epsilon.
    ShiftOp inverse() const
    {
        Rational a0 = coeff(0)[0][0];
        if (a0.is_zero() || coeff(0)[0].degree() > 0) {
            throw ZeroBracket("ShiftOp::inverse: leading coefficient is not an invertible constant");
        }
        ShiftOp r = *this - ShiftOp::scalar(order_, a0);
        for (int m = 0; m < r.size(); ++m) {
            if (!r.c_[m].is_zero() && r.c_[m].valuation() == 0) {
                throw ZeroBracket("ShiftOp::inverse: non-nilpotent remainder");
            }
        }
        Rational inv = Rational(1) / a0;
        ShiftOp x = (-inv) * r;  // -R/a0
        ShiftOp sum = ShiftOp::identity(order_);
        ShiftOp pw = ShiftOp::identity(order_);
        for (int k = 1; k <= order_; ++k) {
            pw = pw * x;
            if (pw.is_zero()) {
                break;
            }
            sum = sum + pw;
        }
        return inv * sum;
    }

    /// sum_m c_m d^m f, with f truncated progressively so no work is spent beyond the order.
    LocalPoly apply(const LocalPoly& f, DMode mode = DMode::free) const
    {
        const int n = std::min(order_, f.order());
        LocalAccumulator acc(n);
        if (c_.empty() || f.is_zero()) {
            return LocalPoly(n);
        }
        std::vector<int> suffix_min(c_.size() + 1, n + 1);
        for (int m = size() - 1; m >= 0; --m) {
            suffix_min[m] = std::min(suffix_min[m + 1], c_[m].valuation());
        }
        LocalPoly cur = f.truncated(n);
        for (int m = 0; m < size(); ++m) {
            int need = n - suffix_min[m];
            if (need < 0) {
                break;
            }
            if (need < cur.order()) {
                cur = cur.truncated(need);
            }
            if (m > 0) {
                cur = d_apply(cur, mode);
            }
            if (!c_[m].is_zero() && c_[m].valuation() <= n) {
                acc.add(cur.numerator().mul_term(Monomial{}, c_[m], n), cur.q_power());
            }
        }
        return acc.result();
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero()) {
            c_.pop_back();
        }
    }

    int order_;
    std::vector<ScalarSeries> c_;
};

namespace detail {

inline ShiftOp shift_exp_raw(int two_s, int order)
{
    ShiftOp s(order);
    Rational half_s(two_s, 2);
    Rational c = 1;
    for (int m = 0; m <= order; ++m) {
        if (m > 0) {
            c = c * half_s / Rational(m);
        }
        s.set(m, ScalarSeries::monomial(order, m, 0, c));
    }
    return s;
}

inline ShiftOp nabla_raw(int order)
{
    ShiftOp s(order);
    for (int k = 0; 2 * k <= order; ++k) {
        Rational c = Rational(1) / (pow(Rational(4), k) * factorial(2 * k + 1));
        s.set(2 * k + 1, ScalarSeries::monomial(order, 2 * k, 0, c));
    }
    return s;
}

inline ShiftOp p_raw(int order)
{
    // P = (nabla / d)^{-1}
    ShiftOp s(order);
    for (int k = 0; 2 * k <= order; ++k) {
        Rational c = Rational(1) / (pow(Rational(4), k) * factorial(2 * k + 1));
        s.set(2 * k, ScalarSeries::monomial(order, 2 * k, 0, c));
    }
    return s.inverse();
}

inline ShiftOp bracket_raw(int k, int order)
{
    if (k == 0) {
        return ShiftOp(order);
    }
    int a = k < 0 ? -k : k;
    ShiftOp s(order);
    for (int j = 1; j <= a; ++j) {
        s = s + shift_exp_raw(a + 1 - 2 * j, order);
    }
    return k < 0 ? Rational(-1) * s : s;
}

class Memo {
public:
    template <class F>
    ShiftOp get(int kind, int param, int order, F make)
    {
        auto key = std::make_tuple(kind, param, order);
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) {
                return it->second;
            }
        }
        ShiftOp v = make();
        std::lock_guard<std::mutex> lk(mu_);
        return cache_.emplace(key, std::move(v)).first->second;
    }

    static Memo& instance()
    {
        static Memo m;
        return m;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, ShiftOp> cache_;
};

} // namespace detail

/// E^s with s = two_s / 2.
inline ShiftOp shift_exp(int two_s, int order)
{
    return detail::Memo::instance().get(0, two_s, order, [&] { return detail::shift_exp_raw(two_s, order); });
}

/// nabla = eps^{-1}(E^{1/2} - E^{-1/2}).
inline ShiftOp nabla(int order)
{
    return detail::Memo::instance().get(1, 0, order, [&] { return detail::nabla_raw(order); });
}

/// P = d / nabla.
inline ShiftOp p_op(int order)
{
    return detail::Memo::instance().get(2, 0, order, [&] { return detail::p_raw(order); });
}

/// [k] = sum_{j=1}^{k} E^{(k+1)/2 - j}; [-k] = -[k]; [0] = 0.
inline ShiftOp bracket_k(int k, int order)
{
    return detail::Memo::instance().get(3, k, order, [&] { return detail::bracket_raw(k, order); });
}

inline ShiftOp bracket_k_inv(int k, int order)
{
    if (k == 0) {
        throw ZeroBracket("[0] is not invertible");
    }
    return detail::Memo::instance().get(4, k, order, [&] { return bracket_k(k, order).inverse(); });
}

/// nabla composed with [k].
inline ShiftOp nabla_bracket(int k, int order)
{
    return detail::Memo::instance().get(5, k, order, [&] { return nabla(order) * bracket_k(k, order); });
}

/// d itself, as a ShiftOp.
inline ShiftOp d_op(int order)
{
    ShiftOp s(order);
    s.set(1, ScalarSeries::one(order));
    return s;
}

/// q^{[k]} = prod_{j=0}^{k-1} E^{(k-1)/2 - j} q.
inline LocalPoly q_bracket(int k, int order, DMode mode = DMode::free)
{
    if (k < 0) {
        throw std::invalid_argument("q_bracket: negative index");
    }
    LocalPoly out = lp_scalar(order, 1);
    LocalPoly q = lp_var(gen::q, order);
    for (int j = 0; j < k; ++j) {
        out = out * shift_exp(k - 1 - 2 * j, order).apply(q, mode);
    }
    return out;
}

/// q^{-[k]}, the inverse of q^{[k]} in the localization.
inline LocalPoly q_bracket_inv(int k, int order, DMode mode = DMode::free)
{
    if (k < 0) {
        throw std::invalid_argument("q_bracket_inv: negative index");
    }
    LocalPoly out = lp_scalar(order, 1);
    LocalPoly qi = LocalPoly::q_inverse(order);
    for (int j = 0; j < k; ++j) {
        out = out * shift_exp(k - 1 - 2 * j, order).apply(qi, mode);
    }
    return out;
}

} // namespace equitoda

#endif // EQUITODA_SHIFTOP_HPP
