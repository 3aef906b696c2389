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

#ifndef EQUITODA_DIFFOP_HPP
#define EQUITODA_DIFFOP_HPP

#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "equitoda/shiftop.hpp"

namespace equitoda {

/// Closed interval of Lambda-degrees; empty when lo > hi.
struct Window {
    int lo = 0;
    int hi = -1;
    bool empty() const { return lo > hi; }
    bool contains(int k) const { return lo <= k && k <= hi; }
    friend bool operator==(const Window&, const Window&) = default;
};

inline Window intersect(Window a, Window b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

/// Difference operator sum_k c_k Lambda^k. Coefficients are trusted on [lo, hi]; beyond
/// an exact side they are zero, beyond an inexact side they are unknown.
class DiffOp {
public:
    explicit DiffOp(int order = default_eps_order, DMode mode = DMode::free) : order_(order), mode_(mode) {}

    /// The finite operator with no terms.
    static DiffOp zero(int order, DMode mode = DMode::free) { return DiffOp(order, mode); }
    static DiffOp lambda(int k, int order, DMode mode = DMode::free)
    {
        return monomial(k, lp_scalar(order, 1), mode);
    }
    /// c Lambda^k, exact on both sides.
    static DiffOp monomial(int k, const LocalPoly& c, DMode mode = DMode::free)
    {
        DiffOp d(c.order(), mode);
        d.lo_ = d.hi_ = k;
        d.set(k, c);
        return d;
    }
    /// Operator with given coefficients on [lo, hi] and the given exactness flags.
    static DiffOp window_op(int lo, int hi, bool exact_below, bool exact_above, int order, DMode mode = DMode::free)
    {
        DiffOp d(order, mode);
        d.lo_ = lo;
        d.hi_ = hi;
        d.exact_below_ = exact_below;
        d.exact_above_ = exact_above;
        return d;
    }

    int order() const { return order_; }
    DMode mode() const { return mode_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    Window window() const { return {lo_, hi_}; }
    bool exact_below() const { return exact_below_; }
    bool exact_above() const { return exact_above_; }
    const std::map<int, LocalPoly>& coeffs() const { return c_; }

    bool known(int k) const
    {
        return (k >= lo_ || exact_below_) && (k <= hi_ || exact_above_);
    }

    /// Coefficient of Lambda^k; throws WindowUnderflow when unknown.
    LocalPoly coeff(int k) const
    {
        if (!known(k)) {
            throw WindowUnderflow("coefficient of Lambda^" + std::to_string(k) + " is outside the validity window [" +
                                  std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
        }
        auto it = c_.find(k);
        return it == c_.end() ? LocalPoly(order_) : it->second;
    }
    LocalPoly operator[](int k) const { return coeff(k); }

    /// Sets the coefficient of Lambda^k, which must lie in the window.
    void set(int k, const LocalPoly& p)
    {
        if (k < lo_ || k > hi_) {
            throw WindowUnderflow("set: degree " + std::to_string(k) + " outside the window");
        }
        if (p.order() < order_) {
            order_ = p.order();
            for (auto& [d, c] : c_) {
                c = c.truncated(order_);
            }
        }
        if (p.is_zero()) {
            c_.erase(k);
        } else {
            c_.insert_or_assign(k, p.truncated(order_));
        }
    }

    /// True when every trusted coefficient is zero and both sides are exact.
    bool is_zero() const { return c_.empty() && exact_below_ && exact_above_; }

    /// Narrows the trusted window; clipped sides become inexact.
    DiffOp clipped(Window w) const
    {
        DiffOp out = *this;
        if (w.lo > out.lo_) {
            out.lo_ = w.lo;
            out.exact_below_ = false;
        }
        if (w.hi < out.hi_) {
            out.hi_ = w.hi;
            out.exact_above_ = false;
        }
        for (auto it = out.c_.begin(); it != out.c_.end();) {
            it = (it->first < out.lo_ || it->first > out.hi_) ? out.c_.erase(it) : std::next(it);
        }
        return out;
    }

    DiffOp truncated(int order) const
    {
        DiffOp out = *this;
        out.order_ = std::min(order, order_);
        for (auto& [k, c] : out.c_) {
            c = c.truncated(out.order_);
        }
        out.prune();
        return out;
    }

    /// Applies f to every trusted coefficient (window and exactness unchanged; f(0) must be 0).
    template <class F>
    DiffOp map(F f) const
    {
        DiffOp out = window_op(lo_, hi_, exact_below_, exact_above_, order_, mode_);
        for (const auto& [k, c] : c_) {
            LocalPoly r = f(c);
            out.order_ = std::min(out.order_, r.order());
            out.c_.insert_or_assign(k, std::move(r));
        }
        out.normalize_order();
        out.prune();
        return out;
    }

    friend DiffOp operator+(const DiffOp& a, const DiffOp& b) { return combine(a, b, false); }
    friend DiffOp operator-(const DiffOp& a, const DiffOp& b) { return combine(a, b, true); }
    friend DiffOp operator-(const DiffOp& a)
    {
        return a.map([](const LocalPoly& p) { return -p; });
    }
    friend DiffOp operator*(const Rational& r, const DiffOp& a)
    {
        return a.map([&](const LocalPoly& p) { return r * p; });
    }

    /// Twisted product sum_{i+j=k} (E^{-j/2} a_i)(E^{i/2} b_j) Lambda^k.
    friend DiffOp operator*(const DiffOp& a, const DiffOp& b) { return mul(a, b, std::nullopt); }

    /// Product restricted to the working window `clip`.
    static DiffOp mul(const DiffOp& a, const DiffOp& b, std::optional<Window> clip)
    {
        const int order = std::min(a.order_, b.order_);
        const DMode mode = a.mode_;
        if (a.is_zero() || b.is_zero()) {
            return zero(order, mode);
        }
        DiffOp A = a.tight(), B = b.tight();
        bool eb = A.exact_below_ && B.exact_below_;
        bool ea = A.exact_above_ && B.exact_above_;
        long lo, hi;
        if (eb) {
            lo = static_cast<long>(A.lo_) + B.lo_;
        } else {
            lo = LONG_MIN;
            if (!A.exact_below_) {
                if (!B.exact_above_) {
                    throw WindowUnderflow("product of operators unbounded in opposite directions");
                }
                lo = std::max(lo, static_cast<long>(A.lo_) + B.hi_);
            }
            if (!B.exact_below_) {
                if (!A.exact_above_) {
                    throw WindowUnderflow("product of operators unbounded in opposite directions");
                }
                lo = std::max(lo, static_cast<long>(B.lo_) + A.hi_);
            }
        }
        if (ea) {
            hi = static_cast<long>(A.hi_) + B.hi_;
        } else {
            hi = LONG_MAX;
            if (!A.exact_above_) {
                hi = std::min(hi, static_cast<long>(A.hi_) + B.lo_);
            }
            if (!B.exact_above_) {
                hi = std::min(hi, static_cast<long>(B.hi_) + A.lo_);
            }
        }
        DiffOp out = window_op(static_cast<int>(lo), static_cast<int>(hi), eb, ea, order, mode);
        if (clip) {
            if (clip->lo > out.lo_) {
                out.lo_ = clip->lo;
                out.exact_below_ = false;
            }
            if (clip->hi < out.hi_) {
                out.hi_ = clip->hi;
                out.exact_above_ = false;
            }
        }
        std::map<std::pair<int, int>, LocalPoly> sa, sb;
        auto shifted = [&](std::map<std::pair<int, int>, LocalPoly>& cache, const LocalPoly& p, int idx,
                           int two_s) -> const LocalPoly& {
            auto key = std::make_pair(idx, two_s);
            auto it = cache.find(key);
            if (it == cache.end()) {
                LocalPoly v = two_s == 0 ? p.truncated(order) : shift_exp(two_s, order).apply(p, mode);
                it = cache.emplace(key, std::move(v)).first;
            }
            return it->second;
        };
        for (int k = out.lo_; k <= out.hi_; ++k) {
            LocalAccumulator acc(order);
            for (const auto& [i, ai] : A.c_) {
                int j = k - i;
                auto itb = B.c_.find(j);
                if (itb == B.c_.end()) {
                    continue;
                }
                const LocalPoly& x = shifted(sa, ai, i, -j);
                const LocalPoly& y = shifted(sb, itb->second, j, i);
                acc.add(x * y);
            }
            LocalPoly r = acc.result();
            if (!r.is_zero()) {
                out.c_.emplace(k, std::move(r));
            }
        }
        return out;
    }

    friend DiffOp commutator(const DiffOp& a, const DiffOp& b, std::optional<Window> clip = std::nullopt)
    {
        return mul(a, b, clip) - mul(b, a, clip);
    }

    /// (A)_+ : degrees >= 0.
    DiffOp plus() const
    {
        DiffOp out = *this;
        if (out.lo_ <= 0 || out.exact_below_) {
            out.lo_ = std::max(out.lo_, 0);
            out.exact_below_ = true;
            if (out.hi_ < out.lo_ && !out.exact_above_) {
                out.hi_ = out.lo_ - 1;
            }
        }
        out.c_.erase(out.c_.begin(), out.c_.lower_bound(0));
        return out;
    }

    /// (A)_- : degrees <= -1.
    DiffOp minus() const
    {
        DiffOp out = *this;
        if (out.hi_ >= -1 || out.exact_above_) {
            out.hi_ = std::min(out.hi_, -1);
            out.exact_above_ = true;
        }
        out.c_.erase(out.c_.lower_bound(0), out.c_.end());
        return out;
    }

    /// Coefficient of Lambda^0.
    LocalPoly res() const { return coeff(0); }

    friend DiffOp eps_div(const DiffOp& a)
    {
        DiffOp out = window_op(a.lo_, a.hi_, a.exact_below_, a.exact_above_, a.order_ - 1, a.mode_);
        if (a.order_ == 0) {
            throw NonDivisible("eps_div: no epsilon headroom at order 0");
        }
        for (const auto& [k, c] : a.c_) {
            LocalPoly r = eps_div(c);
            if (!r.is_zero()) {
                out.c_.emplace(k, std::move(r));
            }
        }
        return out;
    }

    /// Applies a constant-coefficient operator (d, nabla, P, ...) to each coefficient.
    DiffOp apply_shift(const ShiftOp& s) const
    {
        return map([&](const LocalPoly& p) { return s.apply(p, mode_); });
    }

    /// First trusted degree in w where the coefficient is nonzero.
    std::optional<int> first_nonzero(Window w) const
    {
        Window t = intersect(w, trusted_in(w));
        for (int k = t.lo; k <= t.hi; ++k) {
            auto it = c_.find(k);
            if (it != c_.end() && !it->second.is_zero()) {
                return k;
            }
        }
        return std::nullopt;
    }

    /// Part of w on which coefficients are known.
    Window trusted_in(Window w) const
    {
        return {exact_below_ ? w.lo : std::max(w.lo, lo_), exact_above_ ? w.hi : std::min(w.hi, hi_)};
    }

    /// Same flags, order, mode and coefficients; window bounds matter only on inexact sides.
    friend bool operator==(const DiffOp& a, const DiffOp& b)
    {
        if (a.exact_below_ != b.exact_below_ || a.exact_above_ != b.exact_above_ || a.order_ != b.order_ ||
            a.mode_ != b.mode_ || a.c_ != b.c_) {
            return false;
        }
        return (a.exact_below_ || a.lo_ == b.lo_) && (a.exact_above_ || a.hi_ == b.hi_);
    }

    /// Equality of the coefficients on the jointly trusted part of w.
    friend bool equal_on(const DiffOp& a, const DiffOp& b, Window w)
    {
        return !(a - b).first_nonzero(w).has_value();
    }

private:
    static DiffOp combine(const DiffOp& a, const DiffOp& b, bool subtract)
    {
        const int order = std::min(a.order_, b.order_);
        long lo, hi;
        bool eb = a.exact_below_ && b.exact_below_;
        bool ea = a.exact_above_ && b.exact_above_;
        if (eb) {
            lo = std::min(a.lo_, b.lo_);
        } else {
            lo = LONG_MIN;
            if (!a.exact_below_) {
                lo = std::max(lo, static_cast<long>(a.lo_));
            }
            if (!b.exact_below_) {
                lo = std::max(lo, static_cast<long>(b.lo_));
            }
        }
        if (ea) {
            hi = std::max(a.hi_, b.hi_);
        } else {
            hi = LONG_MAX;
            if (!a.exact_above_) {
                hi = std::min(hi, static_cast<long>(a.hi_));
            }
            if (!b.exact_above_) {
                hi = std::min(hi, static_cast<long>(b.hi_));
            }
        }
        DiffOp out = window_op(static_cast<int>(lo), static_cast<int>(hi), eb, ea, order, a.mode_);
        for (const auto& [k, c] : a.c_) {
            if (k >= out.lo_ && k <= out.hi_) {
                out.c_.insert_or_assign(k, c.truncated(order));
            }
        }
        for (const auto& [k, c] : b.c_) {
            if (k < out.lo_ || k > out.hi_) {
                continue;
            }
            auto it = out.c_.find(k);
            LocalPoly cc = c.truncated(order);
            if (it == out.c_.end()) {
                out.c_.emplace(k, subtract ? -cc : cc);
            } else {
                it->second = subtract ? it->second - cc : it->second + cc;
            }
        }
        out.prune();
        return out;
    }

    /// Shrinks exact sides to the actual support.
    DiffOp tight() const
    {
        DiffOp out = *this;
        if (c_.empty()) {
            return out;
        }
        if (exact_below_) {
            out.lo_ = c_.begin()->first;
        }
        if (exact_above_) {
            out.hi_ = c_.rbegin()->first;
        }
        return out;
    }

    void prune()
    {
        for (auto it = c_.begin(); it != c_.end();) {
            it = it->second.is_zero() ? c_.erase(it) : std::next(it);
        }
    }

    void normalize_order()
    {
        for (auto& [k, c] : c_) {
            if (c.order() > order_) {
                c = c.truncated(order_);
            }
        }
    }

    int order_;
    DMode mode_;
    int lo_ = 0;
    int hi_ = -1;
    bool exact_below_ = true;
    bool exact_above_ = true;
    std::map<int, LocalPoly> c_;
};

inline DiffOp op_mul(const DiffOp& a, const DiffOp& b) { return a * b; }
inline DiffOp op_plus(const DiffOp& a) { return a.plus(); }
inline DiffOp op_minus(const DiffOp& a) { return a.minus(); }
inline LocalPoly op_res(const DiffOp& a) { return a.res(); }

/// The anti-automorphism p Lambda^k -> pbar q^{[k]} Lambda^{-k}, p Lambda^{-k} -> pbar q^{-[k]} Lambda^k.
/// `post` is applied to each conjugated coefficient (the reduced model uses it to remove vbar).
inline DiffOp op_conjugate(const DiffOp& a, const std::function<LocalPoly(const LocalPoly&)>& post = {})
{
    const int order = a.order();
    DiffOp out = DiffOp::window_op(-a.hi(), -a.lo(), a.exact_above(), a.exact_below(), order, a.mode());
    for (const auto& [k, c] : a.coeffs()) {
        LocalPoly p = conjugate_poly(c);
        if (k > 0) {
            p = p * q_bracket(k, order, a.mode());
        } else if (k < 0) {
            p = p * q_bracket_inv(-k, order, a.mode());
        }
        if (post) {
            p = post(p);
        }
        out.set(-k, p);
    }
    return out;
}

/// Left multiplication by a degree-zero coefficient.
inline DiffOp scalar_op(const LocalPoly& p, DMode mode = DMode::free) { return DiffOp::monomial(0, p, mode); }

inline std::string to_string(const DiffOp& a, bool unicode = false)
{
    std::string s = "window [" + std::to_string(a.lo()) + (a.exact_below() ? "*" : "") + ", " +
                    std::to_string(a.hi()) + (a.exact_above() ? "*" : "") + "]";
    for (auto it = a.coeffs().rbegin(); it != a.coeffs().rend(); ++it) {
        s += "\n  Lambda^" + std::to_string(it->first) + ": " + to_string(it->second, unicode);
    }
    return s;
}

} // namespace equitoda

#endif // EQUITODA_DIFFOP_HPP
