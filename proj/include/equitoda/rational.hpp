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

#ifndef EQUITODA_RATIONAL_HPP
#define EQUITODA_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace equitoda {

/// Exact rational number in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
    Rational(long n, long d) : v_(n, d)
    {
        if (d == 0) {
            throw std::domain_error("Rational: zero denominator");
        }
        v_.canonicalize();
    }
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Parses "num" or "num/den" with optional leading minus sign.
    static Rational parse(std::string_view s)
    {
        if (s.empty()) {
            throw std::invalid_argument("Rational: empty string");
        }
        std::size_t i = (s[0] == '-') ? 1 : 0;
        bool slash = false;
        std::size_t digits_before = 0, digits_after = 0;
        for (; i < s.size(); ++i) {
            if (s[i] == '/') {
                if (slash) {
                    throw std::invalid_argument("Rational: malformed '" + std::string(s) + "'");
                }
                slash = true;
            } else if (s[i] >= '0' && s[i] <= '9') {
                (slash ? digits_after : digits_before)++;
            } else {
                throw std::invalid_argument("Rational: malformed '" + std::string(s) + "'");
            }
        }
        if (digits_before == 0 || (slash && digits_after == 0)) {
            throw std::invalid_argument("Rational: malformed '" + std::string(s) + "'");
        }
        mpq_class v;
        if (v.set_str(std::string(s), 10) != 0 || v.get_den() == 0) {
            throw std::invalid_argument("Rational: malformed '" + std::string(s) + "'");
        }
        v.canonicalize();
        return Rational(std::move(v));
    }

    /// "num/den", with the denominator omitted when it is 1.
    std::string str() const
    {
        if (v_.get_den() == 1) {
            return v_.get_num().get_str();
        }
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    int sign() const { return sgn(v_); }
    const mpq_class& raw() const { return v_; }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o)
    {
        if (o.is_zero()) {
            throw std::domain_error("Rational: division by zero");
        }
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    /// acc += a * b without a temporary Rational.
    friend void fma_into(Rational& acc, const Rational& a, const Rational& b)
    {
        thread_local mpq_class tmp;
        mpq_mul(tmp.get_mpq_t(), a.v_.get_mpq_t(), b.v_.get_mpq_t());
        mpq_add(acc.v_.get_mpq_t(), acc.v_.get_mpq_t(), tmp.get_mpq_t());
    }

private:
    mpq_class v_;
};

inline Rational factorial(int n)
{
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return Rational(mpq_class(f));
}

inline Rational binomial(long n, int k)
{
    // generalized binomial coefficient n(n-1)...(n-k+1)/k!, valid for negative n
    Rational r = 1;
    for (int i = 0; i < k; ++i) {
        r *= Rational(n - i, i + 1);
    }
    return r;
}

inline Rational pow(const Rational& r, int e)
{
    Rational out = 1;
    for (int i = 0; i < e; ++i) {
        out *= r;
    }
    return out;
}

} // namespace equitoda

#endif // EQUITODA_RATIONAL_HPP
