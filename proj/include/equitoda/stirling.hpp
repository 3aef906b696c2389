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

#ifndef EQUITODA_STIRLING_HPP
#define EQUITODA_STIRLING_HPP

#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "equitoda/report.hpp"

namespace equitoda {

using BasisMatrix = std::vector<std::vector<TauPoly>>;

/// Unsigned Stirling number of the first kind via s(n,k) = (n-1)s(n-1,k) + s(n-1,k-1).
inline Rational stirling_first(int n, int k)
{
    if (n < 0 || k < 0 || k > n) {
        throw std::out_of_range("stirling_first: need 0 <= k <= n, got n = " + std::to_string(n) +
                                ", k = " + std::to_string(k));
    }
    static std::mutex mu;
    static std::vector<std::vector<Rational>> rows{{Rational(1)}};
    std::lock_guard<std::mutex> lk(mu);
    while (static_cast<int>(rows.size()) <= n) {
        const auto& prev = rows.back();
        int m = static_cast<int>(rows.size());
        std::vector<Rational> row(static_cast<std::size_t>(m) + 1);
        for (int j = 0; j <= m; ++j) {
            Rational x;
            if (j < m) {
                x += Rational(m - 1) * prev[j];
            }
            if (j >= 1) {
                x += prev[j - 1];
            }
            row[j] = x;
        }
        rows.push_back(std::move(row));
    }
    return rows[n][k];
}

/// prod_{j=0}^{n-1} (tau + j), expanded directly.
inline TauPoly rising_factorial(int n)
{
    TauPoly out(Rational(1));
    for (int j = 0; j < n; ++j) {
        out = out * (TauPoly::tau() + TauPoly(Rational(j)));
    }
    return out;
}

namespace detail {

/// Table t[l] = sym_l(1, 1/2, ..., 1/m), l = 0..lmax; `elementary` selects e or h.
inline std::vector<Rational> harmonic_sym(int lmax, int m, bool elementary)
{
    std::vector<Rational> t(static_cast<std::size_t>(lmax) + 1);
    t[0] = 1;
    for (int i = 1; i <= m; ++i) {
        Rational x(1, i);
        if (elementary) {
            for (int l = lmax; l >= 1; --l) {
                t[l] += x * t[l - 1];
            }
        } else {
            for (int l = 1; l <= lmax; ++l) {
                t[l] += x * t[l - 1];
            }
        }
    }
    return t;
}

} // namespace detail

/// e_l(1, 1/2, ..., 1/m).
inline Rational sym_e(int l, int m)
{
    if (l < 0 || m < 0) {
        throw std::out_of_range("sym_e: negative argument");
    }
    return detail::harmonic_sym(l, m, true)[l];
}

/// h_l(1, 1/2, ..., 1/m).
inline Rational sym_h(int l, int m)
{
    if (l < 0 || m < 0) {
        throw std::out_of_range("sym_h: negative argument");
    }
    return detail::harmonic_sym(l, m, false)[l];
}

/// Row n-1, column l: coefficient of d_l in delta_n = n sum_k tau^{k-1} s(n,k) d_{n-k}.
inline BasisMatrix forward_matrix(int N, bool barred = false)
{
    if (N < 1) {
        throw std::out_of_range("forward_matrix: N must be positive");
    }
    BasisMatrix m(N, std::vector<TauPoly>(N));
    for (int n = 1; n <= N; ++n) {
        for (int k = 1; k <= n; ++k) {
            Rational c = Rational(n) * stirling_first(n, k);
            if (barred && (k - 1) % 2 == 1) {
                c = -c;
            }
            m[n - 1][n - k] = TauPoly::monomial(k - 1, c);
        }
    }
    return m;
}

/// Row k, column n-1: coefficient of delta_n in d_k = sum_n (-tau)^{k-n+1} h_{k-n+1}(1..1/n) delta_n / n!.
inline BasisMatrix inverse_matrix(int N, bool barred = false)
{
    if (N < 1) {
        throw std::out_of_range("inverse_matrix: N must be positive");
    }
    BasisMatrix m(N, std::vector<TauPoly>(N));
    for (int k = 0; k < N; ++k) {
        for (int n = 1; n <= k + 1; ++n) {
            int l = k - n + 1;
            Rational c = sym_h(l, n) / factorial(n);
            if (!barred && l % 2 == 1) {
                c = -c;
            }
            m[k][n - 1] = TauPoly::monomial(l, c);
        }
    }
    return m;
}

inline BasisMatrix matrix_product(const BasisMatrix& a, const BasisMatrix& b)
{
    const std::size_t n = a.size(), inner = b.size(), cols = b.empty() ? 0 : b[0].size();
    BasisMatrix out(n, std::vector<TauPoly>(cols));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != inner) {
            throw std::invalid_argument("matrix_product: shape mismatch");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            for (std::size_t l = 0; l < inner; ++l) {
                out[i][j].fma(a[i][l], b[l][j]);
            }
        }
    }
    return out;
}

inline bool is_identity(const BasisMatrix& m)
{
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m[i].size(); ++j) {
            if (!(m[i][j] == TauPoly(Rational(i == j ? 1 : 0)))) {
                return false;
            }
        }
    }
    return true;
}

/// Sum_l tau^{n-l-1} (-tau)^{l-m+1} e_{n-l-1}(1..1/(n-1)) h_{l-m+1}(1..1/m), as a tau-polynomial.
inline TauPoly inversion_sum(int n, int m)
{
    TauPoly out;
    for (int l = std::max(0, m - 1); l <= n - 1; ++l) {
        int a = n - l - 1, b = l - m + 1;
        Rational c = sym_e(a, n - 1) * sym_h(b, m);
        if (b % 2 == 1) {
            c = -c;
        }
        out += TauPoly::monomial(a + b, c);
    }
    return out;
}

/// Coefficients of z^{j}, j = 0..order, in 1 / prod_{i=1}^n (i + z tau), as tau-polynomials.
inline std::vector<TauPoly> inverse_rising_series(int n, int order)
{
    std::vector<TauPoly> s(static_cast<std::size_t>(order) + 1);
    s[0] = TauPoly(Rational(1));
    for (int i = 1; i <= n; ++i) {
        // divide by (i + z tau): t_j = (s_j - tau t_{j-1}) / i
        std::vector<TauPoly> t(s.size());
        for (int j = 0; j <= order; ++j) {
            TauPoly x = s[j];
            if (j > 0) {
                x -= TauPoly::tau() * t[j - 1];
            }
            x *= Rational(1, i);
            t[j] = x;
        }
        s = std::move(t);
    }
    return s;
}

/// Stirling, symmetric-function and basis-change identities through N.
inline Report verify_inversion(int N)
{
    Report r;
    r.identity = "stirling inversion";
    r.params = json{{"N", N}};
    auto mismatch = [&](const std::string& what) { r.fail(std::nullopt, std::nullopt, what); };

    const int gf_max = std::max(N, 12);
    for (int n = 0; n <= gf_max; ++n) {
        TauPoly gf = rising_factorial(n);
        for (int k = 0; k <= n; ++k) {
            if (gf[k] != stirling_first(n, k)) {
                mismatch("stirling generating function at n = " + std::to_string(n) + ", k = " + std::to_string(k));
            }
        }
    }
    for (int n = 1; n <= N; ++n) {
        for (int m = 1; m <= N; ++m) {
            if (!(inversion_sum(n, m) == TauPoly(Rational(n == m ? 1 : 0)))) {
                mismatch("inversion identity at n = " + std::to_string(n) + ", m = " + std::to_string(m));
            }
            if (n > m) {
                TauPoly prod(Rational(1));
                for (int j = m + 1; j <= n - 1; ++j) {
                    prod = prod * TauPoly(std::vector<Rational>{Rational(1), Rational(j)});
                }
                if (!prod[n - m].is_zero()) {
                    mismatch("degree argument at n = " + std::to_string(n) + ", m = " + std::to_string(m));
                }
            }
        }
    }
    for (int m = 0; m <= N; ++m) {
        auto e = detail::harmonic_sym(N, m, true), h = detail::harmonic_sym(N, m, false);
        for (int l = 0; l <= N; ++l) {
            Rational s;
            for (int i = 0; i <= l; ++i) {
                s += (i % 2 ? Rational(-1) : Rational(1)) * e[i] * h[l - i];
            }
            if (s != Rational(l == 0 ? 1 : 0)) {
                mismatch("e/h duality at l = " + std::to_string(l) + ", m = " + std::to_string(m));
            }
        }
    }
    for (bool barred : {false, true}) {
        BasisMatrix f = forward_matrix(N, barred), g = inverse_matrix(N, barred);
        if (!is_identity(matrix_product(f, g)) || !is_identity(matrix_product(g, f))) {
            mismatch(std::string(barred ? "barred " : "") + "forward/inverse matrices are not mutually inverse");
        }
    }
    // sum_k z^{k+1} d_k = sum_n z^n delta_n / [n]!
    BasisMatrix g = inverse_matrix(N);
    for (int n = 1; n <= N; ++n) {
        auto s = inverse_rising_series(n, N);
        for (int k = 0; k < N; ++k) {
            int j = k + 1 - n;
            TauPoly want = (j >= 0 && j <= N) ? s[j] : TauPoly();
            if (!(want == g[k][n - 1])) {
                mismatch("z-series row k = " + std::to_string(k) + ", n = " + std::to_string(n));
            }
        }
    }
    return r;
}

} // namespace equitoda

#endif // EQUITODA_STIRLING_HPP
