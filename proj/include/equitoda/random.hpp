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

#ifndef EQUITODA_RANDOM_HPP
#define EQUITODA_RANDOM_HPP

#include <random>
#include <vector>

#include "equitoda/diffop.hpp"
#include "equitoda/stirling.hpp"

namespace equitoda::rnd {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi]; avoids distribution objects so streams are portable.
inline int uniform(Rng& rng, int lo, int hi)
{
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Rational rational(Rng& rng)
{
    long num = uniform(rng, -9, 9);
    long den = uniform(rng, 1, 6);
    return Rational(num, den);
}

inline ScalarSeries scalar(Rng& rng, int order)
{
    ScalarSeries s(order);
    int terms = uniform(rng, 1, 3);
    for (int i = 0; i < terms; ++i) {
        s = s + ScalarSeries::monomial(order, uniform(rng, 0, order), uniform(rng, 0, 2), rational(rng));
    }
    return s;
}

inline TauPoly tau_poly(Rng& rng)
{
    TauPoly t;
    int terms = uniform(rng, 0, 3);
    for (int i = 0; i < terms; ++i) {
        t += TauPoly::monomial(uniform(rng, 0, 4), rational(rng));
    }
    return t;
}

/// Polynomial in q, v, vbar, a_2, abar_2, z_1 and their jets.
inline DiffPoly poly(Rng& rng, int order)
{
    static const Gen gens[] = {gen::q, gen::v, gen::vbar, gen::a(2), gen::abar(2), gen::z(1)};
    DiffPoly p(order);
    int terms = uniform(rng, 1, 4);
    for (int t = 0; t < terms; ++t) {
        DiffPoly m = DiffPoly::constant(scalar(rng, order));
        int factors = uniform(rng, 0, 2);
        for (int f = 0; f < factors; ++f) {
            Gen g = gens[uniform(rng, 0, 5)];
            m = m * DiffPoly::var(g, gen::is_constant(g) ? 0 : uniform(rng, 0, 2), order);
        }
        p = p + m;
    }
    return p;
}

inline LocalPoly local(Rng& rng, int order)
{
    LocalPoly p(poly(rng, order));
    int m = uniform(rng, 0, 3);
    for (int i = 0; i < m && i < 2; ++i) {
        p = p * LocalPoly::q_inverse(order);
    }
    return p;
}

/// Operator on a window of width at most 3 inside [-3, 3].
inline DiffOp op(Rng& rng, int order)
{
    int lo = uniform(rng, -3, 1), hi = lo + uniform(rng, 0, 2);
    DiffOp d = DiffOp::window_op(lo, hi, true, true, order);
    for (int k = lo; k <= hi; ++k) {
        d.set(k, local(rng, order));
    }
    return d;
}

/// Reduced-mode operator at eps-order 1 with eps-free coefficients in q, v and their jets.
inline DiffOp dl_op(Rng& rng)
{
    int lo = uniform(rng, -2, 0), hi = lo + uniform(rng, 0, 2);
    DiffOp d = DiffOp::window_op(lo, hi, true, true, 1, DMode::reduced);
    for (int k = lo; k <= hi; ++k) {
        LocalPoly c = lp_scalar(1, rational(rng));
        int factors = uniform(rng, 0, 2);
        for (int f = 0; f < factors; ++f) {
            c = c * lp_jet(uniform(rng, 0, 1) ? gen::q : gen::v, uniform(rng, 0, 1), 1);
        }
        d.set(k, c);
    }
    return d;
}

inline ShiftOp shift(Rng& rng, int order)
{
    ShiftOp s(order);
    int terms = uniform(rng, 1, 3);
    for (int i = 0; i < terms; ++i) {
        s.set(uniform(rng, 0, 5), scalar(rng, order));
    }
    return s;
}

inline BasisMatrix matrix(Rng& rng)
{
    int n = uniform(rng, 1, 4);
    BasisMatrix m(n, std::vector<TauPoly>(n));
    for (auto& row : m) {
        for (auto& x : row) {
            x = tau_poly(rng);
        }
    }
    return m;
}

} // namespace equitoda::rnd

#endif // EQUITODA_RANDOM_HPP
