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

#include <random>

#include <gtest/gtest.h>

#include "equitoda/model.hpp"

using namespace equitoda;

namespace {

constexpr int N = 4;

LocalPoly var(Gen g, int n = 0) { return lp_jet(g, n, N); }
LocalPoly num(long a, long b = 1) { return lp_scalar(N, Rational(a, b)); }
LocalPoly tau() { return lp_tau(N); }
LocalPoly epsp(int e, const Rational& c = 1) { return lp_const(ScalarSeries::monomial(N, e, 0, c)); }

LocalPoly random_poly(std::mt19937& rng)
{
    std::uniform_int_distribution<int> pick(0, 5), coef(-3, 3), der(0, 2);
    const Gen gens[] = {gen::q, gen::v, gen::vbar, gen::a(2), gen::abar(2), gen::z(1)};
    LocalPoly p(N);
    for (int t = 0; t < 4; ++t) {
        LocalPoly m = num(coef(rng));
        for (int f = 0; f < 2; ++f) {
            Gen g = gens[pick(rng)];
            m = m * var(g, gen::is_constant(g) ? 0 : der(rng));
        }
        if (pick(rng) == 0) {
            m = m * tau();
        }
        if (pick(rng) == 1) {
            m = m * epsp(1);
        }
        p += m;
    }
    if (pick(rng) < 2) {
        p = p * LocalPoly::q_inverse(N);
    }
    return p;
}

} // namespace

TEST(Generators, NamesRoundTrip)
{
    for (Gen g : {gen::q, gen::u, gen::v, gen::vbar, gen::a(7), gen::abar(3), gen::z(2), gen::zbar(4), gen::aux(1)}) {
        Gen back = 999;
        ASSERT_TRUE(gen::parse(gen::name(g), back)) << gen::name(g);
        EXPECT_EQ(back, g);
    }
    Gen out;
    EXPECT_FALSE(gen::parse("a1", out));
    EXPECT_FALSE(gen::parse("zz", out));
    EXPECT_EQ(gen::conjugate(gen::v), gen::vbar);
    EXPECT_EQ(gen::conjugate(gen::zbar(2)), gen::z(2));
    EXPECT_EQ(gen::conjugate(gen::q), gen::q);
}

TEST(Monomial, CanonicalOrder)
{
    Monomial q(jet(gen::q)), v(jet(gen::v)), qq(jet(gen::q), 2);
    EXPECT_TRUE(q < v);
    EXPECT_TRUE(v < qq);  // degree first
    EXPECT_TRUE(Monomial{} < q);
    EXPECT_EQ(q * v, v * q);
}

TEST(DApply, Leibniz)
{
    auto r = d_apply(var(gen::q) * var(gen::v));
    EXPECT_EQ(r, var(gen::q, 1) * var(gen::v) + var(gen::q) * var(gen::v, 1));
}

TEST(DApply, InverseOfQ)
{
    auto r = d_apply(LocalPoly::q_inverse(N));
    EXPECT_EQ(r, -(LocalPoly::q_inverse(N) * LocalPoly::q_inverse(N) * var(gen::q, 1)));
    EXPECT_EQ(r.q_power(), 2);
}

TEST(DApply, ConstantsAreKilled)
{
    EXPECT_TRUE(d_apply(var(gen::z(1))).is_zero());
    EXPECT_TRUE(d_apply(tau()).is_zero());
}

TEST(DApply, ReducedModelRewritesQ)
{
    auto r = d_apply(var(gen::q), DMode::reduced);
    EXPECT_EQ(r, var(gen::q) * var(gen::u, 1));
    auto s = d_apply(LocalPoly::q_inverse(N), DMode::reduced);
    EXPECT_EQ(s, -(LocalPoly::q_inverse(N) * var(gen::u, 1)));
}

TEST(Conjugate, Examples)
{
    EXPECT_EQ(conjugate_poly(var(gen::v)), var(gen::vbar));
    EXPECT_EQ(conjugate_poly(var(gen::q) + tau() * var(gen::q, 1)), var(gen::q) - tau() * var(gen::q, 1));
    EXPECT_EQ(conjugate_poly(var(gen::abar(3), 2)), var(gen::a(3), 2));
}

TEST(Alpha, Examples)
{
    auto p = var(gen::q) * var(gen::v) + num(3) + epsp(1) * tau();
    EXPECT_EQ(alpha_eval(p), ScalarSeries::constant(N, 3) + ScalarSeries::monomial(N, 1, 1));
    EXPECT_TRUE(alpha_eval(var(gen::a(2), 1)).is_zero());
    EXPECT_THROW(alpha_eval(LocalPoly::q_inverse(N)), Localized);
}

TEST(Localization, Normalization)
{
    LocalPoly p(var(gen::q).numerator() * var(gen::v).numerator(), 1);
    EXPECT_EQ(p.q_power(), 0);
    EXPECT_EQ(p, var(gen::v));
    EXPECT_EQ(LocalPoly::q_inverse(N) * var(gen::q), num(1));
    EXPECT_EQ(LocalPoly(p.numerator(), p.q_power()), p);
}

TEST(Evolutionary, CommutesWithD)
{
    EvolutionaryDerivation d;
    d.set(gen::q, var(gen::q) * var(gen::v, 1));
    auto r = d.apply(var(gen::q, 1));
    EXPECT_EQ(r, d_apply(var(gen::q) * var(gen::v, 1)));
    EXPECT_TRUE(d.apply(tau() + num(5)).is_zero());
    EXPECT_THROW(d.apply(var(gen::v)), MissingImage);
}

TEST(Evolutionary, EOnK)
{
    EvolutionaryDerivation e;
    e.set(gen::v, num(1));
    e.set(gen::vbar, num(1));
    e.set(gen::q, LocalPoly(N));
    EXPECT_EQ(e.apply(var(gen::v)), num(1));
    EXPECT_TRUE(e.apply(var(gen::q)).is_zero());
}

TEST(Evolutionary, InverseQ)
{
    EvolutionaryDerivation d;
    d.set(gen::q, var(gen::v));
    auto r = d.apply(LocalPoly::q_inverse(N));
    EXPECT_EQ(r, -(LocalPoly::q_inverse(N) * LocalPoly::q_inverse(N) * var(gen::v)));
}

TEST(Model, VbarExpansion)
{
    constexpr int n = 2;
    ModelReduction red(n);
    auto r = red(lp_var(gen::vbar, n));
    auto expect = lp_var(gen::v, n) - lp_tau(n) * lp_var(gen::u, n) +
                  lp_const(ScalarSeries::monomial(n, 2, 1, Rational(1, 24))) * lp_jet(gen::u, 2, n);
    EXPECT_EQ(r, expect);
}

TEST(Model, YVanishes)
{
    ModelReduction red(N);
    auto y = var(gen::q) * nabla(N).apply(var(gen::v) - var(gen::vbar)) - tau() * var(gen::q, 1);
    EXPECT_TRUE(red(y).is_zero()) << to_string(red(y));
    EXPECT_EQ(red(var(gen::q)), var(gen::q));
}

TEST(Model, MissingCoefficient)
{
    ModelReduction red(N);
    EXPECT_THROW(red(var(gen::a(2))), MissingCoefficient);
    red.set_coefficient(2, var(gen::q));
    EXPECT_EQ(red(var(gen::a(2), 1)), var(gen::q) * var(gen::u, 1));
    EXPECT_EQ(red(var(gen::abar(2))), var(gen::q));
}

TEST(PartialQ, Basic)
{
    auto p = var(gen::q) * var(gen::q) * var(gen::v) + LocalPoly::q_inverse(N);
    EXPECT_EQ(partial_q(p), num(2) * var(gen::q) * var(gen::v) - LocalPoly::q_inverse(N) * LocalPoly::q_inverse(N));
}

TEST(DiffalgProperty, Invariants)
{
    std::mt19937 rng(11);
    EvolutionaryDerivation d;
    d.set(gen::q, var(gen::q) * var(gen::v, 1));
    d.set(gen::v, var(gen::a(2), 1) + tau() * var(gen::v));
    d.set(gen::vbar, var(gen::q, 1));
    d.set(gen::a(2), var(gen::v) * var(gen::q));
    d.set(gen::abar(2), epsp(1) * var(gen::vbar, 2));
    for (int t = 0; t < 40; ++t) {
        auto p = random_poly(rng), r = random_poly(rng);
        EXPECT_EQ(d_apply(conjugate_poly(p)), conjugate_poly(d_apply(p)));
        EXPECT_EQ(conjugate_poly(conjugate_poly(p)), p);
        EXPECT_EQ(d.apply(d_apply(p)), d_apply(d.apply(p)));
        EXPECT_EQ(d.apply(p * r), d.apply(p) * r + p * d.apply(r));
        if (p.q_power() == 0 && r.q_power() == 0) {
            EXPECT_EQ(alpha_eval(p * r), alpha_eval(p) * alpha_eval(r));
            EXPECT_EQ(alpha_eval(p + r), alpha_eval(p) + alpha_eval(r));
        }
        LocalPoly again(p.numerator(), p.q_power());
        EXPECT_EQ(again, p);
    }
}
