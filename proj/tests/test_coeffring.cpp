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

#include "equitoda/coeffring.hpp"

using namespace equitoda;

namespace {

ScalarSeries eps(int order) { return ScalarSeries::monomial(order, 1, 0); }

ScalarSeries random_series(std::mt19937& rng, int order)
{
    std::uniform_int_distribution<int> c(-5, 5);
    ScalarSeries s(order);
    for (int e = 0; e <= order; ++e) {
        for (int t = 0; t < 3; ++t) {
            s = s + ScalarSeries::monomial(order, e, t, Rational(c(rng), 1 + (c(rng) + 5) % 3));
        }
    }
    return s;
}

} // namespace

TEST(Rational, LowestTerms)
{
    Rational r(6, -4);
    EXPECT_EQ(r.str(), "-3/2");
    EXPECT_EQ(Rational(4, 2).str(), "2");
    EXPECT_THROW(Rational(1, 0), std::domain_error);
    EXPECT_EQ(Rational::parse("-10/4"), Rational(-5, 2));
    EXPECT_THROW(Rational::parse("1/"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("x"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
}

TEST(Rational, GeneralizedBinomial)
{
    EXPECT_EQ(binomial(5, 2), Rational(10));
    EXPECT_EQ(binomial(-1, 3), Rational(-1));
    EXPECT_EQ(binomial(-2, 2), Rational(3));
    EXPECT_EQ(factorial(5), Rational(120));
}

TEST(ScalarSeries, DifferenceOfSquares)
{
    auto one = ScalarSeries::one(2);
    auto r = scalar_mul(one + eps(2), one - eps(2));
    EXPECT_EQ(r, one - ScalarSeries::monomial(2, 2, 0));
}

TEST(ScalarSeries, TauSquared)
{
    auto t = ScalarSeries::tau(4);
    EXPECT_EQ(scalar_mul(t, t), ScalarSeries::monomial(4, 0, 2));
}

TEST(ScalarSeries, DispersionCorrectionProduct)
{
    auto one = ScalarSeries::one(4);
    auto c = ScalarSeries::monomial(4, 2, 0, Rational(1, 24));
    auto r = scalar_mul(one + c, one - c);
    EXPECT_EQ(r, one - ScalarSeries::monomial(4, 4, 0, Rational(1, 576)));
}

TEST(ScalarSeries, MinOrderTruncation)
{
    auto a = ScalarSeries::one(4) + eps(4);
    auto b = ScalarSeries::one(2);
    EXPECT_EQ((a * b).order(), 2);
    EXPECT_EQ((a + b).order(), 2);
}

TEST(ScalarSeries, EpsDiv)
{
    auto a = eps(3) + ScalarSeries::monomial(3, 3, 0, Rational(1, 6));
    auto r = eps_div(a);
    EXPECT_EQ(r.order(), 2);
    EXPECT_EQ(r, ScalarSeries::one(2) + ScalarSeries::monomial(2, 2, 0, Rational(1, 6)));
    EXPECT_TRUE(eps_div(ScalarSeries(3)).is_zero());
    EXPECT_THROW(eps_div(ScalarSeries::one(3) + eps(3)), NonDivisible);
}

TEST(ScalarSeries, Conjugate)
{
    EXPECT_EQ(scalar_conjugate(ScalarSeries::tau(4)), -ScalarSeries::tau(4));
    auto e2 = ScalarSeries::monomial(4, 2, 0);
    EXPECT_EQ(scalar_conjugate(e2), e2);
    auto x = ScalarSeries::one(4) + ScalarSeries::monomial(4, 1, 1);
    EXPECT_EQ(scalar_conjugate(x), ScalarSeries::one(4) - ScalarSeries::monomial(4, 1, 1));
}

TEST(ScalarSeries, Triples)
{
    auto x = ScalarSeries::monomial(2, 1, 1, Rational(1, 2)) + ScalarSeries::constant(2, 3);
    auto t = triples(x);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(std::get<0>(t[0]), 0);
    EXPECT_EQ(std::get<2>(t[1]), Rational(1, 2));
}

TEST(ScalarSeriesProperty, RingAxiomsAndInvolution)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        auto a = random_series(rng, 4), b = random_series(rng, 4), c = random_series(rng, 4);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(scalar_conjugate(scalar_conjugate(a)), a);
        EXPECT_EQ(eps_div(eps(4) * a), a.truncated(3));
    }
}
