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

#include <gtest/gtest.h>

#include "equitoda/stirling.hpp"

using namespace equitoda;

TEST(Stirling, SmallValues)
{
    EXPECT_EQ(stirling_first(3, 1), Rational(2));
    EXPECT_EQ(stirling_first(3, 2), Rational(3));
    EXPECT_EQ(stirling_first(3, 3), Rational(1));
    EXPECT_EQ(stirling_first(5, 2), Rational(50));
    for (int n = 1; n <= 10; ++n) {
        EXPECT_EQ(stirling_first(n, n), Rational(1));
        EXPECT_EQ(stirling_first(n, 0), Rational(0));
    }
    EXPECT_EQ(stirling_first(0, 0), Rational(1));
}

TEST(Stirling, RowSumsAreFactorials)
{
    for (int n = 0; n <= 9; ++n) {
        Rational s;
        for (int k = 0; k <= n; ++k) {
            s += stirling_first(n, k);
        }
        EXPECT_EQ(s, factorial(n));
    }
}

TEST(Stirling, OutOfRange)
{
    EXPECT_THROW(stirling_first(3, 4), std::out_of_range);
    EXPECT_THROW(stirling_first(-1, 0), std::out_of_range);
    EXPECT_THROW(stirling_first(2, -1), std::out_of_range);
}

TEST(Stirling, GeneratingFunction)
{
    // tau (tau + 1)(tau + 2) = 2 tau + 3 tau^2 + tau^3
    EXPECT_EQ(rising_factorial(3), TauPoly(std::vector<Rational>{0, 2, 3, 1}));
    for (int n = 0; n <= 8; ++n) {
        TauPoly gf = rising_factorial(n);
        for (int k = 0; k <= n; ++k) {
            EXPECT_EQ(gf[k], stirling_first(n, k));
        }
    }
}

TEST(Symmetric, HarmonicArguments)
{
    EXPECT_EQ(sym_e(0, 3), Rational(1));
    EXPECT_EQ(sym_h(0, 3), Rational(1));
    EXPECT_EQ(sym_e(1, 2), Rational(3, 2));
    EXPECT_EQ(sym_h(2, 2), Rational(7, 4));
    EXPECT_EQ(sym_e(2, 2), Rational(1, 2));
    EXPECT_EQ(sym_e(3, 2), Rational(0));
    EXPECT_EQ(sym_h(3, 1), Rational(1));
    EXPECT_EQ(sym_e(1, 0), Rational(0));
    EXPECT_THROW(sym_e(-1, 2), std::out_of_range);
}

TEST(Matrices, WorkedRows)
{
    BasisMatrix f = forward_matrix(3);
    EXPECT_EQ(f[0][0], TauPoly(Rational(1)));                  // delta_1 = d_0
    EXPECT_EQ(f[1][1], TauPoly(Rational(2)));                  // delta_2 = 2 d_1 + 2 tau d_0
    EXPECT_EQ(f[1][0], TauPoly::monomial(1, 2));
    EXPECT_EQ(f[2][0], TauPoly::monomial(2, 3));               // 3 s(3,3) tau^2
    BasisMatrix fb = forward_matrix(3, true);
    EXPECT_EQ(fb[1][0], TauPoly::monomial(1, -2));
    BasisMatrix g = inverse_matrix(2);
    EXPECT_EQ(g[0][0], TauPoly(Rational(1)));                  // d_0 = delta_1
    EXPECT_EQ(g[1][0], TauPoly::monomial(1, -1));              // d_1 = -tau delta_1 + delta_2 / 2
    EXPECT_EQ(g[1][1], TauPoly(Rational(1, 2)));
    EXPECT_THROW(forward_matrix(0), std::out_of_range);
}

TEST(Matrices, MutualInverses)
{
    for (int n = 1; n <= 8; ++n) {
        for (bool barred : {false, true}) {
            EXPECT_TRUE(is_identity(matrix_product(forward_matrix(n, barred), inverse_matrix(n, barred))));
            EXPECT_TRUE(is_identity(matrix_product(inverse_matrix(n, barred), forward_matrix(n, barred))));
        }
    }
    EXPECT_FALSE(is_identity(matrix_product(forward_matrix(3, true), inverse_matrix(3, false))));
}

TEST(Inversion, IdentityAndReport)
{
    for (int n = 1; n <= 8; ++n) {
        for (int m = 1; m <= 8; ++m) {
            EXPECT_EQ(inversion_sum(n, m), TauPoly(Rational(n == m ? 1 : 0))) << n << "," << m;
        }
    }
    Report r = verify_inversion(8);
    EXPECT_TRUE(r.pass) << r.to_json().dump();
}

TEST(Inversion, InverseRisingSeries)
{
    // 1 / ((1 + z tau)(2 + z tau)) = 1/2 - 3/4 tau z + 7/8 tau^2 z^2 - ...
    auto s = inverse_rising_series(2, 2);
    EXPECT_EQ(s[0], TauPoly(Rational(1, 2)));
    EXPECT_EQ(s[1], TauPoly::monomial(1, Rational(-3, 4)));
    EXPECT_EQ(s[2], TauPoly::monomial(2, Rational(7, 8)));
}
