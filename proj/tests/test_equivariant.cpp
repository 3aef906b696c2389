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

#include "equitoda/equivariant.hpp"

using namespace equitoda;

namespace {

constexpr int N = 4;

LocalPoly var(Gen g, int order = N) { return lp_var(g, order); }

/// Solve one order and one coefficient beyond the checked range, as the suites do.
const ReducedLax& solved()
{
    static const ReducedLax rl = solve_coefficients(7, N + 1);
    return rl;
}

} // namespace

TEST(Solve, A2ClosedForm)
{
    ReducedLax rl = solve_coefficients(3, N);
    LocalPoly tpv = lp_tau(N) * p_op(N).apply(var(gen::v), DMode::reduced);
    EXPECT_EQ(rl.a(1), var(gen::v));
    EXPECT_EQ(rl.a(2), var(gen::q) + tpv + var(gen::z(1)));
    ReducedLax rz = solve_coefficients(3, N, true);
    EXPECT_EQ(rz.a(2), var(gen::q) + tpv);
}

TEST(Solve, A3AtZeroEpsilon)
{
    // eps = 0, z = 0: P -> 1, [2] -> 2, so a_3 = tau q + tau^2 v - tau v^2 / 2.
    ReducedLax rl = solve_coefficients(3, 0, true);
    LocalPoly q = var(gen::q, 0), v = var(gen::v, 0), t = lp_tau(0);
    EXPECT_EQ(rl.a(3), t * q + t * t * v - Rational(1, 2) * t * v * v);
}

TEST(Solve, ReferenceA3DiffersByKnownTerm)
{
    ReducedLax rl = solve_coefficients(3, N);
    LocalPoly diff = rl.a(3) - closed_form_a3(N);
    EXPECT_FALSE(diff.is_zero());
    LocalPoly t = lp_tau(N), pv = p_op(N).apply(var(gen::v), DMode::reduced);
    EXPECT_EQ(diff, t * var(gen::z(1)) + t * t * (p_op(N).apply(pv, DMode::reduced) - pv));
    EXPECT_EQ(diff, a3_correction(N));
    EXPECT_FALSE(verify_closed_forms(rl).pass);
    EXPECT_TRUE(verify_closed_forms(rl, false).pass);
}

TEST(Solve, ReferenceA3WithZeroZStillOffAtHigherEps)
{
    // With z = 0 the gap is tau^2 (P^2 - P) v, which starts at eps^2.
    ReducedLax r1 = solve_coefficients(3, 1, true);
    EXPECT_TRUE((r1.a(3) - closed_form_a3(1, true)).is_zero());
    ReducedLax r2 = solve_coefficients(3, 2, true);
    LocalPoly d2 = r2.a(3) - closed_form_a3(2, true);
    LocalPoly want = lp_const(ScalarSeries::monomial(2, 2, 2, Rational(-1, 24))) * lp_jet(gen::v, 2, 2);
    EXPECT_EQ(d2, want);
}

TEST(Constraint, UnbarredAndBarredWindows)
{
    Report u = verify_constraint(solved(), false, Window{-5, 1});
    EXPECT_TRUE(u.pass) << u.to_json().dump();
    EXPECT_EQ(u.params["checkedDegrees"]["residual"], json::array({-5, 1}));
    Report b = verify_constraint(solved(), true, Window{-1, 5});
    EXPECT_TRUE(b.pass) << b.to_json().dump();
    EXPECT_EQ(b.params["checkedDegrees"]["residual"], json::array({-1, 5}));
}

TEST(Constraint, RejectsReferenceA3)
{
    ReducedLax bad = solved().with_coefficient(3, closed_form_a3(N + 1));
    Report r = verify_constraint(bad, false, Window{-5, 1});
    EXPECT_FALSE(r.pass);
    ASSERT_TRUE(r.fail_degree.has_value());
    EXPECT_LE(*r.fail_degree, -1);
}

TEST(Constraint, PsiMembership)
{
    EXPECT_TRUE(psi_member(solved().l(), Window{-5, 1}).pass);
    EXPECT_FALSE(psi_member(k_operator(N + 1), Window{-1, 1}).pass);
    EXPECT_FALSE(psi_member(DiffOp::lambda(-1, N + 1, DMode::reduced), Window{-3, 1}).pass);
    EXPECT_TRUE(psi_member(DiffOp::lambda(0, N + 1, DMode::reduced), Window{-3, 1}).pass);
}

TEST(Degeneration, TodaChainLimit)
{
    EXPECT_TRUE(verify_degeneration(5, 2).pass);
}

TEST(DeltaZ, ReducesToZero)
{
    TodaEngine e(2, 5), hi(3, 5);
    ReducedLax rl = solve_coefficients(5, 2);
    for (int n = 1; n <= 2; ++n) {
        for (int k = 1; k <= 2; ++k) {
            for (bool barred : {false, true}) {
                Report r = verify_delta_z(e, hi, rl, n, k, barred);
                EXPECT_TRUE(r.pass) << n << k << barred << r.to_json().dump();
            }
        }
    }
    EXPECT_THROW(verify_delta_z(e, hi, rl, 3, 2, false), ConfigError);
}

TEST(EIdentity, SymbolicAndZeroZ)
{
    Report r = verify_e_identity(solve_coefficients(6, 2), 2, Window{-6, 1});
    EXPECT_TRUE(r.pass) << r.to_json().dump();
    Report z = verify_e_identity(solve_coefficients(6, 0, true), 2, Window{-3, 1});
    EXPECT_TRUE(z.pass) << z.to_json().dump();
}

TEST(EIdentity, DerivationValues)
{
    EvolutionaryDerivation e = e_derivation(N);
    EXPECT_EQ(e.apply(var(gen::v)), lp_scalar(N, 1));
    EXPECT_TRUE(e.apply(var(gen::q)).is_zero());
    EXPECT_EQ(e.apply(var(gen::v) * var(gen::v)), lp_scalar(N, 2) * var(gen::v));
}

TEST(LaxInverse, ProductIsIdentity)
{
    ReducedLax rl = solve_coefficients(5, 2, true);
    DiffOp prod = rl.l() * lax_inverse(rl.l());
    EXPECT_FALSE(prod.first_nonzero(Window{-4, -1}).has_value());
    EXPECT_EQ(prod.coeff(0), lp_scalar(2, 1));
}

TEST(TildeAlpha, ConstantJets)
{
    LocalPoly t = lp_tau(N + 1);
    EXPECT_EQ(tilde_alpha(solved().a(3)), t * var(gen::z(1), N + 1) + Rational(1, 2) * var(gen::z(2), N + 1));
    EXPECT_THROW(tilde_alpha(LocalPoly::q_inverse(N)), Localized);
}
