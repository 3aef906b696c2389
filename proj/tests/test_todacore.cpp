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

#include "equitoda/todacore.hpp"

using namespace equitoda;

namespace {

constexpr int N = 4;

LocalPoly var(Gen g) { return lp_var(g, N); }

const TodaEngine& engine()
{
    static const TodaEngine e(N, 6);
    return e;
}

} // namespace

TEST(BuildL, Coefficients)
{
    DiffOp l = build_l(N, 4);
    EXPECT_EQ(l.coeff(1), lp_scalar(N, 1));
    EXPECT_EQ(l.coeff(0), var(gen::v));
    EXPECT_EQ(l.coeff(-3), var(gen::a(4)));
    EXPECT_EQ(l.lo(), -3);
    EXPECT_FALSE(l.exact_below());
    EXPECT_TRUE(l.exact_above());
}

TEST(Powers, SquareOfL)
{
    // Lambda f = E^{1/2}(f) Lambda in the half-step convention, so p_1(2) = (E^{1/2} + E^{-1/2}) v.
    LocalPoly v = var(gen::v);
    EXPECT_EQ(engine().p(2, 2), lp_scalar(N, 1));
    EXPECT_EQ(engine().p(1, 2), shift_exp(1, N).apply(v) + shift_exp(-1, N).apply(v));
}

TEST(Flows, GenesisByHand)
{
    const ShiftOp& nab = nabla(N);
    auto d1 = engine().flow(1, false);
    auto db1 = engine().flow(1, true);
    EXPECT_EQ(d1.image(gen::q), var(gen::q) * nab.apply(var(gen::v)));
    EXPECT_EQ(d1.image(gen::v), nab.apply(var(gen::a(2))));
    EXPECT_EQ(d1.image(gen::vbar), nab.apply(var(gen::q)));
    EXPECT_EQ(db1.image(gen::v), nab.apply(var(gen::q)));
    EXPECT_EQ(db1.image(gen::q), var(gen::q) * nab.apply(var(gen::vbar)));
}

TEST(Flows, ReportsPass)
{
    EXPECT_TRUE(verify_flow_genesis(engine()).pass);
    EXPECT_TRUE(verify_toda_equation(engine()).pass);
}

TEST(Flows, InvalidIndex)
{
    EXPECT_THROW(engine().flow(0, false), std::invalid_argument);
    EXPECT_THROW(engine().power(-1), std::invalid_argument);
}

TEST(Flows, DirectAgreesWithCached)
{
    TodaEngine hi(N + 1, 6);
    for (int n = 1; n <= 2; ++n) {
        for (bool barred : {false, true}) {
            auto a = engine().flow(n, barred), b = flow_direct(hi, n, barred);
            int compared = 0;
            for (const auto& [g, img] : a.images()) {
                if (b.has(g)) {
                    EXPECT_EQ(img, b.image(g)) << gen::name(g);
                    ++compared;
                }
            }
            EXPECT_GE(compared, 3);
        }
    }
}

TEST(Lax, LaxAndZakharovShabat)
{
    LaxConfig cfg{N, 6, {-5, 2}};
    TodaEngine hi(N + 1, 9);
    for (int n = 1; n <= 3; ++n) {
        for (bool barred : {false, true}) {
            Report r = verify_lax(hi, n, barred, cfg);
            EXPECT_TRUE(r.pass) << r.to_json().dump();
            EXPECT_EQ(r.params["checkedDegrees"]["L"], json::array({-5, 2})) << r.to_json().dump();
        }
    }
    for (auto [m, n] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
        for (int kind : {1, 2}) {
            Report r = verify_zs(hi, kind, m, n, cfg);
            EXPECT_TRUE(r.pass) << r.to_json().dump();
        }
    }
}

TEST(Lax, WindowValidation)
{
    EXPECT_THROW(validate_lax_window(LaxConfig{N, 6, {0, 1}}), ConfigError);
    try {
        validate_lax_window(LaxConfig{N, 6, {0, 1}});
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("[-5, 1]"), std::string::npos);
    }
    EXPECT_NO_THROW(validate_lax_window(LaxConfig{N, 6, {-5, 1}}));
}

TEST(Commutativity, SmallFlows)
{
    const std::vector<Gen> gens{gen::q, gen::v, gen::vbar, gen::a(2), gen::abar(2)};
    EXPECT_TRUE(verify_commutativity(engine(), 1, false, 2, false, gens).pass);
    EXPECT_TRUE(verify_commutativity(engine(), 1, false, 2, true, gens).pass);
    EXPECT_TRUE(verify_commutativity(engine(), 2, true, 2, false, gens).pass);
    EXPECT_TRUE(verify_commutativity(engine(), 1, true, 2, true, gens).pass);
}

TEST(Chain, ReductionAndConjugation)
{
    for (int n = 1; n <= 3; ++n) {
        EXPECT_TRUE(toda_chain_check(engine(), n).pass) << n;
        EXPECT_TRUE(verify_alpha_kills_flows(engine(), n).pass) << n;
        EXPECT_TRUE(verify_power_conjugation(engine(), n).pass) << n;
    }
}

TEST(Derivation, MissingImageThrows)
{
    EvolutionaryDerivation d(DMode::free);
    d.set(gen::q, var(gen::v));
    EXPECT_THROW(d.apply(var(gen::vbar)), MissingImage);
    EXPECT_EQ(d.apply(var(gen::q) * var(gen::q)), lp_scalar(N, 2) * var(gen::q) * var(gen::v));
}
