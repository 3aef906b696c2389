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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "equitoda/cli.hpp"

using namespace equitoda;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "equitoda");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::filesystem::path temp_file(const std::string& name, const std::string& text)
{
    auto p = std::filesystem::temp_directory_path() / ("equitoda_test_" + name);
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

} // namespace

TEST(Flows, FirstFlowText)
{
    Outcome o = run({"flows", "-n", "1", "--depth", "4"});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(contains(o.out, "δ₁ q = q∇v")) << o.out;
    EXPECT_TRUE(contains(o.out, "at eps-order 4")) << o.out;
    EXPECT_TRUE(contains(o.out, "(1/24)·ε^2·q·∂³v")) << o.out;
}

TEST(Flows, BarredAndAscii)
{
    Outcome o = run({"flows", "-n", "1", "--barred", "--depth", "4"});
    EXPECT_EQ(o.code, 0);
    EXPECT_TRUE(contains(o.out, "δ̄₁ v = ∇q")) << o.out;
    Outcome a = run({"flows", "-n", "1", "--barred", "--depth", "4", "--ascii"});
    EXPECT_TRUE(contains(a.out, "deltabar_1 v = nabla q")) << a.out;
}

TEST(Flows, JsonImages)
{
    Outcome o = run({"flows", "-n", "2", "--format", "json", "--eps-order", "2"});
    ASSERT_EQ(o.code, 0) << o.err;
    json j = json::parse(o.out);
    EXPECT_EQ(j["n"], 2);
    EXPECT_TRUE(j["images"].contains("q"));
    EXPECT_EQ(j["config"]["epsOrder"], 2);
}

TEST(Flows, UsageErrors)
{
    EXPECT_EQ(run({"flows", "-n", "0"}).code, 2);
    EXPECT_EQ(run({"flows"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"flows", "-n", "1", "--format", "yaml"}).code, 2);
}

TEST(Equiv, ClosedFormFlags)
{
    Outcome o = run({"equiv", "--depth", "3"});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(contains(o.out, "a2 closed form q + τPv + z₁: matched")) << o.out;
    EXPECT_TRUE(contains(o.out, "a3 reference closed form: differs")) << o.out;
    Outcome z = run({"equiv", "--depth", "3", "--z-zero"});
    EXPECT_TRUE(contains(z.out, "a2 closed form q + τPv: matched")) << z.out;
    Outcome j = run({"equiv", "--depth", "3", "--format", "json"});
    json r = json::parse(j.out);
    EXPECT_EQ(r["closedForms"]["a2MatchesClosedForm"], true);
    EXPECT_EQ(r["closedForms"]["a3MatchesReferenceClosedForm"], false);
    EXPECT_EQ(r["closedForms"]["a3MatchesCorrectedClosedForm"], true);
}

TEST(Equiv, DepthOneRejected)
{
    Outcome o = run({"equiv", "--depth", "1"});
    EXPECT_EQ(o.code, 2);
    EXPECT_TRUE(contains(o.err, "coeffDepth")) << o.err;
}

TEST(Verify, StirlingSuite)
{
    Outcome o = run({"verify", "--suite", "stirling", "--format", "json"});
    ASSERT_EQ(o.code, 0) << o.err;
    json j = json::parse(o.out);
    EXPECT_EQ(j["status"], "pass");
    ASSERT_EQ(j["suites"].size(), 1u);
    EXPECT_EQ(j["suites"][0]["reports"][0]["params"]["N"], 8);
    EXPECT_EQ(j["config"]["stirlingN"], 8);
}

TEST(Verify, WindowTooSmall)
{
    Outcome o = run({"verify", "--suite", "lax", "--window", "0:1"});
    EXPECT_EQ(o.code, 2);
    EXPECT_TRUE(contains(o.err, "minimal window is [-5, 1]")) << o.err;
    EXPECT_EQ(run({"verify", "--suite", "lax", "--window", "0-1"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
}

TEST(Verify, DeterministicWithoutTimings)
{
    std::vector<std::string> args{"verify", "--suite", "serialization", "--suite", "properties",
                                  "--format", "json", "--no-timing", "--seed", "7"};
    Outcome a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(contains(a.out, "seconds"));
}

TEST(Verify, SuitesSortedByName)
{
    Outcome o = run({"verify", "--suite", "toda-eq", "--suite", "pi", "--format", "json"});
    json j = json::parse(o.out);
    ASSERT_EQ(j["suites"].size(), 2u);
    EXPECT_EQ(j["suites"][0]["suite"], "pi");
    EXPECT_EQ(j["suites"][1]["suite"], "toda-eq");
    EXPECT_TRUE(j["suites"][0].contains("seconds"));
}

TEST(Config, FileThenFlags)
{
    auto p = temp_file("config.json", R"({"coeffDepth": 3, "stirlingN": 5})");
    Outcome o = run({"verify", "--suite", "stirling", "--config", p.string(), "--stirling-n", "6", "--format", "json"});
    ASSERT_EQ(o.code, 0) << o.err;
    json j = json::parse(o.out);
    EXPECT_EQ(j["config"]["coeffDepth"], 3);
    EXPECT_EQ(j["config"]["stirlingN"], 6);
    auto bad = temp_file("bad_config.json", R"({"colour": 1})");
    EXPECT_EQ(run({"verify", "--suite", "stirling", "--config", bad.string()}).code, 2);
}

TEST(Config, FromJson)
{
    RunConfig c = config_from_json(json{{"lambdaWindow", {-4, 1}}, {"zSymbolsZero", true}});
    EXPECT_EQ(c.window.lo, -4);
    EXPECT_EQ(c.window.hi, 1);
    EXPECT_TRUE(c.z_zero);
    EXPECT_EQ(c.eps_order, 4);
    EXPECT_THROW(config_from_json(json{{"epsOrder", "four"}}), ConfigError);
    EXPECT_THROW(config_from_json(json::array()), ConfigError);
}

TEST(DumpLoad, LaxRoundTrip)
{
    Outcome d = run({"dump", "lax", "--depth", "4"});
    ASSERT_EQ(d.code, 0) << d.err;
    auto p = temp_file("lax.json", d.out);
    Outcome l = run({"load", p.string()});
    ASSERT_EQ(l.code, 0) << l.err;
    EXPECT_EQ(l.out, d.out);
    DiffOp back = op_from_json(json::parse(l.out)["value"]);
    EXPECT_EQ(back, build_l(4, 4));
}

TEST(DumpLoad, OtherKinds)
{
    for (const std::string what : {"poly", "op", "forward", "inverse", "lax-bar", "equiv-lax"}) {
        Outcome d = run({"dump", what, "--depth", "3", "--eps-order", "2"});
        ASSERT_EQ(d.code, 0) << what << d.err;
        auto p = temp_file(what + ".json", d.out);
        Outcome l = run({"load", p.string()});
        EXPECT_EQ(l.code, 0) << what << l.err;
        EXPECT_EQ(l.out, d.out) << what;
    }
}

TEST(DumpLoad, MalformedInput)
{
    auto p = temp_file("broken.json", R"({"kind": "DiffOp", "value": [1,)");
    Outcome o = run({"load", p.string()});
    EXPECT_EQ(o.code, 2);
    EXPECT_TRUE(contains(o.err, "byte")) << o.err;
    auto q = temp_file("wrong_kind.json", R"({"kind": "Sheaf", "value": 1})");
    EXPECT_EQ(run({"load", q.string()}).code, 2);
    auto r = temp_file("bad_value.json", R"({"kind": "matrix", "value": [[["x"]]]})");
    EXPECT_EQ(run({"load", r.string()}).code, 2);
    EXPECT_EQ(run({"load", "/nonexistent/equitoda.json"}).code, 2);
}
