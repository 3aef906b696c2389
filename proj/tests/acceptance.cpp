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

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "equitoda/suites.hpp"

using namespace equitoda;

namespace {

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<std::vector<Report>()> body;
};

std::string first_failure(const std::vector<Report>& rs)
{
    for (const auto& r : rs) {
        if (r.pass) {
            continue;
        }
        std::string s = r.identity;
        if (r.fail_degree) {
            s += " at Lambda^" + std::to_string(*r.fail_degree);
        }
        if (!r.message.empty()) {
            s += " [" + r.message + "]";
        }
        if (r.fail_poly) {
            s += ": residual " + to_string(*r.fail_poly);
        }
        return s;
    }
    return {};
}

std::vector<Report> lax_and_zs()
{
    LaxConfig cfg{4, 6, {-5, 2}};
    TodaEngine hi(5, 9);
    std::vector<Report> out;
    for (int n = 1; n <= 3; ++n) {
        out.push_back(verify_lax(hi, n, false, cfg));
        out.push_back(verify_lax(hi, n, true, cfg));
    }
    for (auto [m, n] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
        out.push_back(verify_zs(hi, 1, m, n, cfg));
        out.push_back(verify_zs(hi, 2, m, n, cfg));
    }
    return out;
}

std::vector<Report> end_to_end()
{
    std::vector<Report> out;
    ReducedLax rl = solve_coefficients(7, 5);
    out.push_back(verify_constraint(rl, false, Window{-5, 1}));
    out.push_back(verify_constraint(rl, true, Window{-1, 5}));
    TodaEngine e(4, 6), hi(5, 6);
    ReducedLax rm = solve_coefficients(6, 4);
    for (int n = 1; n <= 2; ++n) {
        for (int k = 1; k <= 2; ++k) {
            out.push_back(verify_delta_z(e, hi, rm, n, k, false));
            out.push_back(verify_delta_z(e, hi, rm, n, k, true));
        }
    }
    return out;
}

std::vector<Report> suite(const std::string& name)
{
    RunConfig c;
    return run_suite(name, c).reports;
}

std::vector<Report> whole_run(double& seconds)
{
    RunResult rr = run_suites({"all"}, RunConfig{});
    seconds = rr.seconds;
    Report r;
    r.identity = "verify all";
    for (const auto& s : rr.suites) {
        for (const auto& x : s.reports) {
            r.absorb(x);
        }
    }
    r.params = json{{"suites", rr.suites.size()}, {"exitCode", rr.pass() ? 0 : 1}};
    return {r};
}

} // namespace

int main()
{
    double all_seconds = 0;
    const std::vector<Criterion> criteria{
        {1, "flow genesis at eps-order 4", 1, [] { return std::vector<Report>{verify_flow_genesis(TodaEngine(4, 3))}; }},
        {2, "Toda equation at eps-order 4", 1, [] { return std::vector<Report>{verify_toda_equation(TodaEngine(4, 3))}; }},
        {3, "Lax equations n <= 3 and zero-curvature pairs on [-5, 2]", 30, lax_and_zs},
        {4, "flow commutativity on q, v, vbar, a2, abar2 for m, n <= 2", 30, [] { return suite("commute"); }},
        {5, "equivariant closed forms a2 and a3 as displayed", 5,
         [] { return std::vector<Report>{verify_closed_forms(solve_coefficients(3, 4), true)}; }},
        {6, "equivariant constraint on [-5, 1] and its conjugate, delta_n z_k for n, k <= 2", 60, end_to_end},
        {7, "e(L) identity at eps-order 2", 30,
         [] { return std::vector<Report>{verify_e_identity(solve_coefficients(6, 2), 2, Window{-6, 1})}; }},
        {8, "nabla/P product rule at eps-order 4", 1, [] { return std::vector<Report>{detail::verify_product_rule(4)}; }},
        {9, "dispersionless constraint (depth 6, tau-degree 6) and e-iterates j <= 2", 30,
         [] {
             DLConfig dc;
             return std::vector<Report>{verify_l0_constraint(dc, false), verify_l0_constraint(dc, true),
                                        verify_e_iterates(2, 6)};
         }},
        {10, "pi recursion through z-order 5, e and d_q on pi_k through z-order 4", 30,
         [] { return std::vector<Report>{verify_pi_recursion(5), verify_epi(4)}; }},
        {11, "Stirling generating function, inversion identity and basis matrices", 5,
         [] { return std::vector<Report>{verify_inversion(8)}; }},
        {12, "anti-automorphism, associativity and serialization round trips", 30,
         [] {
             auto a = suite("properties"), b = suite("serialization");
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
        {13, "verify all at default config within 3 minutes", 180, [&] { return whole_run(all_seconds); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<Report> reports;
        std::string error;
        try {
            reports = c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool identities = error.empty() && !reports.empty();
        for (const auto& r : reports) {
            identities = identities && r.pass;
        }
        bool in_budget = s < c.budget_s;
        bool pass = identities && in_budget;
        failed += pass ? 0 : 1;
        std::printf("%s criterion %2d: %s (%.3f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), s,
                    c.budget_s);
        if (!error.empty()) {
            std::printf("      error: %s\n", error.c_str());
        } else if (!identities) {
            std::printf("      first failure: %s\n", first_failure(reports).c_str());
        } else if (!in_budget) {
            std::printf("      over budget\n");
        }
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
