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

#ifndef EQUITODA_REPORT_HPP
#define EQUITODA_REPORT_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "equitoda/serialize.hpp"

namespace equitoda {

/// Outcome of one exact identity check.
struct Report {
    Report() = default;
    explicit Report(std::string id) : identity(std::move(id)) {}

    std::string identity;
    json params = json::object();
    bool pass = true;
    std::optional<int> fail_degree;
    std::optional<LocalPoly> fail_poly;
    std::string message;
    json config = json::object();

    json to_json() const
    {
        json ff = nullptr;
        if (!pass) {
            ff = json::object();
            ff["lambdaDeg"] = fail_degree ? json(*fail_degree) : json(nullptr);
            ff["poly"] = fail_poly ? local_to_json(*fail_poly) : json(nullptr);
            if (!message.empty()) {
                ff["message"] = message;
            }
        }
        return json{{"identity", identity},
                    {"params", params},
                    {"status", pass ? "pass" : "fail"},
                    {"firstFailure", ff},
                    {"config", config}};
    }

    /// Records a failure unless one is already recorded.
    void fail(std::optional<int> degree, std::optional<LocalPoly> poly, std::string msg = {})
    {
        if (!pass) {
            return;
        }
        pass = false;
        fail_degree = degree;
        fail_poly = std::move(poly);
        message = std::move(msg);
    }

    /// Folds another report into this one (first failure wins).
    void absorb(const Report& r)
    {
        if (!r.pass && pass) {
            pass = false;
            fail_degree = r.fail_degree;
            fail_poly = r.fail_poly;
            message = r.identity + (r.message.empty() ? "" : ": " + r.message);
        }
    }
};

/// Asserts that `residual` vanishes on the trusted part of w; records the degrees checked.
inline void expect_zero_on(Report& r, const DiffOp& residual, Window w, const std::string& label = {})
{
    Window t = intersect(w, residual.trusted_in(w));
    json& checked = r.params["checkedDegrees"];
    if (!checked.is_object()) {
        checked = json::object();
    }
    checked[label.empty() ? "residual" : label] = t.empty() ? json::array() : json::array({t.lo, t.hi});
    if (auto k = residual.first_nonzero(w)) {
        r.fail(*k, residual.coeff(*k), label);
    }
}

/// Asserts that a single polynomial vanishes.
inline void expect_zero(Report& r, const LocalPoly& p, const std::string& label = {})
{
    if (!p.is_zero()) {
        r.fail(std::nullopt, p, label);
    }
}

} // namespace equitoda

#endif // EQUITODA_REPORT_HPP
