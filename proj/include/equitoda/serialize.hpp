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

#ifndef EQUITODA_SERIALIZE_HPP
#define EQUITODA_SERIALIZE_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "equitoda/diffop.hpp"

namespace equitoda {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad(const std::string& where, const std::string& what)
{
    throw ParseError(where + ": " + what);
}

inline int get_int(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) {
        bad(where, "expected an integer");
    }
    return j.get<int>();
}

inline const json& get_array(const json& j, const std::string& where)
{
    if (!j.is_array()) {
        bad(where, "expected an array");
    }
    return j;
}

} // namespace detail

// --- scalars -------------------------------------------------------------

inline json rational_to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const json& j, const std::string& where = "$")
{
    if (!j.is_string()) {
        detail::bad(where, "expected a rational string");
    }
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        detail::bad(where, e.what());
    }
}

/// (eps-degree, tau-degree, "num/den") triples in lexicographic order.
inline json series_to_json(const ScalarSeries& s)
{
    json out = json::array();
    for (const auto& [e, t, c] : triples(s)) {
        out.push_back(json::array({e, t, c.str()}));
    }
    return out;
}

inline ScalarSeries series_from_json(const json& j, int order, const std::string& where = "$")
{
    detail::get_array(j, where);
    ScalarSeries s(order);
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string w = where + "[" + std::to_string(i) + "]";
        const json& t = detail::get_array(j[i], w);
        if (t.size() != 3) {
            detail::bad(w, "expected [epsDeg, tauDeg, rational]");
        }
        int e = detail::get_int(t[0], w + "[0]");
        int d = detail::get_int(t[1], w + "[1]");
        if (e < 0 || e > order || d < 0) {
            detail::bad(w, "degree out of range");
        }
        s = s + ScalarSeries::monomial(order, e, d, rational_from_json(t[2], w + "[2]"));
    }
    return s;
}

inline json tau_to_json(const TauPoly& t)
{
    json out = json::array();
    for (const auto& c : t.coeffs()) {
        out.push_back(c.str());
    }
    return out;
}

inline TauPoly tau_from_json(const json& j, const std::string& where = "$")
{
    detail::get_array(j, where);
    std::vector<Rational> c;
    for (std::size_t i = 0; i < j.size(); ++i) {
        c.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return TauPoly(std::move(c));
}

// --- polynomials ---------------------------------------------------------

inline json poly_to_json(const DiffPoly& p)
{
    json out = json::array();
    for (const auto& [m, c] : p.terms()) {
        json factors = json::array();
        for (const auto& f : m.factors()) {
            JetVar jv = JetVar::unpack(f.var);
            factors.push_back(json::array({gen::name(jv.generator), jv.deriv, f.pow}));
        }
        out.push_back(json{{"coeff", series_to_json(c)}, {"factors", factors}});
    }
    return out;
}

inline DiffPoly poly_from_json(const json& j, int order, const std::string& where = "$")
{
    detail::get_array(j, where);
    DiffPoly p(order);
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string w = where + "[" + std::to_string(i) + "]";
        const json& t = j[i];
        if (!t.is_object() || !t.contains("coeff") || !t.contains("factors")) {
            detail::bad(w, "expected {\"coeff\", \"factors\"}");
        }
        Monomial m;
        const json& fs = detail::get_array(t["factors"], w + ".factors");
        for (std::size_t k = 0; k < fs.size(); ++k) {
            std::string wf = w + ".factors[" + std::to_string(k) + "]";
            const json& f = detail::get_array(fs[k], wf);
            if (f.size() != 3 || !f[0].is_string()) {
                detail::bad(wf, "expected [\"gen\", derivOrder, power]");
            }
            Gen g;
            if (!gen::parse(f[0].get<std::string>(), g)) {
                detail::bad(wf, "unknown generator '" + f[0].get<std::string>() + "'");
            }
            int ord = detail::get_int(f[1], wf + "[1]");
            int pw = detail::get_int(f[2], wf + "[2]");
            if (ord < 0 || ord > JetVar::max_deriv || pw < 1 || (ord > 0 && gen::is_constant(g))) {
                detail::bad(wf, "invalid derivative order or power");
            }
            m.mul(jet(g, ord), pw);
        }
        p.add_term(m, series_from_json(t["coeff"], order, w + ".coeff"));
    }
    return p;
}

inline json local_to_json(const LocalPoly& p)
{
    return json{{"epsOrder", p.order()}, {"qPower", p.q_power()}, {"terms", poly_to_json(p.numerator())}};
}

inline LocalPoly local_from_json(const json& j, const std::string& where = "$")
{
    if (!j.is_object() || !j.contains("qPower") || !j.contains("terms")) {
        detail::bad(where, "expected {\"qPower\", \"terms\"}");
    }
    int order = j.contains("epsOrder") ? detail::get_int(j["epsOrder"], where + ".epsOrder") : default_eps_order;
    if (order < 0) {
        detail::bad(where, "negative epsOrder");
    }
    int qp = detail::get_int(j["qPower"], where + ".qPower");
    if (qp < 0) {
        detail::bad(where, "negative qPower");
    }
    return LocalPoly(poly_from_json(j["terms"], order, where + ".terms"), qp);
}

// --- operators -----------------------------------------------------------

inline json op_to_json(const DiffOp& a)
{
    json coeffs = json::object();
    for (const auto& [k, c] : a.coeffs()) {
        coeffs[std::to_string(k)] = local_to_json(c);
    }
    return json{{"window", json::array({a.lo(), a.hi()})},
                {"exact", json::array({a.exact_below(), a.exact_above()})},
                {"epsOrder", a.order()},
                {"mode", a.mode() == DMode::free ? "free" : "reduced"},
                {"coeffs", coeffs}};
}

inline DiffOp op_from_json(const json& j, const std::string& where = "$")
{
    if (!j.is_object() || !j.contains("window") || !j.contains("coeffs")) {
        detail::bad(where, "expected {\"window\", \"coeffs\"}");
    }
    const json& w = detail::get_array(j["window"], where + ".window");
    if (w.size() != 2) {
        detail::bad(where + ".window", "expected [lo, hi]");
    }
    int lo = detail::get_int(w[0], where + ".window[0]");
    int hi = detail::get_int(w[1], where + ".window[1]");
    bool eb = true, ea = true;
    if (j.contains("exact")) {
        const json& e = detail::get_array(j["exact"], where + ".exact");
        if (e.size() != 2 || !e[0].is_boolean() || !e[1].is_boolean()) {
            detail::bad(where + ".exact", "expected [bool, bool]");
        }
        eb = e[0].get<bool>();
        ea = e[1].get<bool>();
    }
    int order = j.contains("epsOrder") ? detail::get_int(j["epsOrder"], where + ".epsOrder") : default_eps_order;
    DMode mode = DMode::free;
    if (j.contains("mode")) {
        if (j["mode"] == "reduced") {
            mode = DMode::reduced;
        } else if (j["mode"] != "free") {
            detail::bad(where + ".mode", "expected \"free\" or \"reduced\"");
        }
    }
    DiffOp a = DiffOp::window_op(lo, hi, eb, ea, order, mode);
    if (!j["coeffs"].is_object()) {
        detail::bad(where + ".coeffs", "expected an object");
    }
    for (const auto& [key, val] : j["coeffs"].items()) {
        int k;
        try {
            std::size_t pos = 0;
            k = std::stoi(key, &pos);
            if (pos != key.size()) {
                throw std::invalid_argument(key);
            }
        } catch (const std::exception&) {
            detail::bad(where + ".coeffs", "non-integer degree key '" + key + "'");
        }
        if (k < lo || k > hi) {
            detail::bad(where + ".coeffs", "degree " + key + " outside the window");
        }
        a.set(k, local_from_json(val, where + ".coeffs." + key));
    }
    return a;
}

inline json shift_to_json(const ShiftOp& s)
{
    json out = json::array();
    for (int m = 0; m < s.size(); ++m) {
        if (!s.coeff(m).is_zero()) {
            out.push_back(json::array({m, series_to_json(s.coeff(m))}));
        }
    }
    return out;
}

inline ShiftOp shift_from_json(const json& j, int order, const std::string& where = "$")
{
    detail::get_array(j, where);
    ShiftOp s(order);
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string w = where + "[" + std::to_string(i) + "]";
        const json& t = detail::get_array(j[i], w);
        if (t.size() != 2) {
            detail::bad(w, "expected [dPower, series]");
        }
        int m = detail::get_int(t[0], w + "[0]");
        if (m < 0) {
            detail::bad(w, "negative d-power");
        }
        s.add(m, series_from_json(t[1], order, w + "[1]"));
    }
    return s;
}

/// Matrix of tau-polynomials as nested arrays.
inline json matrix_to_json(const std::vector<std::vector<TauPoly>>& m)
{
    json out = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& e : row) {
            r.push_back(tau_to_json(e));
        }
        out.push_back(r);
    }
    return out;
}

inline std::vector<std::vector<TauPoly>> matrix_from_json(const json& j, const std::string& where = "$")
{
    detail::get_array(j, where);
    std::vector<std::vector<TauPoly>> m;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string w = where + "[" + std::to_string(i) + "]";
        detail::get_array(j[i], w);
        std::vector<TauPoly> row;
        for (std::size_t k = 0; k < j[i].size(); ++k) {
            row.push_back(tau_from_json(j[i][k], w + "[" + std::to_string(k) + "]"));
        }
        m.push_back(std::move(row));
    }
    return m;
}

/// Parses text, converting syntax errors to ParseError with the byte offset.
inline json parse_json_text(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

/// Envelope with a "kind" tag used by dump/load.
inline json envelope(const std::string& kind, json value) { return json{{"kind", kind}, {"value", std::move(value)}}; }

} // namespace equitoda

#endif // EQUITODA_SERIALIZE_HPP
