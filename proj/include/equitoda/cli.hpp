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

#ifndef EQUITODA_CLI_HPP
#define EQUITODA_CLI_HPP

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "equitoda/suites.hpp"

namespace equitoda::cli {

enum Exit { ok = 0, identity_failure = 1, config_error = 2 };

struct Options {
    RunConfig cfg;
    bool json = true;
    bool unicode = true;
    bool timing = true;
};

/// Symbol set for text output.
struct Notation {
    bool unicode;
    std::string nabla() const { return unicode ? "∇" : "nabla "; }
    std::string tau() const { return unicode ? "τ" : "tau*"; }
    std::string delta(int n, bool barred) const
    {
        if (unicode) {
            static const char* const sub[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
            std::string s = barred ? "δ̄" : "δ";
            for (char ch : std::to_string(n)) {
                s += sub[ch - '0'];
            }
            return s;
        }
        return std::string(barred ? "deltabar" : "delta") + "_" + std::to_string(n);
    }
    std::string gen(Gen g) const
    {
        std::string n = gen::name(g);
        if (!unicode) {
            return n;
        }
        if (n == "vbar") {
            return "v̄";
        }
        if (n.rfind("abar", 0) == 0) {
            return "ā" + n.substr(4);
        }
        return n;
    }
};

/// Recognizes nabla(x) and q nabla(x) among the basic generators; empty when nothing fits.
inline std::string recognize_image(const LocalPoly& image, int order, const Notation& nt)
{
    const ShiftOp& nab = nabla(order);
    const Gen basics[] = {gen::q, gen::v, gen::vbar, gen::a(2), gen::abar(2)};
    for (Gen x : basics) {
        LocalPoly nx = nab.apply(lp_var(x, order));
        if ((image - nx).is_zero()) {
            return nt.nabla() + nt.gen(x);
        }
        if ((image - lp_var(gen::q, order) * nx).is_zero()) {
            return "q" + nt.nabla() + nt.gen(x);
        }
    }
    return {};
}

inline int cmd_flows(int n, bool barred, const Options& o, std::ostream& out)
{
    if (n < 1) {
        throw ConfigError("flows are indexed by n >= 1, got n = " + std::to_string(n));
    }
    const RunConfig& c = o.cfg;
    if (c.depth < n + 1) {
        throw ConfigError("coeffDepth " + std::to_string(c.depth) + " leaves no coefficients for delta_" +
                          std::to_string(n) + "; minimal coeffDepth is " + std::to_string(n + 1));
    }
    TodaEngine e(c.eps_order, c.depth);
    EvolutionaryDerivation d = e.flow(n, barred);
    std::vector<Gen> gens{gen::q, gen::v, gen::vbar};
    for (int k = 2; k <= c.depth; ++k) {
        gens.push_back(gen::a(k));
    }
    Notation nt{o.unicode};
    if (o.json) {
        json images = json::object();
        for (Gen g : gens) {
            if (d.has(g)) {
                images[gen::name(g)] = local_to_json(d.image(g));
            }
        }
        out << json{{"kind", "flows"}, {"n", n}, {"barred", barred}, {"config", config_json(c)}, {"images", images}}.dump(2)
            << "\n";
        return ok;
    }
    out << "# " << nt.delta(n, barred) << " at eps-order " << c.eps_order << ", depth " << c.depth << "\n";
    for (Gen g : gens) {
        if (!d.has(g)) {
            continue;
        }
        const LocalPoly& img = d.image(g);
        out << nt.delta(n, barred) << " " << nt.gen(g) << " = ";
        std::string named = recognize_image(img, c.eps_order, nt);
        if (!named.empty()) {
            out << named << "  =  ";
        }
        out << to_string(img, o.unicode) << "\n";
    }
    return ok;
}

inline int cmd_equiv(const Options& o, std::ostream& out)
{
    const RunConfig& c = o.cfg;
    if (c.depth < 2) {
        throw ConfigError("equiv needs coeffDepth >= 2, got " + std::to_string(c.depth));
    }
    ReducedLax rl = solve_coefficients(c.depth, c.eps_order, c.z_zero);
    const bool a2_match = (rl.a(2) - closed_form_a2(c.eps_order, c.z_zero)).is_zero();
    std::optional<LocalPoly> a3_diff;
    if (c.depth >= 3) {
        a3_diff = rl.a(3) - closed_form_a3(c.eps_order, c.z_zero);
    }
    if (o.json) {
        json coeffs = json::object();
        for (int k = 1; k <= c.depth; ++k) {
            coeffs[std::to_string(k)] = local_to_json(rl.a(k));
        }
        json flags{{"a2MatchesClosedForm", a2_match}};
        if (a3_diff) {
            flags["a3MatchesReferenceClosedForm"] = a3_diff->is_zero();
            flags["a3MinusReferenceClosedForm"] = local_to_json(*a3_diff);
            flags["a3MatchesCorrectedClosedForm"] = (*a3_diff - a3_correction(c.eps_order, c.z_zero)).is_zero();
        }
        out << json{{"kind", "equiv"}, {"config", config_json(c)}, {"coefficients", coeffs}, {"closedForms", flags}}.dump(2)
            << "\n";
        return ok;
    }
    Notation nt{o.unicode};
    const std::string pv = o.unicode ? "Pv" : "P(v)";
    out << "# equivariant Lax coefficients at eps-order " << c.eps_order << (c.z_zero ? ", z = 0" : "") << "\n";
    for (int k = 1; k <= c.depth; ++k) {
        out << "a" << k << " = " << to_string(rl.a(k), o.unicode) << "\n";
    }
    out << "a2 closed form q + " << nt.tau() << pv << (c.z_zero ? "" : (o.unicode ? " + z₁" : " + z1")) << ": "
        << (a2_match ? "matched" : "MISMATCH") << "\n";
    if (a3_diff) {
        out << "a3 reference closed form: " << (a3_diff->is_zero() ? "matched" : "differs") << "\n";
        if (!a3_diff->is_zero()) {
            out << "a3 - reference = " << to_string(*a3_diff, o.unicode) << "\n";
        }
    }
    return ok;
}

inline void print_run(const RunResult& rr, const Options& o, std::ostream& out)
{
    if (o.json) {
        out << rr.to_json(o.timing).dump(2) << "\n";
        return;
    }
    out << "config " << config_json(rr.config).dump() << "\n";
    for (const auto& s : rr.suites) {
        out << (s.pass() ? "PASS " : "FAIL ") << s.name;
        if (o.timing) {
            std::ostringstream t;
            t.precision(3);
            t << std::fixed << s.seconds;
            out << "  (" << t.str() << " s)";
        }
        out << "\n";
        for (const auto& r : s.reports) {
            out << "  " << (r.pass ? "ok   " : "FAIL ") << r.identity;
            if (!r.pass) {
                if (r.fail_degree) {
                    out << " at Lambda^" << *r.fail_degree;
                }
                if (!r.message.empty()) {
                    out << ": " << r.message;
                }
                if (r.fail_poly) {
                    out << "\n       residual " << to_string(*r.fail_poly, o.unicode);
                }
            }
            out << "\n";
        }
    }
    out << (rr.pass() ? "all suites passed" : "some suites failed") << "\n";
}

inline int cmd_verify(const std::vector<std::string>& suites, const Options& o, std::ostream& out)
{
    RunResult rr = run_suites(suites.empty() ? std::vector<std::string>{"all"} : suites, o.cfg);
    print_run(rr, o, out);
    return rr.pass() ? ok : identity_failure;
}

inline const std::vector<std::string>& dump_kinds()
{
    static const std::vector<std::string> k{"lax", "lax-bar", "equiv-lax", "forward", "inverse", "poly", "op"};
    return k;
}

inline json cmd_dump_value(const std::string& what, const RunConfig& c)
{
    if (what == "lax") {
        return envelope("DiffOp", op_to_json(build_l(c.eps_order, c.depth)));
    }
    if (what == "lax-bar") {
        return envelope("DiffOp", op_to_json(op_conjugate(build_l(c.eps_order, c.depth))));
    }
    if (what == "equiv-lax") {
        return envelope("DiffOp", op_to_json(solve_coefficients(c.depth, c.eps_order, c.z_zero).l()));
    }
    if (what == "forward") {
        return envelope("matrix", matrix_to_json(forward_matrix(c.stirling_n)));
    }
    if (what == "inverse") {
        return envelope("matrix", matrix_to_json(inverse_matrix(c.stirling_n)));
    }
    rnd::Rng rng(c.seed);
    if (what == "poly") {
        json v = poly_to_json(rnd::poly(rng, c.eps_order));
        return json{{"kind", "DiffPoly"}, {"epsOrder", c.eps_order}, {"value", v}};
    }
    if (what == "op") {
        return envelope("DiffOp", op_to_json(rnd::op(rng, c.eps_order)));
    }
    throw ConfigError("unknown dump kind '" + what + "'");
}

/// Parses an envelope, rebuilds the value and re-serializes it; throws ParseError on bad input.
inline json cmd_load_value(const std::string& text)
{
    json j = parse_json_text(text);
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string() || !j.contains("value")) {
        throw ParseError("$: expected an object with string 'kind' and 'value'");
    }
    const std::string kind = j["kind"].get<std::string>();
    const json& v = j["value"];
    if (kind == "DiffOp") {
        return envelope(kind, op_to_json(op_from_json(v, "$.value")));
    }
    if (kind == "LocalPoly") {
        return envelope(kind, local_to_json(local_from_json(v, "$.value")));
    }
    if (kind == "matrix") {
        return envelope(kind, matrix_to_json(matrix_from_json(v, "$.value")));
    }
    if (kind == "DiffPoly") {
        if (!j.contains("epsOrder") || !j["epsOrder"].is_number_integer()) {
            throw ParseError("$.epsOrder: DiffPoly envelopes carry an integer epsOrder");
        }
        int order = j["epsOrder"].get<int>();
        return json{{"kind", kind}, {"epsOrder", order}, {"value", poly_to_json(poly_from_json(v, order, "$.value"))}};
    }
    throw ParseError("$.kind: unknown kind '" + kind + "'");
}

inline std::string read_input(const std::string& path)
{
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), {});
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact symbolic verification for the equivariant Toda lattice hierarchy", "equitoda"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig defaults;
    int eps = defaults.eps_order, depth = defaults.depth, z_order = defaults.z_order, tau_cap = defaults.tau_cap;
    int stirling_n = defaults.stirling_n;
    std::uint64_t seed = defaults.seed;
    std::string window_text, format = "text", config_path;
    bool z_zero = false, ascii = false, no_timing = false;

    auto* o_eps = app.add_option("--eps-order", eps, "epsilon truncation order")->check(CLI::NonNegativeNumber);
    auto* o_depth = app.add_option("--depth", depth, "number of Lax coefficients");
    auto* o_window = app.add_option("--window", window_text, "Lambda window LO:HI");
    auto* o_z = app.add_option("--z-order", z_order, "z-order for generating functions");
    auto* o_tau = app.add_option("--tau-cap", tau_cap, "tau-degree cap for dispersionless runs");
    auto* o_stir = app.add_option("--stirling-n", stirling_n, "size of the Stirling matrices");
    auto* o_zz = app.add_flag("--z-zero", z_zero, "set the constants z_k to zero");
    auto* o_seed = app.add_option("--seed", seed, "seed for randomized checks");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--config", config_path, "JSON config file; flags override it");
    app.add_flag("--ascii", ascii, "ASCII operator names in text output");
    app.add_flag("--no-timing", no_timing, "omit timings from reports");

    auto* flows = app.add_subcommand("flows", "print delta_n on q, v, vbar, a_k");
    int flow_n = 1;
    bool flow_barred = false;
    flows->add_option("-n,--n", flow_n, "flow index")->required();
    flows->add_flag("--barred", flow_barred, "conjugate flow");

    auto* equiv = app.add_subcommand("equiv", "solve the equivariant Lax coefficients");

    auto* verify = app.add_subcommand("verify", "run verification suites");
    std::vector<std::string> suites;
    verify->add_option("--suite,suites", suites, "suite name or 'all'");

    auto* dump = app.add_subcommand("dump", "serialize a value to canonical JSON");
    std::string dump_what = "lax", dump_out;
    dump->add_option("what", dump_what, "value to dump")->check(CLI::IsMember(dump_kinds()));
    dump->add_option("-o,--out", dump_out, "output file (default stdout)");

    auto* load = app.add_subcommand("load", "parse a dumped value and print it canonically");
    std::string load_in = "-";
    load->add_option("input", load_in, "input file or '-'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return config_error;
    }

    try {
        Options o;
        if (!config_path.empty()) {
            o.cfg = config_from_json(parse_json_text(read_input(config_path)), o.cfg);
        }
        RunConfig& c = o.cfg;
        if (o_eps->count()) c.eps_order = eps;
        if (o_depth->count()) c.depth = depth;
        if (o_z->count()) c.z_order = z_order;
        if (o_tau->count()) c.tau_cap = tau_cap;
        if (o_stir->count()) c.stirling_n = stirling_n;
        if (o_zz->count()) c.z_zero = z_zero;
        if (o_seed->count()) c.seed = seed;
        if (o_window->count()) {
            auto colon = window_text.find(':');
            try {
                if (colon == std::string::npos) {
                    throw std::invalid_argument("missing ':'");
                }
                std::size_t p1 = 0, p2 = 0;
                int lo = std::stoi(window_text.substr(0, colon), &p1);
                int hi = std::stoi(window_text.substr(colon + 1), &p2);
                if (p1 != colon || p2 != window_text.size() - colon - 1) {
                    throw std::invalid_argument("trailing characters");
                }
                c.window = {lo, hi};
            } catch (const std::exception&) {
                throw ConfigError("--window expects LO:HI, got '" + window_text + "'");
            }
        }
        if (c.eps_order > 8) {
            throw ConfigError("epsOrder must lie in [0, 8], got " + std::to_string(c.eps_order));
        }
        o.json = format == "json";
        o.unicode = !ascii;
        o.timing = !no_timing;

        if (*flows) {
            return cmd_flows(flow_n, flow_barred, o, out);
        }
        if (*equiv) {
            return cmd_equiv(o, out);
        }
        if (*verify) {
            return cmd_verify(suites, o, out);
        }
        if (*dump) {
            std::string text = cmd_dump_value(dump_what, c).dump() + "\n";
            if (dump_out.empty()) {
                out << text;
            } else {
                std::ofstream f(dump_out, std::ios::binary);
                if (!f || !(f << text)) {
                    throw ConfigError("cannot write '" + dump_out + "'");
                }
            }
            return ok;
        }
        if (*load) {
            out << cmd_load_value(read_input(load_in)).dump() << "\n";
            return ok;
        }
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return config_error;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return identity_failure;
    }
    return config_error;
}

} // namespace equitoda::cli

#endif // EQUITODA_CLI_HPP
