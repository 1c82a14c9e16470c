#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cycles.hpp"
#include "doubling.hpp"
#include "errors.hpp"
#include "poly.hpp"
#include "tori.hpp"
#include "vfields.hpp"

namespace torusforge::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Files.

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InputError("write failed on '" + path.string() + "'");
}

inline json read_json_file(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Polynomials.  The JSON form is an exact term list; the parser also accepts
// the canonical text form wherever a polynomial is expected.

inline json poly_to_json(const Poly& p, std::span<const std::string> names) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) {
        terms.push_back({{"exp", e},
                         {"num", c.numerator().get_str()},
                         {"den", c.denominator().get_str()}});
    }
    return {{"vars", std::vector<std::string>(names.begin(), names.end())},
            {"terms", std::move(terms)}};
}

inline Poly poly_from_json(const json& j, std::span<const std::string> names) {
    if (j.is_string()) return Poly::parse(j.get<std::string>(), names);
    if (!j.is_object() || !j.contains("terms"))
        throw InputError("polynomial must be a canonical string or a {vars, terms} object");
    int nv = static_cast<int>(names.size());
    if (j.contains("vars")) {
        auto vars = j.at("vars").get<std::vector<std::string>>();
        if (vars != std::vector<std::string>(names.begin(), names.end()))
            throw InputError("polynomial variable list does not match its slot");
    }
    Poly out = Poly::zero(nv);
    for (const json& t : j.at("terms")) {
        auto e = t.at("exp").get<Exponents>();
        if (static_cast<int>(e.size()) != nv)
            throw InputError("term exponent width does not match the variable count");
        Rational num = Rational::parse(t.at("num").get<std::string>());
        Rational den = Rational::parse(t.at("den").get<std::string>());
        out = out + Poly::monomial(nv, std::move(e), num / den);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Systems.  Planar: {"planar": {"P", "Q", "K": [b, alpha, beta], "guesses"}}.
// Spatial: {"spatial": {"components": [...], "eps_var": bool}}.  Box entries
// are exact: integers or rational strings, never floats.

inline Rational rational_from_json(const json& j, const char* what) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw InputError(std::string(what) + " must be an integer or a rational string");
}

struct PlanarInput {
    vfields::PlanarField field;
    std::vector<std::array<double, 2>> guesses;
};

inline json planar_to_json(const vfields::PlanarField& f,
                           std::span<const std::array<double, 2>> guesses = {}) {
    auto names = vfields::PlanarField::var_names();
    json sys = {{"P", poly_to_json(f.P, names)},
                {"Q", poly_to_json(f.Q, names)},
                {"pretty", {f.P.to_string(names), f.Q.to_string(names)}},
                {"K", {f.K.b.to_string(), f.K.alpha.to_string(), f.K.beta.to_string()}}};
    if (!guesses.empty()) {
        json g = json::array();
        for (const auto& p : guesses) g.push_back({p[0], p[1]});
        sys["guesses"] = std::move(g);
    }
    return {{"planar", std::move(sys)}};
}

inline PlanarInput planar_from_json(const json& root) {
    if (!root.is_object() || !root.contains("planar"))
        throw InputError("expected a {\"planar\": ...} system file");
    const json& sys = root.at("planar");
    auto names = vfields::PlanarField::var_names();
    vfields::Box K;
    if (sys.contains("K")) {
        const json& k = sys.at("K");
        if (!k.is_array() || k.size() != 3)
            throw InputError("K must be [b, alpha, beta]");
        K.b = rational_from_json(k[0], "K bound b");
        K.alpha = rational_from_json(k[1], "K bound alpha");
        K.beta = rational_from_json(k[2], "K bound beta");
    }
    PlanarInput in{vfields::PlanarField(poly_from_json(sys.at("P"), names),
                                        poly_from_json(sys.at("Q"), names), K),
                   {}};
    if (sys.contains("guesses")) {
        for (const json& g : sys.at("guesses")) {
            if (!g.is_array() || g.size() != 2)
                throw InputError("each guess must be a [u, v] pair");
            in.guesses.push_back({g[0].get<double>(), g[1].get<double>()});
        }
    }
    return in;
}

inline json spatial_to_json(const vfields::SpatialField& f) {
    auto names = f.var_names();
    json comps = json::array(), pretty = json::array();
    for (const Poly& c : f.components) {
        comps.push_back(poly_to_json(c, names));
        pretty.push_back(c.to_string(names));
    }
    return {{"spatial",
             {{"components", std::move(comps)},
              {"eps_var", f.has_eps},
              {"pretty", std::move(pretty)}}}};
}

inline vfields::SpatialField spatial_from_json(const json& root) {
    if (!root.is_object() || !root.contains("spatial"))
        throw InputError("expected a {\"spatial\": ...} system file");
    const json& sys = root.at("spatial");
    if (!sys.contains("components") || !sys.at("components").is_array() ||
        sys.at("components").empty())
        throw InputError("spatial system needs a nonempty components array");
    int nspace = static_cast<int>(sys.at("components").size());
    bool eps = sys.value("eps_var", false);
    auto names = default_var_names(nspace);
    if (eps) names.push_back("eps");
    std::vector<Poly> comps;
    comps.reserve(nspace);
    for (const json& c : sys.at("components")) comps.push_back(poly_from_json(c, names));
    return vfields::SpatialField(std::move(comps), nspace, eps);
}

// ---------------------------------------------------------------------------
// Reports.

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json cycle_to_json(const cycles::LimitCycle& lc) {
    json samples = json::array();
    for (const auto& s : lc.samples) samples.push_back({s[0], s[1]});
    return {{"fixed_point", {lc.point[0], lc.point[1]}},
            {"period", lc.period},
            {"multiplier", lc.multiplier},
            {"residual", lc.residual},
            {"stability", lc.attracting ? "attracting" : "repelling"},
            {"via_time_reversal", lc.via_time_reversal},
            {"samples", std::move(samples)}};
}

inline json tori_report_to_json(const tori::ToriReport& r) {
    json j = {{"eps", r.eps},
              {"found", r.found},
              {"transient_used", r.transient_used},
              {"iterations_used", r.iterations_used}};
    if (r.found) {
        j["invariance_residual"] = r.curve.invariance_residual;
        j["fit_residual"] = r.curve.fit_residual;
        j["modes_used"] = r.curve.modes_used;
        j["rotation_per_iterate"] = r.curve.rotation_per_iterate;
        j["orientation"] = r.curve.orientation;
        j["transverse_rate"] = r.transverse_rate;
        j["stability"] = r.attracting ? "attracting" : "repelling";
        j["hausdorff_to_predicted"] = r.hausdorff_to_predicted;
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json octant_report_to_json(const tori::OctantReport& r) {
    json j = {{"signs", r.signs},
              {"orientation", r.orientation},
              {"found", r.found}};
    if (r.found) {
        j["stability"] = r.attracting ? "attracting" : "repelling";
        j["transverse_rate"] = r.transverse_rate;
        j["invariance_residual"] = r.curve.invariance_residual;
        j["hausdorff_to_base"] = r.hausdorff_to_base;
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

// One verdict per line so long sweeps stream and partial bundles survive.
inline std::string reports_to_jsonl(const tori::SweepResult& sw) {
    std::string out;
    for (const auto& r : sw.reports) out += tori_report_to_json(r).dump() + "\n";
    json tail = {{"summary",
                  {{"all_found", sw.all_found},
                   {"slope", sw.slope},
                   {"correlation", sw.correlation}}}};
    out += tail.dump() + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Point dumps.  Curves print as closed polylines sampled uniformly in the
// curve parameter.

inline std::string curve_to_csv(const tori::InvariantCurve& c, int samples = 512) {
    if (samples < 2) throw InputError("curve dump needs at least two samples");
    std::string out = "phi,r,z\n";
    char buf[96];
    for (int i = 0; i < samples; ++i) {
        double phi = tori::TWO_PI * i / samples;
        auto p = c.eval(phi);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", phi, p[0], p[1]);
        out += buf;
    }
    return out;
}

inline std::string points_to_csv(std::span<const std::array<double, 2>> pts,
                                 const std::string& header = "r,z") {
    std::string out = header + "\n";
    char buf[64];
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], p[1]);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bound tables and doubling chains.

inline json bound_table_to_json(const doubling::BoundTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"m", r.m.get_str()},
                        {"lower_bound", r.bound.get_str()},
                        {"provenance", r.provenance}});
    return {{"rows", std::move(rows)}};
}

inline std::vector<doubling::HilbertBound> bounds_from_json(const json& j) {
    if (!j.is_array()) throw InputError("bounds file must be a JSON array");
    std::vector<doubling::HilbertBound> out;
    for (const json& e : j) {
        doubling::HilbertBound hb;
        hb.k = e.at("k").get<int>();
        hb.bound = e.at("bound").get<long>();
        hb.provenance = e.value("provenance", std::string("user supplied"));
        hb.use_for_rows = e.value("use_for_rows", true);
        out.push_back(std::move(hb));
    }
    return out;
}

inline json doubling_chain_to_json(std::span<const doubling::DoublingStep> chain) {
    json steps = json::array();
    for (const auto& s : chain) {
        steps.push_back({{"d", s.d},
                         {"degree_in", s.degree_in},
                         {"degree_out", s.degree_out},
                         {"degree_attained", s.degree_attained},
                         {"tori_in", s.tori_in.get_str()},
                         {"tori_out", s.tori_out.get_str()},
                         {"identity_verified", true}});
    }
    return {{"steps", std::move(steps)}};
}

} // namespace torusforge::io
