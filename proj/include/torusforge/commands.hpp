#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cycles.hpp"
#include "doubling.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "odeint.hpp"
#include "svg.hpp"
#include "tori.hpp"
#include "vfields.hpp"

namespace torusforge::cli {

using nlohmann::json;

// Fully parsed invocation.  Every command is a function of this record plus
// the referenced files, so runs are reproducible bit for bit.
struct RunConfig {
    std::string command;
    std::filesystem::path input;
    std::filesystem::path out_dir = "out";
    std::vector<std::string> eps;   // exact literals: "0.08", "2/25", "1/50"
    std::optional<double> tol_rel;
    std::optional<double> tol_abs;
    std::string octants;            // "", "all", or comma separated sign triples
    std::vector<std::string> emit = {"csv", "json"};
    std::uint64_t seed = 0;
    int reps = 1;                   // pullback repetitions for `double`
};

namespace detail {

inline bool wants(const RunConfig& cfg, std::string_view what) {
    return std::find(cfg.emit.begin(), cfg.emit.end(), what) != cfg.emit.end();
}

inline odeint::IntegratorConfig integrator_for(const RunConfig& cfg) {
    auto integ = tori::default_integrator();
    if (cfg.tol_rel) integ.rel_tol = *cfg.tol_rel;
    if (cfg.tol_abs) integ.abs_tol = *cfg.tol_abs;
    return integ;
}

inline Rational parse_eps_exact(const std::string& s) {
    Rational r = Rational::parse(s);
    if (!(Rational(0) < r)) throw InputError("eps must be positive, got '" + s + "'");
    return r;
}

// Descending, deduplicated sweep list; empty falls back to the default ladder.
// Exact rationals are the source of truth: every double the pipeline sees is
// produced by the same to_double call, so later exact-match lookups (the
// octant stage anchors at the largest eps) cannot miss by a rounding ulp.
inline std::vector<Rational> sweep_eps_exact(const RunConfig& cfg) {
    std::vector<Rational> out;
    if (cfg.eps.empty()) {
        out = {Rational(2, 25), Rational(1, 25), Rational(1, 50), Rational(1, 100)};
        return out;
    }
    out.reserve(cfg.eps.size());
    for (const auto& s : cfg.eps) out.push_back(parse_eps_exact(s));
    std::sort(out.begin(), out.end(), [](const Rational& a, const Rational& b) { return b < a; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<double> sweep_eps(const RunConfig& cfg) {
    std::vector<double> out;
    for (const auto& r : sweep_eps_exact(cfg)) out.push_back(r.to_double());
    // distinct rationals can collapse onto one double
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::string eps_tag(double e) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", e);
    return buf;
}

inline std::vector<doubling::Signs> parse_octants(const std::string& spec, int d) {
    if (spec == "all") return doubling::all_octants(d);
    std::vector<doubling::Signs> out;
    size_t pos = 0;
    while (pos <= spec.size()) {
        size_t comma = spec.find(',', pos);
        std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        if (static_cast<int>(tok.size()) != d + 1)
            throw InputError("octant '" + tok + "' must list exactly " + std::to_string(d + 1) +
                             " signs");
        doubling::Signs s;
        for (char c : tok) {
            if (c == '+') s.push_back(+1);
            else if (c == '-') s.push_back(-1);
            else throw InputError("octant signs use only '+' and '-', got '" + tok + "'");
        }
        out.push_back(std::move(s));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw InputError("empty octant list");
    return out;
}

// ---------------------------------------------------------------------------
// Seeded draws for the selftest.

inline Rational random_coeff(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
    for (;;) {
        Rational r(num(rng), den(rng));
        if (!r.is_zero()) return r;
    }
}

inline Poly random_poly(std::mt19937_64& rng, int nvars, int max_deg) {
    std::uniform_int_distribution<int> nterms(1, 6), expd(0, max_deg);
    Poly p(nvars);
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        Exponents e(nvars);
        for (;;) {
            int total = 0;
            for (int v = 0; v < nvars; ++v) {
                e[v] = expd(rng);
                total += e[v];
            }
            if (total <= max_deg) break;
        }
        p += Poly::monomial(nvars, e, random_coeff(rng));
    }
    return p;
}

inline vfields::SpatialField random_spatial(std::mt19937_64& rng, int nspace, int max_deg) {
    std::vector<Poly> comps;
    comps.reserve(nspace);
    for (int i = 0; i < nspace; ++i) comps.push_back(random_poly(rng, nspace, max_deg));
    return vfields::SpatialField(std::move(comps), nspace, false);
}

inline vfields::PlanarField random_planar_field(std::mt19937_64& rng, int max_deg = 4) {
    return vfields::PlanarField(random_poly(rng, 2, max_deg), random_poly(rng, 2, max_deg));
}

// Planar system with a unit-circle cycle centered at (2, 0): angular speed 1,
// radial contraction r(1 - r^2) about that center.  Known in closed form, so
// it anchors the dynamic consistency checks.
inline vfields::PlanarField reference_system() {
    std::vector<std::string> names = {"x", "y"};
    return vfields::PlanarField(Poly::parse("-y + (x-2)*(1 - (x-2)^2 - y^2)", names),
                                Poly::parse("(x-2) + y*(1 - (x-2)^2 - y^2)", names));
}

} // namespace detail

// ---------------------------------------------------------------------------
// lift: planar system file -> rotational 3D family + degree report.

inline int cmd_lift(const RunConfig& cfg) {
    auto in = io::planar_from_json(io::read_json_file(cfg.input));
    auto f3 = vfields::lift_to_3d(in.field);

    auto out_path = cfg.out_dir / "lifted.json";
    io::write_json_file(out_path, io::spatial_to_json(f3));

    // the written artifact must reproduce the in-memory construction exactly
    auto back = io::spatial_from_json(io::read_json_file(out_path));
    if (back.nspace != f3.nspace || back.has_eps != f3.has_eps)
        throw InternalError("lift round trip changed the field shape");
    for (size_t i = 0; i < f3.components.size(); ++i)
        if (!(back.components[i] - f3.components[i]).is_zero())
            throw InternalError("lift round trip changed component " + std::to_string(i));

    int deg_in = 0;
    if (auto d = in.field.P.total_degree()) deg_in = std::max(deg_in, *d);
    if (auto d = in.field.Q.total_degree()) deg_in = std::max(deg_in, *d);
    auto deg_out = f3.space_degree();

    json report = {{"input", cfg.input.string()},
                   {"planar_degree", deg_in},
                   {"lifted_degree", deg_out ? json(*deg_out) : json()},
                   {"variables", f3.var_names()},
                   {"round_trip_verified", true}};
    io::write_json_file(cfg.out_dir / "degree_report.json", report);

    std::printf("lifted planar degree %d into spatial degree %d\n", deg_in,
                deg_out.value_or(0));
    std::printf("wrote %s\n", out_path.string().c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// double: k verified squaring pullbacks of a 3D field.

inline int cmd_double(const RunConfig& cfg) {
    json root = io::read_json_file(cfg.input);
    vfields::SpatialField field = root.contains("spatial")
                                      ? io::spatial_from_json(root)
                                      : vfields::lift_to_3d(io::planar_from_json(root).field);

    if (field.has_eps) {
        if (cfg.eps.empty())
            throw InputError("input carries an unbound perturbation parameter; supply --eps");
        if (cfg.eps.size() > 1) throw InputError("double binds exactly one eps value");
        field = vfields::bind_eps(field, detail::parse_eps_exact(cfg.eps[0]));
    } else if (!cfg.eps.empty()) {
        throw InputError("input has no perturbation parameter to bind");
    }

    if (cfg.reps < 0) throw InputError("repetition count must be nonnegative");
    const int d = field.nspace - 1;

    // the degree doubles each step; project the chain before building it
    auto deg0 = field.space_degree();
    if (!deg0) throw InputError("cannot double the zero field");
    long projected = *deg0;
    for (int k = 0; k < cfg.reps; ++k) projected = 2 * projected + d;
    if (projected > 200)
        throw InputError("doubling " + std::to_string(cfg.reps) + " times reaches degree " +
                         std::to_string(projected) + ", past the built-in guard of 200");

    std::vector<doubling::DoublingStep> chain;
    mpz_class tori = 1;
    for (int k = 0; k < cfg.reps; ++k) {
        auto step = doubling::make_doubling_step(field, d, tori);
        field = step.X1;
        tori = step.tori_out;
        std::printf("step %d: degree %d -> %d, invariant tori %s -> %s\n", k + 1,
                    step.degree_in, step.degree_out, step.tori_in.get_str().c_str(),
                    step.tori_out.get_str().c_str());
        chain.push_back(std::move(step));
    }
    if (cfg.reps == 0) std::printf("no pullback applied; field written unchanged\n");

    io::write_json_file(cfg.out_dir / "doubled.json", io::spatial_to_json(field));
    io::write_json_file(cfg.out_dir / "chain.json", io::doubling_chain_to_json(chain));
    std::printf("wrote %s (%zu verified steps)\n",
                (cfg.out_dir / "doubled.json").string().c_str(), chain.size());
    return 0;
}

// ---------------------------------------------------------------------------
// tables: torus-count lower bounds + the doubling-sequence certificate.

inline int cmd_tables(const RunConfig& cfg) {
    std::vector<doubling::HilbertBound> bounds =
        cfg.input.empty() ? doubling::builtin_hilbert_bounds()
                          : io::bounds_from_json(io::read_json_file(cfg.input));

    auto table = doubling::torus_bound_table(bounds);
    doubling::BoundTable cert{doubling::sequence_certificate_rows(6, 4, 2, 20)};

    if (detail::wants(cfg, "csv")) {
        io::write_text_file(cfg.out_dir / "torus_bounds.csv", table.to_csv());
        io::write_text_file(cfg.out_dir / "sequence_certificate.csv", cert.to_csv());
    }
    if (detail::wants(cfg, "json")) {
        io::write_json_file(cfg.out_dir / "torus_bounds.json", io::bound_table_to_json(table));
        io::write_json_file(cfg.out_dir / "sequence_certificate.json",
                            io::bound_table_to_json(cert));
    }
    std::printf("wrote %zu bound rows and %zu certificate rows to %s\n", table.rows.size(),
                cert.rows.size(), cfg.out_dir.string().c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// verify: cycles -> lift -> eps sweep -> certified section curves, with an
// optional doubled-field octant stage anchored at the largest eps.

namespace detail {

inline std::vector<std::array<double, 2>> sample_closed(const tori::InvariantCurve& c,
                                                        int n = 256) {
    std::vector<std::array<double, 2>> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(c.eval(tori::TWO_PI * i / n));
    return pts;
}

inline void write_portraits(const RunConfig& cfg, const std::string& prefix,
                            const vfields::SpatialField& f3, const tori::SweepResult& sw,
                            bool backward, const odeint::IntegratorConfig& integ) {
    for (const auto& r : sw.reports) {
        if (!r.found) continue;
        svg::Portrait pic;
        pic.title = "section portrait, eps = " + eps_tag(r.eps);
        pic.lines.push_back({sample_closed(sw.predicted), "#888888", 1.2, true, true});
        pic.lines.push_back({sample_closed(r.curve), "#000000", 1.6, true, false});

        // approach transient from a radially displaced start
        tori::StroboscopicMap map(f3, r.eps, integ);
        svg::Dots dots;
        dots.color = "#bb3333";
        dots.radius = 2.0;
        auto p = sw.predicted.eval(0.0);
        p[0] *= 1.15;
        for (int i = 0; i < 48; ++i) {
            dots.pts.push_back(p);
            p = backward ? map.backward(p) : map.forward(p);
        }
        pic.dots.push_back(std::move(dots));
        io::write_text_file(cfg.out_dir / (prefix + "portrait_eps_" + eps_tag(r.eps) + ".svg"),
                            svg::render(pic));
    }
}

// Doubled-field verification across the requested octants.  The torus is
// translated onto the quarter grid so that every coordinate clears the chart
// wall at -1 by at least 1/2, then one exact pullback is verified and the
// section curves are certified octant by octant.
inline bool octant_stage(const RunConfig& cfg, const vfields::SpatialField& f3,
                         const cycles::LimitCycle& lc, const tori::SweepResult& sw,
                         json& summary) {
    const Rational eps0 = sweep_eps_exact(cfg).front();
    const double e0 = eps0.to_double();
    const tori::ToriReport* rep = nullptr;
    for (const auto& r : sw.reports)
        if (r.eps == e0) rep = &r;
    if (!rep || !rep->found)
        throw CertificationError("octant stage anchors at eps = " + eps0.to_string() +
                                 ", which was not certified in the sweep");

    double r_max = 0, z_min = std::numeric_limits<double>::infinity();
    for (const auto& p : sample_closed(rep->curve, 512)) {
        r_max = std::max(r_max, p[0]);
        z_min = std::min(z_min, p[1]);
    }
    auto quarter_above = [](double x) {
        return Rational(static_cast<long>(std::floor(4 * x)) + 1, 4);
    };
    // torus spans [-r_max, r_max] in both rotating coordinates
    Rational tx = quarter_above(r_max - 0.5);
    Rational tz = quarter_above(-z_min - 0.5);

    auto bound = vfields::bind_eps(f3, eps0);
    std::vector<Rational> shift = {tx, tx, tz};
    auto step = doubling::make_doubling_step(vfields::translate(bound, shift), 2, 1);
    auto base = tori::translated(rep->curve, {tx.to_double(), tz.to_double()});

    tori::OctantVerifyParams vp;
    vp.section_y = tx.to_double();
    vp.base_attracting = lc.attracting;
    vp.integ = integrator_for(cfg);

    auto octs = parse_octants(cfg.octants, 2);
    auto reports = tori::verify_doubled_tori(step, base, octs, vp);

    std::string jsonl;
    bool ok = true;
    int attracting = 0;
    for (const auto& r : reports) {
        ok = ok && r.found;
        if (r.found && r.attracting) ++attracting;
        jsonl += io::octant_report_to_json(r).dump() + "\n";
        std::string sgn;
        for (int s : r.signs) sgn += s > 0 ? '+' : '-';
        std::string verdict = r.found
                                  ? (r.attracting ? std::string("certified attracting")
                                                  : std::string("certified repelling"))
                                  : "failed: " + r.note;
        std::printf("octant %s orientation %+d: %s\n", sgn.c_str(), r.orientation,
                    verdict.c_str());
    }
    json tail = {{"summary",
                  {{"eps", eps0.to_string()},
                   {"octants", reports.size()},
                   {"all_found", ok},
                   {"attracting", attracting},
                   {"translation", {tx.to_string(), tx.to_string(), tz.to_string()}}}}};
    io::write_text_file(cfg.out_dir / "octants.jsonl", jsonl + tail.dump() + "\n");
    summary["octants_certified"] = ok;
    return ok;
}

} // namespace detail

inline int cmd_verify(const RunConfig& cfg) {
    auto in = io::planar_from_json(io::read_json_file(cfg.input));
    if (in.guesses.empty())
        throw InputError("verify needs at least one cycle guess in the input file");

    auto eps = detail::sweep_eps(cfg);
    auto integ = detail::integrator_for(cfg);

    cycles::CycleOptions copt;
    if (cfg.tol_rel) copt.integ.rel_tol = *cfg.tol_rel;
    if (cfg.tol_abs) copt.integ.abs_tol = *cfg.tol_abs;

    // locate the cycles reachable from the guesses, deduplicated by fixed point
    std::vector<cycles::LimitCycle> found;
    json cycle_log = json::array();
    for (const auto& g : in.guesses) {
        json entry = {{"guess", {g[0], g[1]}}};
        try {
            auto lc = cycles::find_limit_cycle(in.field, g, copt);
            for (const auto& s : lc.samples)
                if (!in.field.K.contains(s[0], s[1]))
                    throw CertificationError("cycle leaves the certification box K");
            bool dup = false;
            for (const auto& other : found)
                dup = dup || std::hypot(other.point[0] - lc.point[0],
                                        other.point[1] - lc.point[1]) < 1e-6;
            entry["period"] = lc.period;
            entry["multiplier"] = lc.multiplier;
            entry["stability"] = lc.attracting ? "attracting" : "repelling";
            entry["duplicate"] = dup;
            if (!dup) found.push_back(std::move(lc));
        } catch (const CertificationError& e) {
            entry["error"] = e.what();
        }
        cycle_log.push_back(std::move(entry));
    }

    json summary = {{"input", cfg.input.string()}, {"eps", eps}, {"guesses", cycle_log}};
    json sweeps = json::array();
    auto finish = [&](bool ok) {
        summary["sweeps"] = sweeps;
        summary["certified"] = ok;
        io::write_json_file(cfg.out_dir / "summary.json", summary);
    };

    if (found.empty()) {
        finish(false);
        throw CertificationError("no limit cycle certified from the provided guesses");
    }

    auto f3 = vfields::lift_to_3d(in.field);
    bool all_ok = true;
    try {
        for (size_t ci = 0; ci < found.size(); ++ci) {
            const auto& lc = found[ci];
            std::string prefix = "cycle" + std::to_string(ci) + "_";
            io::write_json_file(cfg.out_dir / (prefix + "cycle.json"), io::cycle_to_json(lc));

            auto sw = tori::epsilon_sweep(f3, lc, eps, {}, integ);
            io::write_text_file(cfg.out_dir / (prefix + "reports.jsonl"),
                                io::reports_to_jsonl(sw));
            if (detail::wants(cfg, "csv")) {
                io::write_text_file(cfg.out_dir / (prefix + "predicted_curve.csv"),
                                    io::curve_to_csv(sw.predicted));
                for (const auto& r : sw.reports)
                    if (r.found)
                        io::write_text_file(cfg.out_dir / (prefix + "curve_eps_" +
                                                           detail::eps_tag(r.eps) + ".csv"),
                                            io::curve_to_csv(r.curve));
            }
            if (detail::wants(cfg, "svg"))
                detail::write_portraits(cfg, prefix, f3, sw, !lc.attracting, integ);

            for (const auto& r : sw.reports) {
                if (r.found)
                    std::printf("cycle %zu eps=%s: certified %s, rate=%.6g, "
                                "residual=%.3g, hausdorff=%.3g\n",
                                ci, detail::eps_tag(r.eps).c_str(),
                                r.attracting ? "attracting" : "repelling", r.transverse_rate,
                                r.curve.invariance_residual, r.hausdorff_to_predicted);
                else
                    std::printf("cycle %zu eps=%s: NOT certified (%s)\n", ci,
                                detail::eps_tag(r.eps).c_str(), r.note.c_str());
            }
            std::printf("cycle %zu: slope=%g correlation=%g\n", ci, sw.slope, sw.correlation);

            all_ok = all_ok && sw.all_found;
            sweeps.push_back({{"cycle", ci},
                              {"all_found", sw.all_found},
                              {"slope", sw.slope},
                              {"correlation", sw.correlation}});

            if (ci == 0 && !cfg.octants.empty())
                all_ok = detail::octant_stage(cfg, f3, lc, sw, summary) && all_ok;
        }
    } catch (...) {
        finish(false);
        throw;
    }

    finish(all_ok);
    if (!all_ok)
        throw CertificationError("not every requested torus was certified; see summary.json");
    std::printf("certified %zu cycle(s) across %zu eps values; bundle in %s\n", found.size(),
                eps.size(), cfg.out_dir.string().c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// selftest: seeded consistency checks across the whole pipeline.

inline int cmd_selftest(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    int failed = 0;
    auto check = [&](const char* name, auto&& body) {
        try {
            body();
            std::printf("ok - %s\n", name);
        } catch (const std::exception& e) {
            ++failed;
            std::printf("FAIL - %s: %s\n", name, e.what());
        }
    };

    check("polynomial ring laws hold on random samples", [&] {
        for (int i = 0; i < 20; ++i) {
            Poly a = detail::random_poly(rng, 3, 4);
            Poly b = detail::random_poly(rng, 3, 4);
            Poly c = detail::random_poly(rng, 3, 4);
            if (!((a + b) * c - (a * c + b * c)).is_zero())
                throw InternalError("distributivity failed");
            if (!((a * b) * c - a * (b * c)).is_zero())
                throw InternalError("associativity failed");
        }
    });

    check("composition is a ring homomorphism", [&] {
        for (int i = 0; i < 10; ++i) {
            Poly a = detail::random_poly(rng, 2, 3);
            Poly b = detail::random_poly(rng, 2, 3);
            std::vector<Poly> s = {detail::random_poly(rng, 2, 2),
                                   detail::random_poly(rng, 2, 2)};
            if (!((a + b).compose(s) - (a.compose(s) + b.compose(s))).is_zero())
                throw InternalError("compose does not respect addition");
            if (!((a * b).compose(s) - (a.compose(s) * b.compose(s))).is_zero())
                throw InternalError("compose does not respect multiplication");
        }
    });

    check("squaring pullback identity on random fields", [&] {
        for (int i = 0; i < 6; ++i) {
            int d = 1 + i % 2;
            auto X0 = detail::random_spatial(rng, d + 1, 3);
            auto X1 = doubling::pullback_double(X0, d);
            if (!doubling::verify_pullback_identity(X0, X1, d))
                throw InternalError("pullback identity failed");
        }
    });

    check("guiding system reconstructs its planar source", [&] {
        for (int i = 0; i < 8; ++i) {
            auto f = detail::random_planar_field(rng);
            if (!vfields::guiding_conjugacy_check(vfields::derive_guiding(f), f))
                throw InternalError("guiding conjugacy failed");
        }
    });

    check("degree and torus-count ledgers are exact", [&] {
        doubling::sequence_certificate_rows(6, 4, 2, 20); // self-verifying rows
        std::uniform_int_distribution<long> m0s(2, 9);
        for (int d = 0; d <= 3; ++d) {
            long m0 = m0s(rng);
            mpz_class m = m0;
            for (int k = 0; k <= 12; ++k) {
                if (doubling::sequence(m0, 1, d, k).m != m)
                    throw InternalError("degree recurrence mismatch");
                m = 2 * m + d;
            }
        }
    });

    check("integrator closes the harmonic oscillator orbit", [&] {
        odeint::Rhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
            dy[0] = -y[1];
            dy[1] = y[0];
        };
        auto yf = odeint::integrate_to(rhs, std::vector<double>{1.0, 0.0}, 0.0, tori::TWO_PI,
                                       detail::integrator_for(cfg));
        double err = std::hypot(yf[0] - 1.0, yf[1]);
        if (err > 1e-9) throw InternalError("period advance missed by " + std::to_string(err));
    });

    check("angular and time parametrized return maps agree", [&] {
        auto f3 = vfields::lift_to_3d(detail::reference_system());
        tori::StroboscopicMap map(f3, 0.05, detail::integrator_for(cfg));
        auto bound = vfields::bind_eps(f3, Rational(1, 20));
        std::uniform_real_distribution<double> ur(1.1, 1.5), uz(-0.3, 0.3);
        for (int i = 0; i < 3; ++i) {
            std::array<double, 2> p = {ur(rng), uz(rng)};
            auto a = map.forward(p);
            auto b = tori::cartesian_return(bound, p, detail::integrator_for(cfg));
            double d = std::hypot(a[0] - b[0], a[1] - b[1]);
            if (d > 1e-8)
                throw InternalError("formulations disagree by " + std::to_string(d));
        }
    });

    check("bound table carries its headline row", [&] {
        auto t = doubling::torus_bound_table(doubling::builtin_hilbert_bounds());
        bool hit = false;
        for (const auto& r : t.rows) hit = hit || (r.m == 88 && r.bound == 2272);
        if (!hit) throw InternalError("row m=88, bound 2272 missing");
    });

    std::printf("%s\n", failed ? "selftest: FAILURES PRESENT" : "selftest: all checks passed");
    if (failed) throw InternalError(std::to_string(failed) + " selftest check(s) failed");
    return 0;
}

} // namespace torusforge::cli
