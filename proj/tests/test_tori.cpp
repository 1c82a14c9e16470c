#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "torusforge/cycles.hpp"
#include "torusforge/doubling.hpp"
#include "torusforge/tori.hpp"
#include "torusforge/vfields.hpp"

using namespace torusforge;
using namespace torusforge::tori;

namespace {

constexpr double PI = std::numbers::pi;

// Transverse contraction exponent of the reference torus per map iterate:
// the averaged cycle contracts at rate -2*sqrt(3) per unit time and one
// stroboscopic period advances averaged time by 2*pi*eps.
double reference_rate(double eps) { return std::exp(-4.0 * PI * std::sqrt(3.0) * eps); }

vfields::SpatialField circle_lift() { return vfields::lift_to_3d(tftest::circle_system()); }

const cycles::LimitCycle& circle_cycle() {
    static cycles::LimitCycle c = cycles::find_limit_cycle(tftest::circle_system(), {2.5, 0.0});
    return c;
}

// Synthetic section map: rigid rotation by `angle` with radial contraction
// factor 1/2 onto the unit circle.  Exact inverse available.
SectionMap rotation_map(double angle) {
    SectionMap m;
    m.forward = [angle](const std::array<double, 2>& p) {
        double a = std::atan2(p[1], p[0]) + angle;
        double r = 1.0 + 0.5 * (std::hypot(p[0], p[1]) - 1.0);
        return std::array<double, 2>{r * std::cos(a), r * std::sin(a)};
    };
    m.backward = [angle](const std::array<double, 2>& p) {
        double a = std::atan2(p[1], p[0]) - angle;
        double r = 1.0 + 2.0 * (std::hypot(p[0], p[1]) - 1.0);
        return std::array<double, 2>{r * std::cos(a), r * std::sin(a)};
    };
    return m;
}

fourier::Curve2 analytic_circle(double radius) {
    fourier::Curve2 c;
    c.x.a = {radius};
    c.x.b = {0.0};
    c.y.a = {0.0};
    c.y.b = {radius};
    return c;
}

} // namespace

TEST_CASE("rotational lift splits back into its planar pair") {
    auto f = tftest::circle_system();
    auto sys = split_rotational_lift(vfields::lift_to_3d(f));
    CHECK((sys.P - f.P).is_zero());
    CHECK((sys.Q - f.Q).is_zero());

    std::mt19937_64 rng(20260816);
    for (int i = 0; i < 25; ++i) {
        CAPTURE(i);
        auto g = tftest::random_planar(rng, 5);
        auto s = split_rotational_lift(vfields::lift_to_3d(g));
        CHECK((s.P - g.P).is_zero());
        CHECK((s.Q - g.Q).is_zero());
    }
}

TEST_CASE("fields that are not rotational lifts are rejected") {
    auto f3 = circle_lift();
    const int N = 4;
    Poly X = Poly::variable(N, 0), Y = Poly::variable(N, 1);
    Poly E = Poly::variable(N, 3);

    auto tampered = [&](int slot, const Poly& extra) {
        std::vector<Poly> comps = f3.components;
        comps[slot] += extra;
        return vfields::SpatialField(std::move(comps), 3, true);
    };

    // first component must be exactly -y
    CHECK_THROWS_AS(split_rotational_lift(tampered(0, X)), InputError);
    // eps term without the required y factor
    CHECK_THROWS_AS(split_rotational_lift(tampered(1, E)), InputError);
    // odd y power hidden inside the z component
    CHECK_THROWS_AS(split_rotational_lift(tampered(2, E * Y * Y * Y)), InputError);
    // depends on the angle, not only on x^2 + y^2
    CHECK_THROWS_AS(split_rotational_lift(tampered(1, E * Y * (X * X - Y * Y))), InputError);
    // perturbation already bound
    CHECK_THROWS_AS(split_rotational_lift(vfields::bind_eps(f3, Rational(1, 100))), InputError);
    // wrong dimension
    vfields::SpatialField planar2({Poly::variable(3, 0), Poly::variable(3, 1)}, 2, true);
    CHECK_THROWS_AS(split_rotational_lift(planar2), InputError);
}

TEST_CASE("unperturbed stroboscopic map is the identity exactly") {
    StroboscopicMap m(circle_lift(), 0.0);
    const std::array<double, 2> seeds[] = {{1.2, 0.3}, {1.7, -0.8}, {0.4, 2.0}};
    for (const auto& s : seeds) {
        auto a = m.forward(s), b = m.backward(s);
        CHECK(a[0] == s[0]);
        CHECK(a[1] == s[1]);
        CHECK(b[0] == s[0]);
        CHECK(b[1] == s[1]);
    }
    CHECK_THROWS_AS(StroboscopicMap(circle_lift(), -0.1), InputError);
}

TEST_CASE("theta map agrees with the Cartesian first return") {
    auto f3 = circle_lift();
    StroboscopicMap map(f3, 0.05);
    auto bound = vfields::bind_eps(f3, Rational(1, 20));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ur(1.1, 1.8), uz(-0.5, 0.5);
    for (int i = 0; i < 20; ++i) {
        std::array<double, 2> p = {ur(rng), uz(rng)};
        CAPTURE(p[0], p[1]);
        auto a = map.forward(p);
        auto b = cartesian_return(bound, p);
        CHECK(std::abs(a[0] - b[0]) <= 1e-8);
        CHECK(std::abs(a[1] - b[1]) <= 1e-8);
        // the backward map inverts the forward map
        auto back = map.backward(a);
        CHECK(std::abs(back[0] - p[0]) <= 1e-9);
        CHECK(std::abs(back[1] - p[1]) <= 1e-9);
    }
}

TEST_CASE("predicted curve is the radial square root of the cycle") {
    const auto& c = circle_cycle();
    auto pred = predicted_curve(c);
    CHECK(pred.modes_used == 64);
    CHECK(pred.fit_residual <= 1e-8);
    CHECK(pred.orientation == 1);

    // samples advance at unit angular speed from the anchor phase
    double alpha = std::atan2(c.samples[0][1], c.samples[0][0] - 2.0);
    for (int i = 0; i <= 256; ++i) {
        double ph = TWO_PI * i / 256.0;
        auto p = pred.eval(ph);
        CAPTURE(i);
        CHECK(std::abs(p[0] - std::sqrt(2.0 + std::cos(ph + alpha))) <= 1e-8);
        CHECK(std::abs(p[1] - std::sin(ph + alpha)) <= 1e-8);
    }
}

TEST_CASE("predicted curve handles degenerate and invalid cycles") {
    // a constant cycle collapses to its single section point
    cycles::LimitCycle flat;
    flat.samples.assign(64, {4.0, 0.0});
    auto pc = predicted_curve(flat);
    CHECK(pc.modes_used == 0);
    CHECK(std::abs(pc.eval(1.234)[0] - 2.0) <= 1e-12);
    CHECK(std::abs(pc.eval(2.5)[1]) <= 1e-12);
    CHECK(pc.fit_residual <= 1e-12);

    // the radial substitution requires u > 0 throughout
    cycles::LimitCycle bad;
    bad.samples = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(predicted_curve(bad), InputError);
    bad.samples = {{1.0, 0.0}, {-0.5, 1.0}};
    CHECK_THROWS_AS(predicted_curve(bad), InputError);
    cycles::LimitCycle empty;
    CHECK_THROWS_AS(predicted_curve(empty), InputError);
}

TEST_CASE("guard box brackets the predicted curve with margin") {
    auto pred = predicted_curve(circle_cycle());
    auto g = guard_box_for(pred);
    // r spans [1, sqrt(3)], z spans [-1, 1]; box is 1.5x the extents plus
    // 0.5.  The extents come from sampling the curve on a 512 grid, so they
    // undershoot the analytic extrema by O(grid^2 * curvature).
    double rmid = (1.0 + std::sqrt(3.0)) / 2, rhalf = (std::sqrt(3.0) - 1.0) / 2;
    CHECK(std::abs(g[0][0] - (rmid - 1.5 * rhalf - 0.5)) <= 1e-4);
    CHECK(std::abs(g[1][0] - (rmid + 1.5 * rhalf + 0.5)) <= 1e-4);
    CHECK(std::abs(g[0][1] - (-2.0)) <= 1e-4);
    CHECK(std::abs(g[1][1] - 2.0) <= 1e-4);
    for (int i = 0; i < 64; ++i) {
        auto p = pred.eval(TWO_PI * i / 64.0);
        CHECK(p[0] > g[0][0]);
        CHECK(p[0] < g[1][0]);
        CHECK(p[1] > g[0][1]);
        CHECK(p[1] < g[1][1]);
    }
}

TEST_CASE("stroboscopic images of the predicted curve stay on it") {
    // On every cylinder x^2 + y^2 = u(s), z = v(s) the lift reduces to a
    // nonnegative time change of the planar field, so the curve predicted
    // from the planar cycle is invariant for the exact flow at every eps,
    // not merely up to the second order averaging error.  The sup distance
    // of one-step images must therefore sit at the fit's noise floor.
    auto pred = predicted_curve(circle_cycle());
    auto f3 = circle_lift();
    auto sup_dist = [&](double eps) {
        StroboscopicMap m(f3, eps);
        double worst = 0;
        for (int i = 0; i < 16; ++i) {
            auto img = m.forward(pred.eval(TWO_PI * i / 16.0));
            worst = std::max(worst, fourier::distance_to(pred.curve, img));
        }
        return worst;
    };
    CHECK(sup_dist(0.05) <= 1e-7);
    CHECK(sup_dist(0.0125) <= 1e-7);
}

TEST_CASE("synthetic rotation map: detection, rates, and locking") {
    DetectParams prm;
    prm.require_positive_first = false;

    // irrational rotation: the unit circle is recovered to spectral accuracy
    auto irr = rotation_map(1.0);
    auto curve = detect_invariant_curve(irr, {1.3, 0.0}, prm);
    CHECK(curve.invariance_residual <= 1e-9);
    CHECK(fourier::hausdorff(curve.curve, analytic_circle(1.0)) <= 1e-7);
    // the angular mean carries a bias quadratic in the offset between the
    // finite cloud's centroid and the true center, here about 5e-3
    CHECK(std::abs(curve.rotation_per_iterate - 1.0) <= 1e-4);
    CHECK(curve.orientation == 1);

    double fwd = transverse_factor(irr, curve, false);
    double bwd = transverse_factor(irr, curve, true);
    CHECK(std::abs(fwd - 0.5) <= 1e-4);
    CHECK(std::abs(bwd - 2.0) <= 4e-4);
    CHECK(std::abs(fwd * bwd - 1.0) <= 1e-5);
    auto rv = transverse_rate(irr, curve);
    CHECK(rv.attracting);
    CHECK(std::abs(rv.rate - 0.5) <= 1e-4);

    // clockwise variant flips orientation and rotation sign
    auto cw = rotation_map(-1.0);
    auto ccurve = detect_invariant_curve(cw, {1.3, 0.0}, prm);
    CHECK(ccurve.orientation == -1);
    CHECK(std::abs(ccurve.rotation_per_iterate + 1.0) <= 1e-4);

    // rational rotation locks onto 7 points and is reported inconclusive
    auto locked = rotation_map(TWO_PI * 3.0 / 7.0);
    CHECK_THROWS_AS(detect_invariant_curve(locked, {1.3, 0.0}, prm), CertificationError);
    try {
        detect_invariant_curve(locked, {1.3, 0.0}, prm);
    } catch (const CertificationError& e) {
        CHECK(std::string(e.what()).find("7 distinct points") != std::string::npos);
        CHECK(std::string(e.what()).find("inconclusive") != std::string::npos);
    }

    // parameter validation
    DetectParams thin = prm;
    thin.samples = 10;
    CHECK_THROWS_AS(detect_invariant_curve(irr, {1.3, 0.0}, thin), InputError);
    RateParams rp;
    rp.points = 8;
    CHECK_THROWS_AS(transverse_factor(irr, curve, false, rp), InputError);
    SectionMap fwd_only;
    fwd_only.forward = irr.forward;
    DetectParams back = prm;
    back.backward = true;
    CHECK_THROWS_AS(detect_invariant_curve(fwd_only, {1.3, 0.0}, back), InputError);
}

TEST_CASE("invariant curve detected and certified at eps 0.02") {
    auto f3 = circle_lift();
    auto pred = predicted_curve(circle_cycle());
    StroboscopicMap map(f3, 0.02);
    DetectParams prm;
    prm.guard = guard_box_for(pred);

    auto curve = detect_invariant_curve(map, pred.eval(0.0), prm);
    CHECK(curve.invariance_residual <= 1e-6);
    CHECK(curve.fit_residual <= 1e-6);
    CHECK(curve.modes_used == 32);
    CHECK(curve.orientation == 1);

    // the predicted curve is exactly invariant for this lift (the flow is a
    // time change of the planar field on each cylinder), so the detected
    // curve lands on top of it at the noise floor
    double h = hausdorff(curve, pred);
    CHECK(h <= 1e-8);

    // rotation per iterate: one averaged period advances 2 pi eps sqrt(3)
    CHECK(std::abs(curve.rotation_per_iterate - TWO_PI * 0.02 * std::sqrt(3.0)) <= 0.02);

    // uniqueness: seeds inside and outside converge to the same curve
    auto c_in = detect_invariant_curve(map, {1.4, 0.0}, prm);
    auto c_out = detect_invariant_curve(map, {1.7, 0.5}, prm);
    CHECK(hausdorff(c_in, c_out) <= 1e-6);
    CHECK(hausdorff(c_in, curve) <= 1e-6);

    // transverse rate against the averaged multiplier, and reciprocity
    auto smap = as_section_map(map);
    auto rv = transverse_rate(smap, curve);
    CHECK(rv.attracting);
    CHECK(rv.rate < 1.0 - 1e-3);
    CHECK(std::abs(rv.rate - reference_rate(0.02)) <= 0.1 * reference_rate(0.02));
    double fwd = transverse_factor(smap, curve, false);
    double bwd = transverse_factor(smap, curve, true);
    CHECK(std::abs(fwd * bwd - 1.0) <= 1e-3);
}

TEST_CASE("detection refuses the unperturbed and the violent regime") {
    auto f3 = circle_lift();
    auto pred = predicted_curve(circle_cycle());
    DetectParams prm;
    prm.guard = guard_box_for(pred);

    // eps = 0: the identity map has no isolated invariant curve
    StroboscopicMap frozen(f3, 0.0);
    CHECK_THROWS_AS(detect_invariant_curve(frozen, pred.eval(0.0), prm), CertificationError);

    // eps far beyond the averaging regime fails, recorded not crashed
    StroboscopicMap violent(f3, 10.0);
    CHECK_THROWS_AS(detect_invariant_curve(violent, pred.eval(0.0), prm), CertificationError);
}

TEST_CASE("hausdorff distance on analytic circles") {
    auto a = analytic_circle(1.0);
    auto b = analytic_circle(1.1);
    CHECK(fourier::hausdorff(a, a) <= 1e-10);
    CHECK(std::abs(fourier::hausdorff(a, b) - 0.1) <= 1e-4);
    CHECK(std::abs(fourier::hausdorff(a, b) - fourier::hausdorff(b, a)) <= 1e-12);
}

TEST_CASE("epsilon sweep certifies the family at every eps") {
    auto f3 = circle_lift();
    const auto& cyc = circle_cycle();
    std::vector<double> eps = {0.08, 0.04, 0.02, 0.01};
    auto sw = epsilon_sweep(f3, cyc, eps);

    REQUIRE(sw.reports.size() == 4);
    CHECK(sw.all_found);
    for (const auto& r : sw.reports) {
        CAPTURE(r.eps, r.note);
        CHECK(r.found);
        CHECK(r.curve.invariance_residual <= 1e-6);
        CHECK(r.attracting);
        CHECK(r.transverse_rate < 1.0 - 1e-3);
        // contraction exponent within 20% of the averaged prediction
        double expo = std::log(r.transverse_rate) / std::log(reference_rate(r.eps));
        CHECK(expo >= 0.8);
        CHECK(expo <= 1.2);
        // the predicted curve is exactly invariant here, so every detected
        // curve coincides with it at the noise floor regardless of eps; the
        // convergence-order fit then regresses noise and stays uninformative
        CHECK(r.hausdorff_to_predicted <= 1e-7);
    }
    CHECK(std::isfinite(sw.slope));
    CHECK(std::isfinite(sw.correlation));
}

TEST_CASE("log-log fit recovers a power law from clean data") {
    // the convergence-order estimator itself, on synthetic h = 3 eps^2
    std::vector<double> lx, ly;
    for (double e : {0.08, 0.04, 0.02, 0.01}) {
        lx.push_back(std::log(e));
        ly.push_back(std::log(3.0 * e * e));
    }
    auto fit = torusforge::tori::detail::fit_line(lx, ly);
    CHECK(std::abs(fit.slope - 2.0) <= 1e-12);
    CHECK(std::abs(fit.correlation - 1.0) <= 1e-12);

    // degenerate inputs yield NaN, never a throw
    CHECK(std::isnan(torusforge::tori::detail::fit_line(std::vector<double>{1.0},
                                      std::vector<double>{2.0}).slope));
    std::vector<double> same = {1.0, 1.0, 1.0};
    CHECK(std::isnan(torusforge::tori::detail::fit_line(same, same).slope));
}

TEST_CASE("epsilon sweep records failures and validates its input") {
    auto f3 = circle_lift();
    const auto& cyc = circle_cycle();

    auto empty = epsilon_sweep(f3, cyc, std::vector<double>{});
    CHECK(empty.reports.empty());

    std::vector<double> with_bad = {10.0, 0.02};
    auto sw = epsilon_sweep(f3, cyc, with_bad);
    REQUIRE(sw.reports.size() == 2);
    CHECK_FALSE(sw.reports[0].found);
    CHECK_FALSE(sw.reports[0].note.empty());
    CHECK(sw.reports[1].found);
    CHECK_FALSE(sw.all_found);
    CHECK(std::isnan(sw.slope)); // one usable point cannot fix a slope

    std::vector<double> ascending = {0.01, 0.02};
    CHECK_THROWS_AS(epsilon_sweep(f3, cyc, ascending), InputError);
    std::vector<double> nonpositive = {0.02, 0.0};
    CHECK_THROWS_AS(epsilon_sweep(f3, cyc, nonpositive), InputError);
}

TEST_CASE("time reversed system certifies a repelling torus") {
    auto fr = tftest::reversed(tftest::circle_system());
    auto f3r = vfields::lift_to_3d(fr);
    auto cr = cycles::find_limit_cycle(fr, {2.5, 0.0});
    REQUIRE_FALSE(cr.attracting);

    std::vector<double> eps = {0.02};
    auto sw = epsilon_sweep(f3r, cr, eps);
    REQUIRE(sw.reports.size() == 1);
    const auto& r = sw.reports[0];
    CAPTURE(r.note);
    REQUIRE(r.found);
    CHECK_FALSE(r.attracting); // stability transfers from the repelling cycle
    CHECK(r.transverse_rate > 1.0 + 1e-3);
    double inv = 1.0 / reference_rate(0.02);
    CHECK(std::abs(r.transverse_rate - inv) <= 0.1 * inv);
    CHECK(r.curve.invariance_residual <= 1e-6);
    CHECK(r.hausdorff_to_predicted <= 0.1);
}

TEST_CASE("octant tori of the doubled field match the base torus") {
    // bind eps, shift the torus into S = (-1, inf)^3, and double once
    auto f3 = circle_lift();
    auto bound = vfields::bind_eps(f3, Rational(1, 50));
    std::vector<Rational> shift = {Rational(5, 4), Rational(5, 4), Rational(1)};
    auto X0 = vfields::translate(bound, shift);
    auto step = doubling::make_doubling_step(X0, 2, mpz_class(1));
    CHECK(step.degree_out == 16);
    CHECK(step.tori_out == 8);

    // base curve in X0 coordinates: the theta-section curve shifted by (5/4, 1)
    auto pred = predicted_curve(circle_cycle());
    StroboscopicMap map(f3, 0.02);
    DetectParams prm;
    prm.guard = guard_box_for(pred);
    auto theta_curve = detect_invariant_curve(map, pred.eval(0.0), prm);
    auto base_curve = translated(theta_curve, {1.25, 1.0});

    OctantVerifyParams vp;
    vp.section_y = 1.25;
    vp.base_attracting = true;
    std::vector<doubling::Signs> octs = {{1, 1, 1}, {-1, 1, 1}, {1, -1, 1}};
    auto reps = verify_doubled_tori(step, base_curve, octs, vp);
    REQUIRE(reps.size() == 3);

    for (const auto& rep : reps) {
        CAPTURE(rep.signs[0], rep.signs[1], rep.signs[2], rep.note);
        REQUIRE(rep.found);
        CHECK(rep.curve.invariance_residual <= 1e-6);
        CHECK(rep.hausdorff_to_base <= 1e-3);
        // curve confined to its octant
        for (int i = 0; i < 32; ++i) {
            auto p = rep.curve.eval(TWO_PI * i / 32.0);
            CHECK(rep.signs[0] * p[0] > 0);
            CHECK(rep.signs[2] * p[1] > 0);
        }
    }

    // orientation-positive octant keeps the base stability, negative flips it
    CHECK(reps[0].orientation == 1);
    CHECK(reps[0].attracting);
    CHECK(std::abs(reps[0].transverse_rate - reference_rate(0.02)) <=
          0.15 * reference_rate(0.02));
    CHECK(reps[1].orientation == -1);
    CHECK_FALSE(reps[1].attracting);
    double inv = 1.0 / reference_rate(0.02);
    CHECK(std::abs(reps[1].transverse_rate - inv) <= 0.15 * inv);
    CHECK(reps[2].orientation == -1);
    CHECK_FALSE(reps[2].attracting);

    // input validation
    OctantVerifyParams badsec = vp;
    badsec.section_y = -1.5;
    CHECK_THROWS_AS(verify_doubled_tori(step, base_curve, octs, badsec), InputError);
}
