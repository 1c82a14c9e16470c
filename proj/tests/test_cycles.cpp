#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "torusforge/cycles.hpp"
#include "torusforge/odeint.hpp"

using namespace torusforge;
using namespace torusforge::cycles;

namespace {

constexpr double PI = std::numbers::pi;
const std::vector<std::string> XY = {"x", "y"};

double circle_radius_error(const std::array<double, 2>& p) {
    double dx = p[0] - 2.0, dy = p[1];
    return std::abs(dx * dx + dy * dy - 1.0);
}

double angle_about(const std::array<double, 2>& p, double cx) {
    return std::atan2(p[1], p[0] - cx);
}

} // namespace

TEST_CASE("attracting cycle of the benchmark system is certified forward") {
    auto f = tftest::circle_system();
    auto lc = find_limit_cycle(f, {2.5, 0.0});

    CHECK_FALSE(lc.via_time_reversal);
    CHECK(lc.attracting);
    CHECK(lc.residual <= 1e-10);
    CHECK(std::abs(lc.period - 2 * PI) < 1e-8);
    double mu_exact = std::exp(-4 * PI);
    CHECK(std::abs(lc.multiplier - mu_exact) < 1e-3 * mu_exact);
    CHECK(circle_radius_error(lc.point) < 1e-8);

    SECTION("samples trace the cycle uniformly in time") {
        REQUIRE(lc.samples.size() == 256);
        CHECK(lc.samples[0][0] == lc.point[0]);
        CHECK(lc.samples[0][1] == lc.point[1]);
        for (const auto& p : lc.samples) CHECK(circle_radius_error(p) < 1e-8);
        // unit angular speed on the cycle: consecutive samples advance by T/256
        for (size_t i = 0; i + 1 < lc.samples.size(); ++i) {
            double da = angle_about(lc.samples[i + 1], 2.0) - angle_about(lc.samples[i], 2.0);
            if (da < -PI) da += 2 * PI;
            CHECK(std::abs(da - 2 * PI / 256) < 1e-6);
        }
    }

    SECTION("multiplier agrees with the trace integral determinant") {
        // planar: det M(T) = trivial multiplier * nontrivial one = multiplier
        CompiledPoly pc(f.P), qc(f.Q);
        CompiledPoly pxc(f.P.partial(0)), pyc(f.P.partial(1));
        CompiledPoly qxc(f.Q.partial(0)), qyc(f.Q.partial(1));
        odeint::Rhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
            double v[2] = {y[0], y[1]};
            dy[0] = pc.eval(v);
            dy[1] = qc.eval(v);
        };
        odeint::Jacobian jac = [&](double, std::span<const double> y, std::span<double> J) {
            double v[2] = {y[0], y[1]};
            J[0] = pxc.eval(v);
            J[1] = pyc.eval(v);
            J[2] = qxc.eval(v);
            J[3] = qyc.eval(v);
        };
        auto res = odeint::integrate_variational(rhs, jac, lc.point, 0.0, lc.period);
        double det = res.fundamental[0] * res.fundamental[3] -
                     res.fundamental[1] * res.fundamental[2];
        CHECK(std::abs(det - lc.multiplier) < 1e-4 * std::abs(lc.multiplier));
    }
}

TEST_CASE("stronger radial contraction doubles the Floquet exponent") {
    // dr/dt = 2 r (1 - r^2) on the unit circle: multiplier exp(-8 pi)
    auto px = Poly::parse("-y + 2*x*(1 - x^2 - y^2)", XY);
    auto py = Poly::parse("x + 2*y*(1 - x^2 - y^2)", XY);
    auto lc = find_limit_cycle(px, py, {1.4, 0.0});

    CHECK_FALSE(lc.via_time_reversal);
    CHECK(lc.attracting);
    CHECK(std::abs(lc.period - 2 * PI) < 1e-8);
    double mu_exact = std::exp(-8 * PI);
    CHECK(std::abs(lc.multiplier - mu_exact) < 1e-3 * mu_exact);
    CHECK(std::abs(lc.point[0] * lc.point[0] + lc.point[1] * lc.point[1] - 1.0) < 1e-8);
}

TEST_CASE("repelling cycle is certified through time reversal") {
    auto f = tftest::reversed(tftest::circle_system());
    auto lc = find_limit_cycle(f, {2.5, 0.0});

    CHECK(lc.via_time_reversal);
    CHECK_FALSE(lc.attracting);
    CHECK(lc.residual <= 1e-10);
    CHECK(std::abs(lc.period - 2 * PI) < 1e-8);
    double mu_exact = std::exp(4 * PI);
    CHECK(std::abs(lc.multiplier - mu_exact) < 1e-3 * mu_exact);
    CHECK(circle_radius_error(lc.point) < 1e-8);

    SECTION("samples still follow the requested field's forward time") {
        REQUIRE(lc.samples.size() == 256);
        for (const auto& p : lc.samples) CHECK(circle_radius_error(p) < 1e-7);
        // reversing the benchmark system flips the rotation to clockwise
        double da = angle_about(lc.samples[1], 2.0) - angle_about(lc.samples[0], 2.0);
        if (da > PI) da -= 2 * PI;
        CHECK(da < 0);
        CHECK(std::abs(da + 2 * PI / 256) < 1e-5);
    }
}

TEST_CASE("non isolated periodic orbits are rejected") {
    // pure rotation: every orbit is periodic, the return derivative is one
    auto px = Poly::parse("-y", XY);
    auto py = Poly::parse("x", XY);
    CHECK_THROWS_AS(find_limit_cycle(px, py, {1.0, 0.0}), CertificationError);
}

TEST_CASE("equilibrium guesses are rejected up front") {
    auto f = tftest::circle_system();
    CHECK_THROWS_AS(find_limit_cycle(f, {2.0, 0.0}), InputError);
}

TEST_CASE("a field without returns fails in both time directions") {
    auto px = Poly::parse("1", XY);
    auto py = Poly::parse("0", XY);
    CycleOptions opt;
    opt.max_return_time = 5.0;
    CHECK_THROWS_AS(find_limit_cycle(px, py, {0.0, 0.0}, opt), CertificationError);
    try {
        find_limit_cycle(px, py, {0.0, 0.0}, opt);
    } catch (const CertificationError& e) {
        CHECK(std::string(e.what()).find("time reversed") != std::string::npos);
    }
}

TEST_CASE("non planar input is rejected") {
    const std::vector<std::string> XYZ = {"x", "y", "z"};
    auto p3 = Poly::parse("x", XYZ);
    CHECK_THROWS_AS(find_limit_cycle(p3, p3, {1.0, 0.0}), InputError);
}

TEST_CASE("time reversal can be disabled") {
    auto f = tftest::reversed(tftest::circle_system());
    CycleOptions opt;
    opt.allow_time_reversal = false;
    CHECK_THROWS_AS(find_limit_cycle(f, {2.5, 0.0}, opt), CertificationError);
}

TEST_CASE("guiding field owns the transformed benchmark cycle") {
    // With the planar components read in (rho, z), the guiding pair is
    // dr/dt = r P(r^2, z) / 2, dz/dt = r^2 Q(r^2, z).  Substituting u = r^2
    // maps its orbits onto the planar ones, so the benchmark circle
    // (u - 2)^2 + z^2 = 1 becomes a guiding cycle through (sqrt(3), 0) and
    // (1, 0).  On it du/dpsi parametrization gives dpsi/dt = 2 + cos(psi),
    // hence period 2 pi / sqrt(3), and the transverse linearization
    // integrates to the same exp(-4 pi) multiplier as the planar cycle.
    auto g = vfields::derive_guiding(tftest::circle_system());
    auto lc = find_limit_cycle(g, {1.6, 0.0});

    CHECK_FALSE(lc.via_time_reversal);
    CHECK(lc.attracting);
    CHECK(std::abs(lc.period - 2 * PI / std::sqrt(3.0)) < 1e-8);
    double mu_exact = std::exp(-4 * PI);
    CHECK(std::abs(lc.multiplier - mu_exact) < 1e-3 * mu_exact);
    double u = lc.point[0] * lc.point[0];
    CHECK(std::abs((u - 2) * (u - 2) + lc.point[1] * lc.point[1] - 1.0) < 1e-8);

    for (const auto& p : lc.samples) {
        double us = p[0] * p[0];
        CHECK(std::abs((us - 2) * (us - 2) + p[1] * p[1] - 1.0) < 1e-7);
        CHECK(p[0] > 0.9);
    }
}

TEST_CASE("cycle samples satisfy the field equation pointwise") {
    // Samples are uniform in time over one period, so an eighth order
    // periodic central difference estimates the velocity with truncation far
    // below the bound; comparing it with the field on the samples bounds the
    // sample ODE residual.
    auto residual = [](const Poly& fx, const Poly& fy, const cycles::LimitCycle& lc) {
        CompiledPoly cx(fx), cy(fy);
        const auto& s = lc.samples;
        int n = static_cast<int>(s.size());
        REQUIRE(n >= 9);
        double h = lc.period / n;
        const double w[4] = {672.0, -168.0, 32.0, -3.0};
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            auto at = [&](int off) { return s[(i + off + n) % n]; };
            double du = 0, dv = 0;
            for (int k = 1; k <= 4; ++k) {
                du += w[k - 1] * (at(k)[0] - at(-k)[0]);
                dv += w[k - 1] * (at(k)[1] - at(-k)[1]);
            }
            du /= 840 * h;
            dv /= 840 * h;
            double p[2] = {s[i][0], s[i][1]};
            worst = std::max(worst, std::hypot(du - cx.eval(p), dv - cy.eval(p)));
        }
        return worst;
    };

    auto f = tftest::circle_system();
    auto lc = find_limit_cycle(f, {2.5, 0.0});
    CHECK(residual(f.P, f.Q, lc) <= 1e-8);

    // reversed (repelling) cycles keep forward-time sample order, so the
    // same forward-field residual bound applies
    auto rf = tftest::reversed(f);
    auto rlc = find_limit_cycle(rf, {2.5, 0.0});
    CHECK(rlc.via_time_reversal);
    CHECK(residual(rf.P, rf.Q, rlc) <= 1e-8);

    auto g = vfields::derive_guiding(f);
    auto glc = find_limit_cycle(g, {1.6, 0.0});
    CHECK(residual(g.g1, g.g2, glc) <= 1e-8);
}
