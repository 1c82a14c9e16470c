#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cycles.hpp"
#include "doubling.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "odeint.hpp"
#include "parallel.hpp"
#include "poly.hpp"
#include "vfields.hpp"

namespace torusforge::tori {

constexpr double TWO_PI = 2 * std::numbers::pi;

// Default tolerances for the stroboscopic integrations.  The rate estimator
// differentiates map endpoints across steps of order 1e-6, so the endpoint
// jitter has to sit several decades below that for the quotients to be clean.
inline odeint::IntegratorConfig default_integrator() {
    odeint::IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    return cfg;
}

// ---------------------------------------------------------------------------
// Exact planar data of a rotational lift.

struct ThetaSystem {
    Poly P, Q; // in (rho, z)
};

// Recovers (P, Q) from a symbolic-eps rotational lift, exactly.  The radial
// combination enters every component through x^2 + y^2 only, so restricting
// to y = 0 and halving the x powers inverts the construction; the recovered
// pair is then recomposed and compared to the input to certify the shape.
inline ThetaSystem split_rotational_lift(const vfields::SpatialField& f3) {
    if (!f3.has_eps)
        throw InputError("stroboscopic analysis needs the symbolic perturbation variable");
    if (f3.nspace != 3) throw InputError("rotational lift must have three space variables");
    const int NV = 4;
    Poly X = Poly::variable(NV, 0), Y = Poly::variable(NV, 1);
    Poly Z = Poly::variable(NV, 2), E = Poly::variable(NV, 3);

    auto fail = [] { throw InputError("field is not a rotational lift"); };

    if (!(f3.components[0] + Y).is_zero()) fail();

    auto strip = [&](const Poly& rem, int ypow) {
        if (rem.is_zero()) return Poly::zero(2);
        if (!rem.divisible_by_var(3, 1) || !rem.divisible_by_var(1, ypow)) fail();
        Poly core = rem.divide_by_var(3, 1).divide_by_var(1, ypow);
        Poly on_axis = core.bind_var(1, Rational(0)); // (x, z, eps)
        Poly flat = on_axis.bind_var(2, Rational(0)); // (x, z); spurious eps would vanish here
        if (!flat.has_only_even_powers(0)) fail();
        return flat.contract_even_powers(0);
    };

    ThetaSystem sys;
    sys.P = strip(f3.components[1] - X, 1);
    sys.Q = strip(f3.components[2], 2).scale(Rational(1, 2));

    // recomposition certificate: the recovered pair must reproduce the input
    Poly rho = X * X + Y * Y;
    Poly Px = sys.P.compose(std::vector<Poly>{rho, Z});
    Poly Qx = sys.Q.compose(std::vector<Poly>{rho, Z});
    if (!(f3.components[1] - (X + E * Y * Px)).is_zero()) fail();
    if (!(f3.components[2] - (E * Y * Y * Qx).scale(Rational(2))).is_zero()) fail();
    return sys;
}

// ---------------------------------------------------------------------------
// The 2 pi stroboscopic map of the theta-parametrized section dynamics:
//   dr/dtheta = eps r sin^2(th) P(r^2, z) / (1 + eps sin(th) cos(th) P(r^2, z))
//   dz/dtheta = 2 eps r^2 sin^2(th) Q(r^2, z) / (same denominator)

class StroboscopicMap {
public:
    StroboscopicMap(const vfields::SpatialField& f3, double eps,
                    odeint::IntegratorConfig integ = default_integrator())
        : eps_(eps), integ_(integ) {
        if (!(eps >= 0)) throw InputError("eps must be nonnegative");
        auto sys = split_rotational_lift(f3);
        p_ = CompiledPoly(sys.P);
        q_ = CompiledPoly(sys.Q);
    }

    double eps() const { return eps_; }

    std::array<double, 2> forward(const std::array<double, 2>& rz) const { return run(rz, +1); }
    std::array<double, 2> backward(const std::array<double, 2>& rz) const { return run(rz, -1); }

private:
    std::array<double, 2> run(const std::array<double, 2>& rz, int dir) const {
        if (eps_ == 0) return rz; // the unperturbed period map is the identity
        odeint::Rhs rhs = [this](double th, std::span<const double> y, std::span<double> dy) {
            double s = std::sin(th), c = std::cos(th);
            double u[2] = {y[0] * y[0], y[1]};
            double pv = p_.eval(u), qv = q_.eval(u);
            double den = 1.0 + eps_ * s * c * pv;
            if (den < 0.5)
                throw CertificationError(
                    "theta speed degenerated along the stroboscopic orbit");
            double w = eps_ * s * s / den;
            dy[0] = w * y[0] * pv;
            dy[1] = 2.0 * w * y[0] * y[0] * qv;
        };
        std::vector<double> y0 = {rz[0], rz[1]};
        auto yf = odeint::integrate_to(rhs, y0, 0.0, dir * TWO_PI, integ_);
        return {yf[0], yf[1]};
    }

    CompiledPoly p_{Poly::zero(2)}, q_{Poly::zero(2)};
    double eps_ = 0;
    odeint::IntegratorConfig integ_;
};

// Generic section map: `forward` is the direction handed to detection,
// `backward` its inverse (may be empty when unavailable).
struct SectionMap {
    std::function<std::array<double, 2>(const std::array<double, 2>&)> forward;
    std::function<std::array<double, 2>(const std::array<double, 2>&)> backward;
};

inline SectionMap as_section_map(const StroboscopicMap& m) {
    SectionMap s;
    s.forward = [&m](const std::array<double, 2>& p) { return m.forward(p); };
    s.backward = [&m](const std::array<double, 2>& p) { return m.backward(p); };
    return s;
}

// ---------------------------------------------------------------------------
// Section trace of a torus: closed Fourier curve phi -> (r(phi), z(phi)).

struct InvariantCurve {
    fourier::Curve2 curve;
    double invariance_residual = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = 0; // max deviation of the fit at the sample angles
    std::array<double, 2> centroid{};
    std::array<double, 2> scale{1.0, 1.0}; // half extents, the normalization frame
    int orientation = +1;                  // sign of the angular drift of iterates
    double rotation_per_iterate = 0;       // mean angular advance (radians)
    int modes_used = 0;

    std::array<double, 2> eval(double phi) const { return curve.eval(phi); }
};

namespace detail {

struct CloudFrame {
    std::array<double, 2> centroid{};
    std::array<double, 2> scale{1.0, 1.0};
    std::vector<double> phi; // angle of each point about the centroid, normalized
};

inline CloudFrame frame_points(std::span<const std::array<double, 2>> pts) {
    if (pts.empty()) throw InputError("no points to frame");
    CloudFrame f;
    for (const auto& p : pts) {
        f.centroid[0] += p[0];
        f.centroid[1] += p[1];
    }
    f.centroid[0] /= pts.size();
    f.centroid[1] /= pts.size();
    double sr = 0, sz = 0;
    for (const auto& p : pts) {
        sr = std::max(sr, std::abs(p[0] - f.centroid[0]));
        sz = std::max(sz, std::abs(p[1] - f.centroid[1]));
    }
    f.scale = {std::max(sr, 1e-12), std::max(sz, 1e-12)};
    f.phi.resize(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
        f.phi[i] = std::atan2((pts[i][1] - f.centroid[1]) / f.scale[1],
                              (pts[i][0] - f.centroid[0]) / f.scale[0]);
    return f;
}

inline double fit_error(const fourier::Curve2& c, std::span<const double> phi,
                        std::span<const std::array<double, 2>> pts) {
    double worst = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        auto q = c.eval(phi[i]);
        worst = std::max(worst, std::hypot(q[0] - pts[i][0], q[1] - pts[i][1]));
    }
    return worst;
}

// Centroid-angle Fourier fit of a closed point cloud (no dynamics attached).
inline InvariantCurve fit_point_cloud(std::span<const std::array<double, 2>> pts, int modes) {
    auto frame = frame_points(pts);
    int m = std::min(modes, (static_cast<int>(pts.size()) - 1) / 2);
    InvariantCurve c;
    c.curve = fourier::fit_closed_curve(frame.phi, pts, m);
    c.centroid = frame.centroid;
    c.scale = frame.scale;
    c.modes_used = m;
    c.fit_residual = fit_error(c.curve, frame.phi, pts);
    return c;
}

} // namespace detail

// The eps -> 0 limit curve in section coordinates: the planar cycle
// (u(t), v(t)) carried through the radial substitution r = sqrt(u), fitted
// over the normalized time parameter.
inline InvariantCurve predicted_curve(const cycles::LimitCycle& c, int modes = 64) {
    if (c.samples.empty()) throw InputError("cycle carries no samples");
    const size_t n = c.samples.size();
    std::vector<double> phi(n);
    std::vector<std::array<double, 2>> pts(n);
    for (size_t i = 0; i < n; ++i) {
        double u = c.samples[i][0];
        if (!(u > 0))
            throw InputError("cycle sample leaves the u > 0 half plane; "
                             "radial substitution undefined");
        pts[i] = {std::sqrt(u), c.samples[i][1]};
        phi[i] = TWO_PI * static_cast<double>(i) / static_cast<double>(n);
    }
    auto frame = detail::frame_points(pts);

    // collapsed sample cloud: the section trace is a single point and the
    // limit curve is the constant map onto it
    if (std::max(frame.scale[0], frame.scale[1]) <=
        1e-9 * (1 + std::hypot(frame.centroid[0], frame.centroid[1]))) {
        InvariantCurve flat;
        flat.curve.x.c0 = frame.centroid[0];
        flat.curve.y.c0 = frame.centroid[1];
        flat.centroid = frame.centroid;
        flat.scale = frame.scale;
        flat.modes_used = 0;
        for (const auto& p : pts)
            flat.fit_residual = std::max(flat.fit_residual,
                                         std::hypot(p[0] - frame.centroid[0],
                                                    p[1] - frame.centroid[1]));
        if (!(flat.curve.x.c0 > 0))
            throw InputError("predicted curve leaves the r > 0 half plane");
        return flat;
    }

    InvariantCurve out;
    out.modes_used = std::min(modes, (static_cast<int>(n) - 1) / 2);
    out.curve = fourier::fit_closed_curve(phi, pts, out.modes_used);
    out.fit_residual = detail::fit_error(out.curve, phi, pts);
    out.centroid = frame.centroid;
    out.scale = frame.scale;

    double rot = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        double d = frame.phi[i + 1] - frame.phi[i];
        if (d > std::numbers::pi) d -= TWO_PI;
        if (d < -std::numbers::pi) d += TWO_PI;
        rot += d;
    }
    out.rotation_per_iterate = n > 1 ? rot / (static_cast<double>(n) - 1) : 0;
    out.orientation = out.rotation_per_iterate < 0 ? -1 : +1;

    for (int i = 0; i < 512; ++i)
        if (!(out.curve.eval(TWO_PI * i / 512)[0] > 0))
            throw InputError("predicted curve leaves the r > 0 half plane");
    return out;
}

// The same curve in section coordinates shifted by +d (change of origin).
inline InvariantCurve translated(InvariantCurve c, const std::array<double, 2>& d) {
    c.curve.x.c0 += d[0];
    c.curve.y.c0 += d[1];
    c.centroid[0] += d[0];
    c.centroid[1] += d[1];
    return c;
}

inline double hausdorff(const InvariantCurve& a, const InvariantCurve& b, int samples = 1024) {
    return fourier::hausdorff(a.curve, b.curve, samples);
}

// Escape region for curve detection: 1.5x the predicted bounding box,
// expanded by 0.5 outward in each direction.
inline std::array<std::array<double, 2>, 2> guard_box_for(const InvariantCurve& predicted) {
    double lo[2] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (int i = 0; i < 512; ++i) {
        auto p = predicted.eval(TWO_PI * i / 512);
        for (int j = 0; j < 2; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    }
    std::array<std::array<double, 2>, 2> g;
    for (int j = 0; j < 2; ++j) {
        double mid = 0.5 * (lo[j] + hi[j]), half = 0.5 * (hi[j] - lo[j]);
        g[0][j] = mid - 1.5 * half - 0.5;
        g[1][j] = mid + 1.5 * half + 0.5;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Invariant curve detection.

struct DetectParams {
    int transient = 200;
    int samples = 400;
    int modes = 32;
    int min_modes = 8;          // below this the point set cannot support a fit
    double residual_tol = 1e-6; // accepted invariance residual
    int probes = 64;            // invariance check resolution
    double merge_tol = 1e-5;    // cluster resolution in normalized coordinates
    bool backward = false;      // iterate the inverse map (repelling curves)
    bool require_positive_first = true; // section curves need r > 0
    std::optional<std::array<std::array<double, 2>, 2>> guard; // {lo, hi}
};

inline InvariantCurve detect_invariant_curve(const SectionMap& map,
                                             std::array<double, 2> seed,
                                             const DetectParams& prm = {}) {
    auto step = prm.backward ? map.backward : map.forward;
    if (!step) throw InputError("required map direction is not available");
    if (prm.samples < 2 * prm.min_modes + 1)
        throw InputError("sample budget below the minimal Fourier rank");

    auto guard_check = [&](const std::array<double, 2>& p) {
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
            throw CertificationError("iterates diverged; no invariant curve here");
        if (prm.guard) {
            const auto& g = *prm.guard;
            if (p[0] < g[0][0] || p[0] > g[1][0] || p[1] < g[0][1] || p[1] > g[1][1])
                throw CertificationError(
                    "iterates escaped the guard box; no invariant curve here");
        }
    };

    std::array<double, 2> x = seed;
    guard_check(x);
    for (int i = 0; i < prm.transient; ++i) {
        x = step(x);
        guard_check(x);
    }
    std::vector<std::array<double, 2>> pts(prm.samples);
    for (int i = 0; i < prm.samples; ++i) {
        pts[i] = x;
        x = step(x);
        guard_check(x);
    }

    auto frame = detail::frame_points(pts);

    double rot = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = frame.phi[i + 1] - frame.phi[i];
        if (d > std::numbers::pi) d -= TWO_PI;
        if (d < -std::numbers::pi) d += TWO_PI;
        rot += d;
    }
    rot /= static_cast<double>(pts.size() - 1);

    // distinct-point count at the merge resolution, walked in angular order;
    // a starved count signals locking onto a low-period orbit of the map
    auto norm_of = [&](const std::array<double, 2>& p) {
        return std::array<double, 2>{(p[0] - frame.centroid[0]) / frame.scale[0],
                                     (p[1] - frame.centroid[1]) / frame.scale[1]};
    };
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return frame.phi[a] < frame.phi[b]; });
    int clusters = 0;
    std::array<double, 2> anchor{};
    for (int idx : order) {
        auto pn = norm_of(pts[idx]);
        if (clusters == 0 ||
            std::hypot(pn[0] - anchor[0], pn[1] - anchor[1]) > prm.merge_tol) {
            ++clusters;
            anchor = pn;
        }
    }
    if (clusters > 1) {
        auto first = norm_of(pts[order.front()]);
        if (std::hypot(first[0] - anchor[0], first[1] - anchor[1]) <= prm.merge_tol)
            --clusters;
    }

    int modes_used = std::min(prm.modes, (clusters - 1) / 2);
    if (modes_used < prm.min_modes)
        throw CertificationError(
            "iterates collapse onto " + std::to_string(clusters) +
            (clusters == 1 ? " distinct point" : " distinct points") +
            "; resonance locking suspected, detection inconclusive");

    InvariantCurve out;
    out.curve = fourier::fit_closed_curve(frame.phi, pts, modes_used);
    out.fit_residual = detail::fit_error(out.curve, frame.phi, pts);
    out.centroid = frame.centroid;
    out.scale = frame.scale;
    out.modes_used = modes_used;
    out.rotation_per_iterate = rot;
    out.orientation = rot < 0 ? -1 : +1;

    // simplicity: the fitted curve must wind exactly once around the
    // centroid with strictly monotone angle (star shaped at this resolution)
    {
        double prev = 0, total = 0;
        int wind = 0;
        for (int i = 0; i <= 512; ++i) {
            auto pn = norm_of(out.curve.eval(TWO_PI * i / 512.0));
            double a = std::atan2(pn[1], pn[0]);
            if (i > 0) {
                double d = a - prev;
                if (d > std::numbers::pi) d -= TWO_PI;
                if (d < -std::numbers::pi) d += TWO_PI;
                int s = d > 0 ? 1 : d < 0 ? -1 : 0;
                if (s == 0 || (wind != 0 && s != wind))
                    throw CertificationError(
                        "iterates do not order into a simple closed curve; "
                        "detection inconclusive at this eps");
                wind = s;
                total += d;
            }
            prev = a;
        }
        if (std::abs(std::abs(total) - TWO_PI) > 1e-6)
            throw CertificationError(
                "fitted curve winds " + std::to_string(total / TWO_PI) +
                " times around its centroid; not a simple section trace");
    }

    // invariance: images of curve points must land back on the curve
    double resid = 0;
    for (int j = 0; j < prm.probes; ++j) {
        auto img = step(out.curve.eval(TWO_PI * j / prm.probes));
        if (!std::isfinite(img[0]) || !std::isfinite(img[1]))
            throw CertificationError("curve image diverged during the invariance check");
        resid = std::max(resid, fourier::distance_to(out.curve, img));
    }
    out.invariance_residual = resid;
    if (resid > prm.residual_tol)
        throw CertificationError("invariance residual " + std::to_string(resid) +
                                 " exceeds the acceptance tolerance");

    if (prm.require_positive_first)
        for (int i = 0; i < 512; ++i)
            if (!(out.curve.eval(TWO_PI * i / 512)[0] > 0))
                throw CertificationError("curve leaves the r > 0 half plane");
    return out;
}

inline InvariantCurve detect_invariant_curve(const StroboscopicMap& map,
                                             std::array<double, 2> seed,
                                             const DetectParams& prm = {}) {
    return detect_invariant_curve(as_section_map(map), seed, prm);
}

// ---------------------------------------------------------------------------
// Normal hyperbolicity estimate.

struct RateParams {
    int points = 16;
    double fd_step = 1e-6; // finite difference step in normalized coordinates
    double margin = 1e-3;
};

// Geometric mean over curve points of the transverse stretch of one map
// application, measured in the curve's normalization frame.
inline double transverse_factor(const SectionMap& map, const InvariantCurve& curve,
                                bool backward, const RateParams& rp = {}) {
    auto step = backward ? map.backward : map.forward;
    if (!step) throw InputError("required map direction is not available");
    if (rp.points < 16) throw InputError("transverse rate needs at least 16 probe points");

    const double sr = curve.scale[0], sz = curve.scale[1];
    // The asymptotic rate averages the per-point contraction against the
    // sojourn measure of the circle map, not against arc length: the map
    // advances slowly where the underlying flow is slow and the orbit spends
    // proportionally more iterates there.  Each probe is therefore weighted
    // by the reciprocal of its angular advance; with a position-dependent
    // advance the unweighted mean would be biased at first order.
    double log_sum = 0, weight_sum = 0;
    for (int i = 0; i < rp.points; ++i) {
        double ph = TWO_PI * i / rp.points;
        auto p = curve.eval(ph);
        double hr = rp.fd_step * sr, hz = rp.fd_step * sz;
        auto pr1 = step({p[0] + hr, p[1]}), pr0 = step({p[0] - hr, p[1]});
        auto pz1 = step({p[0], p[1] + hz}), pz0 = step({p[0], p[1] - hz});
        // normalized-frame Jacobian S^{-1} J S
        double J00 = (pr1[0] - pr0[0]) / (2 * hr);
        double J01 = (pz1[0] - pz0[0]) / (2 * hz) * (sz / sr);
        double J10 = (pr1[1] - pr0[1]) / (2 * hr) * (sr / sz);
        double J11 = (pz1[1] - pz0[1]) / (2 * hz);

        auto unit_normal = [&](double at) {
            auto d = curve.curve.deriv(at);
            double tx = d[0] / sr, ty = d[1] / sz;
            double tn = std::hypot(tx, ty);
            if (tn < 1e-300) throw CertificationError("degenerate curve tangent");
            return std::array<double, 2>{-ty / tn, tx / tn};
        };
        auto n0 = unit_normal(ph);
        auto img = step(p);
        double ph1 = fourier::nearest_param(curve.curve, img);
        auto n1 = unit_normal(ph1);

        double fac = std::abs(n1[0] * (J00 * n0[0] + J01 * n0[1]) +
                              n1[1] * (J10 * n0[0] + J11 * n0[1]));
        if (!(fac > 0) || !std::isfinite(fac))
            throw CertificationError("transverse factor degenerated");
        // central advance estimate when the opposite map is available; the
        // one-sided advance carries an O(advance) density offset that would
        // spoil forward/backward reciprocity
        double adv;
        if (auto other = backward ? map.forward : map.backward) {
            double ph2 = fourier::nearest_param(curve.curve, other(p));
            adv = std::abs(std::remainder(ph1 - ph2, TWO_PI)) / 2;
        } else {
            adv = std::abs(std::remainder(ph1 - ph, TWO_PI));
        }
        double w = adv > 1e-9 ? 1.0 / adv : 0.0;
        log_sum += w * std::log(fac);
        weight_sum += w;
    }
    if (!(weight_sum > 0))
        throw CertificationError("map shows no angular advance along the curve");
    return std::exp(log_sum / weight_sum);
}

struct RateVerdict {
    double rate = 0;        // per map application, in forward map time
    bool attracting = false;
};

// Attracting when the forward transverse factor sits below 1 - margin;
// the repelling verdict is measured on the backward map (where the curve
// attracts and finite differences are reliable) and inverted.
inline RateVerdict transverse_rate(const SectionMap& map, const InvariantCurve& curve,
                                   const RateParams& rp = {}) {
    double f = transverse_factor(map, curve, false, rp);
    if (f < 1.0 - rp.margin) return {f, true};
    if (map.backward) {
        double b = transverse_factor(map, curve, true, rp);
        if (b < 1.0 - rp.margin) return {1.0 / b, false};
    }
    throw CertificationError("transverse rate " + std::to_string(f) +
                             " within the unity margin; not certified normally "
                             "hyperbolic at this eps");
}

inline RateVerdict transverse_rate(const StroboscopicMap& map, const InvariantCurve& curve,
                                   const RateParams& rp = {}) {
    return transverse_rate(as_section_map(map), curve, rp);
}

// ---------------------------------------------------------------------------
// eps sweep against the predicted curve.

struct ToriReport {
    double eps = 0;
    bool found = false;
    InvariantCurve curve;
    double hausdorff_to_predicted = std::numeric_limits<double>::quiet_NaN();
    double transverse_rate = std::numeric_limits<double>::quiet_NaN();
    bool attracting = false;
    int transient_used = 0;
    int iterations_used = 0;
    std::string note;
};

struct SweepResult {
    std::vector<ToriReport> reports;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double correlation = std::numeric_limits<double>::quiet_NaN();
    bool all_found = true;
    InvariantCurve predicted;
};

namespace detail {

struct LineFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double correlation = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares line through (x_i, y_i) with the Pearson correlation as the
// quality figure.  NaN on fewer than two points or on degenerate spreads.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    LineFit out;
    if (xs.size() != ys.size() || xs.size() < 2) return out;
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0 && syy > 0) {
        out.slope = sxy / sxx;
        out.correlation = sxy / std::sqrt(sxx * syy);
    }
    return out;
}

} // namespace detail

inline SweepResult epsilon_sweep(const vfields::SpatialField& f3,
                                 const cycles::LimitCycle& cycle,
                                 std::span<const double> eps_list,
                                 const DetectParams& base_prm = {},
                                 const odeint::IntegratorConfig& integ = default_integrator()) {
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0)) throw InputError("eps values must be positive");
        if (i > 0 && eps_list[i] >= eps_list[i - 1])
            throw InputError("eps list must be sorted in descending order");
    }

    SweepResult res;
    if (eps_list.empty()) return res;

    res.predicted = predicted_curve(cycle);
    auto guard = guard_box_for(res.predicted);
    std::array<double, 2> seed = res.predicted.eval(0.0);

    res.reports.resize(eps_list.size());
    parallel::parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
        ToriReport rep;
        rep.eps = eps_list[i];
        rep.transient_used = base_prm.transient;
        rep.iterations_used = base_prm.transient + base_prm.samples + base_prm.probes;
        try {
            StroboscopicMap map(f3, rep.eps, integ);
            auto smap = as_section_map(map);
            DetectParams prm = base_prm;
            prm.guard = guard;
            prm.backward = !cycle.attracting;
            rep.curve = detect_invariant_curve(smap, seed, prm);
            auto rv = transverse_rate(smap, rep.curve);
            rep.transverse_rate = rv.rate;
            rep.attracting = rv.attracting;
            rep.hausdorff_to_predicted = fourier::hausdorff(rep.curve.curve, res.predicted.curve);
            rep.found = true;
        } catch (const CertificationError& e) {
            rep.note = e.what();
        }
        res.reports[i] = std::move(rep);
    });

    // log-log convergence fit over the successful reports
    std::vector<double> lx, ly;
    for (const auto& r : res.reports) {
        res.all_found = res.all_found && r.found;
        if (r.found && r.hausdorff_to_predicted > 0) {
            lx.push_back(std::log(r.eps));
            ly.push_back(std::log(r.hausdorff_to_predicted));
        }
    }
    auto fit = detail::fit_line(lx, ly);
    res.slope = fit.slope;
    res.correlation = fit.correlation;
    return res;
}

// ---------------------------------------------------------------------------
// Cartesian cross-check of the theta formulation: first return of the
// eps-bound lift to {y = 0, x > 0, dy/dt > 0}.

inline std::array<double, 2> cartesian_return(const vfields::SpatialField& bound3,
                                              std::array<double, 2> rz,
                                              const odeint::IntegratorConfig& integ = default_integrator()) {
    vfields::CompiledField f(bound3);
    std::vector<double> y0 = {rz[0], 0.0, rz[1]};
    odeint::EventFn ev = [](std::span<const double> y) { return y[1]; };
    odeint::CrossingOptions copt;
    copt.t_min = 1.0;
    auto fc = odeint::integrate_crossings(f, y0, 0.0, 50.0, ev, +1, 1, integ, copt);
    const auto& c = fc.crossings.front();
    if (c.state[0] <= 0)
        throw CertificationError("return landed on the x <= 0 half plane");
    return {c.state[0], c.state[2]};
}

// ---------------------------------------------------------------------------
// Octant verification of a doubled field.

struct OctantReport {
    doubling::Signs signs;
    int orientation = +1; // time orientation of the squaring conjugacy
    bool found = false;
    bool attracting = false; // stability in the doubled field's forward time
    InvariantCurve curve;    // octant section coordinates (x, z)
    double transverse_rate = std::numeric_limits<double>::quiet_NaN();
    double hausdorff_to_base = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

struct OctantVerifyParams {
    double section_y = 0; // source-field section plane {y = section_y}, > -1
    bool base_attracting = true;
    DetectParams detect = default_detect();
    odeint::IntegratorConfig integ = default_integrator();
    double max_return_time = 50.0;
    int refit_modes = 24;

    static DetectParams default_detect() {
        DetectParams p;
        p.transient = 60;
        p.samples = 150;
        p.modes = 24;
        return p;
    }
};

// For each requested octant: seed through the square-root chart, run the
// section return map of the doubled field with the octant's time
// orientation, certify the invariant curve, and compare its chart image
// against the base curve.
inline std::vector<OctantReport> verify_doubled_tori(const doubling::DoublingStep& step,
                                                     const InvariantCurve& base_curve,
                                                     std::span<const doubling::Signs> octants,
                                                     const OctantVerifyParams& vp) {
    if (step.d != 2 || step.X1.nspace != 3)
        throw InputError("octant verification needs the three dimensional doubling step");
    if (step.X1.has_eps)
        throw InputError("octant verification needs a numerically bound perturbation");
    if (!(vp.section_y > -1.0))
        throw InputError("section plane must lie inside S = (-1, inf)^3");

    vfields::CompiledField fw(step.X1, +1.0), bw(step.X1, -1.0);

    std::vector<OctantReport> reports(octants.size());
    parallel::parallel_for(static_cast<int>(octants.size()), [&](int oi) {
        const doubling::Signs& signs = octants[oi];
        OctantReport rep;
        rep.signs = signs;
        rep.orientation = doubling::octant_time_orientation(signs);
        try {
            const int sigma = rep.orientation;
            const int beta = vp.base_attracting ? +1 : -1;
            const int dir_detect = beta * sigma; // doubled-field time that attracts
            const double ysec = signs[1] * std::sqrt(1.0 + vp.section_y);

            auto one_cross = [&](const std::array<double, 2>& xz, int dir) {
                std::vector<double> y0 = {xz[0], ysec, xz[1]};
                odeint::EventFn ev = [sy = vp.section_y](std::span<const double> y) {
                    return y[1] * y[1] - 1.0 - sy;
                };
                odeint::CrossingOptions copt;
                copt.t_min = 1e-3;
                auto fc = odeint::integrate_crossings(dir > 0 ? fw : bw, y0, 0.0,
                                                      vp.max_return_time, ev, dir * sigma,
                                                      1, vp.integ, copt);
                return std::array<double, 2>{fc.crossings[0].state[0],
                                             fc.crossings[0].state[2]};
            };

            SectionMap smap;
            smap.forward = [&](const std::array<double, 2>& p) {
                return one_cross(p, dir_detect);
            };
            smap.backward = [&](const std::array<double, 2>& p) {
                return one_cross(p, -dir_detect);
            };

            // seed and guard through the chart, coordinates (x, z)
            auto b0 = base_curve.eval(0.0);
            std::vector<double> q0 = {b0[0], vp.section_y, b0[1]};
            std::vector<double> s3 = doubling::octant_chart_inverse(signs, q0);
            std::array<double, 2> seed = {s3[0], s3[2]};

            auto base_guard = guard_box_for(base_curve);
            DetectParams prm = vp.detect;
            prm.require_positive_first = false;
            std::array<std::array<double, 2>, 2> g;
            for (int j = 0; j < 2; ++j) {
                int axis = j == 0 ? 0 : 2; // octant signs index: x, z
                double lo = std::max(base_guard[0][j], -1.0 + 1e-9);
                double hi = base_guard[1][j];
                double a = signs[axis] * std::sqrt(lo + 1.0);
                double b = signs[axis] * std::sqrt(hi + 1.0);
                g[0][j] = std::min(a, b);
                g[1][j] = std::max(a, b);
            }
            prm.guard = g;

            rep.curve = detect_invariant_curve(smap, seed, prm);

            // the curve must stay strictly inside its octant
            for (int i = 0; i < 256; ++i) {
                auto p = rep.curve.eval(TWO_PI * i / 256);
                if (!(signs[0] * p[0] > 0) || !(signs[2] * p[1] > 0))
                    throw CertificationError("curve leaves its octant");
            }

            auto rv = transverse_rate(smap, rep.curve);
            bool att_in_detect_time = rv.attracting;
            rep.attracting = dir_detect > 0 ? att_in_detect_time : !att_in_detect_time;
            rep.transverse_rate = dir_detect > 0 ? rv.rate : 1.0 / rv.rate;

            // chart image of the detected curve vs the base curve
            std::vector<std::array<double, 2>> proj(256);
            for (int i = 0; i < 256; ++i) {
                auto p = rep.curve.eval(TWO_PI * i / 256);
                proj[i] = {p[0] * p[0] - 1.0, p[1] * p[1] - 1.0};
            }
            auto pc = detail::fit_point_cloud(proj, vp.refit_modes);
            rep.hausdorff_to_base = fourier::hausdorff(pc.curve, base_curve.curve);
            rep.found = true;
        } catch (const CertificationError& e) {
            rep.note = e.what();
        }
        reports[oi] = std::move(rep);
    });
    return reports;
}

} // namespace torusforge::tori
