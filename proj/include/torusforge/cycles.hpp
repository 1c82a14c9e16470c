#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "odeint.hpp"
#include "poly.hpp"
#include "vfields.hpp"

namespace torusforge::cycles {

struct CycleOptions {
    double residual_tol = 1e-10;     // |P(s) - s| required at the fixed point
    int relax_iters = 30;            // return map iterations before Newton
    int newton_iters = 25;
    double min_period = 1e-3;        // returns earlier than this are ignored
    double max_return_time = 200.0;
    double escape_radius = 50.0;     // section distance from the guess treated as escape
    double hyperbolicity_margin = 1e-3; // reject |multiplier - 1| below this
    int sample_count = 256;
    bool allow_time_reversal = true;
    int reanchor_retries = 3; // failed sections are rebuilt downstream of the flow
    odeint::IntegratorConfig integ{};
};

struct LimitCycle {
    std::array<double, 2> point{};   // fixed point of the return map
    double period = 0;
    double multiplier = 0;           // nontrivial Floquet multiplier, forward time
    double residual = 0;             // |P(s) - s| at acceptance
    bool attracting = false;
    bool via_time_reversal = false;  // certified on the reversed field
    std::vector<std::array<double, 2>> samples; // forward-time order, samples[0] near point
};

namespace detail {

struct SearchFail {
    std::string why;
};

// Planar polynomial flow with its exact Jacobian, compiled once.
class PlanarFlow {
public:
    PlanarFlow(const Poly& px, const Poly& py)
        : fx_(px), fy_(py), dxx_(px.partial(0)), dxy_(px.partial(1)),
          dyx_(py.partial(0)), dyy_(py.partial(1)) {}

    void field(const double* y, double* out) const {
        std::span<const double> v(y, 2);
        out[0] = fx_.eval(v);
        out[1] = fy_.eval(v);
    }

    odeint::Rhs rhs() const {
        return [this](double, std::span<const double> y, std::span<double> dy) {
            double v[2] = {y[0], y[1]};
            dy[0] = fx_.eval(v);
            dy[1] = fy_.eval(v);
        };
    }

    // state (x, y, m11, m12, m21, m22), M' = J M
    odeint::Rhs rhs_variational() const {
        return [this](double, std::span<const double> y, std::span<double> dy) {
            double v[2] = {y[0], y[1]};
            dy[0] = fx_.eval(v);
            dy[1] = fy_.eval(v);
            double a = dxx_.eval(v), b = dxy_.eval(v);
            double c = dyx_.eval(v), d = dyy_.eval(v);
            dy[2] = a * y[2] + b * y[4];
            dy[3] = a * y[3] + b * y[5];
            dy[4] = c * y[2] + d * y[4];
            dy[5] = c * y[3] + d * y[5];
        };
    }

private:
    CompiledPoly fx_, fy_, dxx_, dxy_, dyx_, dyy_;
};

struct ReturnEval {
    double s_out = 0;
    double t_ret = 0;
    std::array<double, 2> point{};
    std::array<double, 4> M{}; // row-major fundamental matrix, variational runs only
    double dp = 0;             // return map derivative, variational runs only
};

// Poincare section through the anchor, normal along the field there. The
// section coordinate s runs along the in-plane tangent.
class Shooter {
public:
    Shooter(const PlanarFlow& flow, std::array<double, 2> anchor, const CycleOptions& opt)
        : flow_(flow), a_(anchor), opt_(opt) {
        double f[2];
        flow_.field(a_.data(), f);
        double nf = std::hypot(f[0], f[1]);
        if (nf < 1e-12) throw InputError("cycle guess is an equilibrium of the field");
        n_ = {f[0] / nf, f[1] / nf};
        t_ = {-n_[1], n_[0]};
    }

    std::array<double, 2> point_at(double s) const {
        return {a_[0] + s * t_[0], a_[1] + s * t_[1]};
    }

    double coord(const double* p) const {
        return t_[0] * (p[0] - a_[0]) + t_[1] * (p[1] - a_[1]);
    }

    ReturnEval map(double s, bool variational) const {
        odeint::EventFn ev = [this](std::span<const double> y) {
            return n_[0] * (y[0] - a_[0]) + n_[1] * (y[1] - a_[1]);
        };
        odeint::CrossingOptions copt;
        copt.t_min = opt_.min_period;
        auto p0 = point_at(s);
        ReturnEval out;
        if (variational) {
            std::vector<double> y0 = {p0[0], p0[1], 1, 0, 0, 1};
            auto fc = odeint::integrate_crossings(flow_.rhs_variational(), y0, 0.0,
                                                  opt_.max_return_time, ev, +1, 1,
                                                  opt_.integ, copt);
            const auto& c = fc.crossings.front();
            out.t_ret = c.t;
            out.point = {c.state[0], c.state[1]};
            out.M = {c.state[2], c.state[3], c.state[4], c.state[5]};
            // remove the return-time variation from the monodromy action
            double f[2];
            flow_.field(out.point.data(), f);
            double nf = n_[0] * f[0] + n_[1] * f[1];
            if (std::abs(nf) < 1e-12) throw SearchFail{"return is tangent to the section"};
            double v0 = out.M[0] * t_[0] + out.M[1] * t_[1];
            double v1 = out.M[2] * t_[0] + out.M[3] * t_[1];
            double nv = n_[0] * v0 + n_[1] * v1;
            double w0 = v0 - f[0] * nv / nf;
            double w1 = v1 - f[1] * nv / nf;
            out.dp = t_[0] * w0 + t_[1] * w1;
        } else {
            std::vector<double> y0 = {p0[0], p0[1]};
            auto fc = odeint::integrate_crossings(flow_.rhs(), y0, 0.0, opt_.max_return_time,
                                                  ev, +1, 1, opt_.integ, copt);
            const auto& c = fc.crossings.front();
            out.t_ret = c.t;
            out.point = {c.state[0], c.state[1]};
        }
        out.s_out = coord(out.point.data());
        if (std::abs(out.s_out) > opt_.escape_radius)
            throw SearchFail{"orbit escaped the search radius"};
        return out;
    }

private:
    const PlanarFlow& flow_;
    std::array<double, 2> a_, n_, t_;
    const CycleOptions& opt_;
};

struct LadderResult {
    double s = 0;
    ReturnEval last{};
};

// Relaxation toward the fixed point, then Newton on s -> P(s) - s using the
// variational return derivative.
inline LadderResult run_ladder(const Shooter& sh, const CycleOptions& opt) {
    double s = 0;
    double prev_res = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int i = 0; i < opt.relax_iters; ++i) {
        ReturnEval ev;
        try {
            ev = sh.map(s, false);
        } catch (const IntegrationError& e) {
            throw SearchFail{e.what()};
        }
        double res = std::abs(ev.s_out - s);
        s = ev.s_out;
        if (res <= 1e-6) break;
        if (res >= prev_res) {
            if (++growth >= 3) break; // not contracting; let Newton decide
        } else {
            growth = 0;
        }
        prev_res = res;
    }

    for (int i = 0; i < opt.newton_iters; ++i) {
        ReturnEval ev;
        try {
            ev = sh.map(s, true);
        } catch (const IntegrationError& e) {
            throw SearchFail{e.what()};
        }
        double r = ev.s_out - s;
        if (std::abs(r) <= opt.residual_tol) return {s, ev};
        double denom = ev.dp - 1.0;
        if (!std::isfinite(denom) || std::abs(denom) < 1e-14)
            throw SearchFail{"return map derivative is numerically parabolic"};
        double step = r / denom;
        if (!std::isfinite(step)) throw SearchFail{"newton step is not finite"};
        s -= step;
    }
    throw SearchFail{"newton did not reach the residual tolerance"};
}

} // namespace detail

// Locates a hyperbolic limit cycle near the guess.  If the forward search
// cannot certify (typical for strongly repelling cycles, where one turn
// amplifies state error by the multiplier and the residual floor exceeds the
// tolerance), the reversed field is searched instead and the multiplier is
// inverted back.
inline LimitCycle find_limit_cycle(const Poly& fx, const Poly& fy,
                                   std::array<double, 2> guess,
                                   const CycleOptions& opt = {}) {
    if (fx.nvars() != 2 || fy.nvars() != 2)
        throw InputError("limit cycle search expects a planar field");

    auto run_once = [&](const detail::PlanarFlow& flow, std::array<double, 2> anchor,
                        bool reversed) {
        detail::Shooter sh(flow, anchor, opt);
        auto lad = detail::run_ladder(sh, opt);

        LimitCycle lc;
        lc.point = sh.point_at(lad.s);
        double fp[2];
        flow.field(lc.point.data(), fp);
        if (std::hypot(fp[0], fp[1]) <= 1e-8)
            throw detail::SearchFail{"converged to an equilibrium, not a cycle"};
        lc.period = lad.last.t_ret;
        lc.residual = std::abs(lad.last.s_out - lad.s);
        lc.via_time_reversal = reversed;
        lc.multiplier = reversed ? 1.0 / lad.last.dp : lad.last.dp;

        // Samples promise a pointwise ODE residual well under 1e-8, and any
        // residual measurement differentiates neighbors at spacing T/N,
        // amplifying positional error by ~N/T.  The resampling pass therefore
        // runs a couple of decades tighter than the search tolerances.
        std::array<double, 2> p0 = lc.point;
        auto scfg = opt.integ;
        scfg.rel_tol = std::min(scfg.rel_tol, 1e-12);
        scfg.abs_tol = std::min(scfg.abs_tol, 1e-14);
        auto traj = odeint::integrate(flow.rhs(), p0, 0.0, lc.period, scfg);
        lc.samples.resize(opt.sample_count);
        for (int i = 0; i < opt.sample_count; ++i) {
            double ti = lc.period * i / opt.sample_count;
            auto y = traj.eval(reversed ? lc.period - ti : ti);
            lc.samples[i] = {y[0], y[1]};
        }
        return lc;
    };

    // A section anchored at a poor guess can miss the cycle entirely (the
    // normal tracks the local field, which may point almost radially).  On
    // failure the anchor drifts along the flow toward the attractor, where
    // the local direction is tangent to the cycle and the section transverse.
    auto attempt = [&](const detail::PlanarFlow& flow, bool reversed) {
        std::array<double, 2> anchor = guess;
        for (int round = 0;; ++round) {
            try {
                return run_once(flow, anchor, reversed);
            } catch (const detail::SearchFail& e) {
                if (round >= opt.reanchor_retries) throw;
                try {
                    std::vector<double> drifted = odeint::integrate_to(
                        flow.rhs(), anchor, 0.0, opt.max_return_time / 16.0, opt.integ);
                    anchor = {drifted[0], drifted[1]};
                } catch (const IntegrationError&) {
                    throw e;
                }
            } catch (const InputError& e) {
                // a drifted anchor may park on an equilibrium; only the
                // caller's own guess deserves the typed input error
                if (round == 0) throw;
                throw detail::SearchFail{e.what()};
            }
        }
    };

    auto finalize = [&](LimitCycle lc) {
        if (std::abs(lc.multiplier - 1.0) < opt.hyperbolicity_margin)
            throw CertificationError(
                "return derivative within the unity margin; cycle not certifiably hyperbolic");
        lc.attracting = std::abs(lc.multiplier) < 1.0;
        return lc;
    };

    detail::PlanarFlow fwd(fx, fy);
    try {
        return finalize(attempt(fwd, false));
    } catch (const detail::SearchFail& e1) {
        if (!opt.allow_time_reversal)
            throw CertificationError("limit cycle search failed: " + e1.why);
        detail::PlanarFlow rev(fx.scale(Rational(-1)), fy.scale(Rational(-1)));
        try {
            return finalize(attempt(rev, true));
        } catch (const detail::SearchFail& e2) {
            throw CertificationError("limit cycle search failed forward (" + e1.why +
                                     ") and time reversed (" + e2.why + ")");
        }
    }
}

inline LimitCycle find_limit_cycle(const vfields::PlanarField& f, std::array<double, 2> guess,
                                   const CycleOptions& opt = {}) {
    return find_limit_cycle(f.P, f.Q, guess, opt);
}

inline LimitCycle find_limit_cycle(const vfields::GuidingField& g, std::array<double, 2> guess,
                                   const CycleOptions& opt = {}) {
    return find_limit_cycle(g.g1, g.g2, guess, opt);
}

} // namespace torusforge::cycles
