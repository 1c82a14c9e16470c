#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace torusforge::odeint {

using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;
// Row-major n x n Jacobian of the right hand side at (t, y).
using Jacobian = std::function<void(double, std::span<const double>, std::span<double>)>;
using EventFn = std::function<double(std::span<const double>)>;

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;
    int direction = 0;      // 0: infer from t_span; otherwise must match it
    double fixed_step = 0;  // > 0 disables adaptivity (order studies)

    void validate() const {
        if (!(rel_tol > 0) || !(abs_tol > 0))
            throw InputError("integrator tolerances must be positive");
        if (!(max_step > 0)) throw InputError("max_step must be positive");
        if (max_steps < 1) throw InputError("max_steps must be positive");
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau, classic coefficients.
inline constexpr double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double A21 = 1.0 / 5;
inline constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
inline constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
inline constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                        A54 = -212.0 / 729;
inline constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                        A64 = 49.0 / 176, A65 = -5103.0 / 18656;
inline constexpr double B[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                -2187.0 / 6784, 11.0 / 84, 0.0};
// Difference between the 5th and embedded 4th order weights.
inline constexpr double E[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// Free quartic interpolant: y(t0 + s h) = y0 + h * sum_m (K^T P)_m s^{m+1}.
inline constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0}};

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace detail

// One accepted step with its quartic interpolant.
struct DenseStep {
    double t0 = 0;
    double h = 0;
    std::vector<double> y0;
    std::vector<double> q; // n x 4, row i holds the polynomial for component i

    int dim() const { return static_cast<int>(y0.size()); }
    double t1() const { return t0 + h; }

    void eval(double t, std::span<double> out) const {
        double s = (t - t0) / h;
        const int n = dim();
        double p1 = s, p2 = s * s, p3 = p2 * s, p4 = p3 * s;
        for (int i = 0; i < n; ++i) {
            const double* qi = q.data() + 4 * i;
            out[i] = y0[i] + h * (qi[0] * p1 + qi[1] * p2 + qi[2] * p3 + qi[3] * p4);
        }
    }

    void derivative(double t, std::span<double> out) const {
        double s = (t - t0) / h;
        const int n = dim();
        double d1 = 1.0, d2 = 2.0 * s, d3 = 3.0 * s * s, d4 = 4.0 * s * s * s;
        for (int i = 0; i < n; ++i) {
            const double* qi = q.data() + 4 * i;
            out[i] = qi[0] * d1 + qi[1] * d2 + qi[2] * d3 + qi[3] * d4;
        }
    }
};

// Immutable record of one integration: endpoint plus per-step interpolants.
class Trajectory {
public:
    Trajectory(int dim, double t_start, double rel_tol, double abs_tol)
        : dim_(dim), t_start_(t_start), t_end_(t_start), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

    int dim() const { return dim_; }
    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    const std::vector<double>& y_end() const { return y_end_; }
    const std::vector<DenseStep>& steps() const { return steps_; }
    double rel_tol() const { return rel_tol_; }
    double abs_tol() const { return abs_tol_; }

    void eval(double t, std::span<double> out) const { step_at(t).eval(t, out); }

    std::vector<double> eval(double t) const {
        std::vector<double> out(dim_);
        eval(t, out);
        return out;
    }

    void derivative(double t, std::span<double> out) const { step_at(t).derivative(t, out); }

    // internal use by the driver
    void push(DenseStep s) {
        t_end_ = s.t1();
        steps_.push_back(std::move(s));
    }
    void set_end(std::vector<double> y) { y_end_ = std::move(y); }

private:
    const DenseStep& step_at(double t) const {
        if (steps_.empty()) throw InputError("empty trajectory");
        double dir = steps_.front().h > 0 ? 1.0 : -1.0;
        double slack = 1e-9 * (std::abs(t_end_ - t_start_) + 1.0);
        if ((t - t_start_) * dir < -slack || (t - t_end_) * dir > slack)
            throw InputError("evaluation time outside trajectory span");
        // binary search over step start times
        size_t lo = 0, hi = steps_.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi + 1) / 2;
            if ((t - steps_[mid].t0) * dir >= 0)
                lo = mid;
            else
                hi = mid - 1;
        }
        return steps_[lo];
    }

    int dim_;
    double t_start_, t_end_;
    double rel_tol_, abs_tol_;
    std::vector<double> y_end_;
    std::vector<DenseStep> steps_;
};

namespace detail {

// Hairer-style starting step size guess.
inline double initial_step(const Rhs& rhs, double t0, std::span<const double> y0,
                           std::span<const double> f0, double dir, double span,
                           const IntegratorConfig& cfg) {
    const int n = static_cast<int>(y0.size());
    double d0 = 0, d1 = 0;
    for (int i = 0; i < n; ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);

    std::vector<double> y1(n), f1(n);
    for (int i = 0; i < n; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
    rhs(t0 + dir * h0, y1, f1);
    double d2 = 0;
    for (int i = 0; i < n; ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
        double df = (f1[i] - f0[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / n) / h0;
    double h1 = (std::max(d1, d2) <= 1e-15)
                    ? std::max(1e-6, h0 * 1e-3)
                    : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100 * h0, h1, span, cfg.max_step});
}

// Core adaptive loop.  The sink sees every accepted DenseStep and returns
// false to stop early; `final_y` receives the state at the end of the last
// accepted step.
template <typename Sink>
inline void drive(const Rhs& rhs, std::span<const double> y0, double t0, double t1,
                  const IntegratorConfig& cfg, Sink&& sink, std::vector<double>& final_y) {
    cfg.validate();
    const int n = static_cast<int>(y0.size());
    if (n == 0) throw InputError("empty state vector");
    const double span = std::abs(t1 - t0);
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    if (cfg.direction != 0 && cfg.direction != static_cast<int>(dir))
        throw InputError("config direction contradicts the time span");

    std::vector<double> y(y0.begin(), y0.end());
    final_y = y;
    if (span == 0) return;

    std::vector<std::vector<double>> K(7, std::vector<double>(n));
    std::vector<double> ytmp(n), ynew(n), yerr(n);

    rhs(t0, y, K[0]);
    if (!all_finite(K[0]))
        throw IntegrationError("nonfinite right hand side at the initial point");

    double h = cfg.fixed_step > 0
                   ? std::min(cfg.fixed_step, span)
                   : initial_step(rhs, t0, y, K[0], dir, span, cfg);
    double t = t0;
    double facold = 1e-4;
    bool reject = false;
    int bad_evals = 0;
    long nsteps = 0;

    const double safety = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    const double fac_min = 0.2, fac_max_normal = 10.0;

    while ((t1 - t) * dir > 0) {
        if (++nsteps > cfg.max_steps)
            throw IntegrationError("step budget exhausted after " +
                                   std::to_string(cfg.max_steps) + " steps");
        h = std::min({h, cfg.max_step, std::abs(t1 - t)});
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            // a sub-ulp remainder at the endpoint is roundoff from summing
            // the accepted steps, not a stiffness failure
            if (std::abs(t1 - t) <= 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)}))
                break;
            throw IntegrationError("step size underflow at t = " + std::to_string(t));
        }
        const double hs = dir * h;

        auto stage = [&](int k, double c, auto&&... aw) {
            int idx = 0;
            double acc[6] = {};
            ((acc[idx++] = aw), ...);
            for (int i = 0; i < n; ++i) {
                double s = 0;
                for (int j = 0; j < idx; ++j) s += acc[j] * K[j][i];
                ytmp[i] = y[i] + hs * s;
            }
            rhs(t + c * hs, ytmp, K[k]);
        };
        using detail::A21;
        stage(1, detail::C[1], A21);
        stage(2, detail::C[2], detail::A31, detail::A32);
        stage(3, detail::C[3], detail::A41, detail::A42, detail::A43);
        stage(4, detail::C[4], detail::A51, detail::A52, detail::A53, detail::A54);
        stage(5, detail::C[5], detail::A61, detail::A62, detail::A63, detail::A64, detail::A65);
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < 6; ++j) s += detail::B[j] * K[j][i];
            ynew[i] = y[i] + hs * s;
        }
        rhs(t + hs, ynew, K[6]); // FSAL stage, also feeds the interpolant

        bool finite = all_finite(ynew);
        for (int j = 1; finite && j < 7; ++j) finite = all_finite(K[j]);
        if (!finite) {
            if (++bad_evals > 25)
                throw IntegrationError("persistent nonfinite right hand side near t = " +
                                       std::to_string(t));
            h *= 0.25;
            reject = true;
            continue;
        }
        bad_evals = 0;

        double err = 0;
        for (int i = 0; i < n; ++i) {
            double e = 0;
            for (int j = 0; j < 7; ++j) e += detail::E[j] * K[j][i];
            e *= hs;
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);

        if (cfg.fixed_step > 0 || err <= 1.0) {
            DenseStep ds;
            ds.t0 = t;
            ds.h = hs;
            ds.y0 = y;
            ds.q.resize(4 * n);
            for (int i = 0; i < n; ++i)
                for (int m = 0; m < 4; ++m) {
                    double s = 0;
                    for (int j = 0; j < 7; ++j) s += K[j][i] * detail::P[j][m];
                    ds.q[4 * i + m] = s;
                }

            t += hs;
            y = ynew;
            final_y = y;
            std::swap(K[0], K[6]); // FSAL

            if (cfg.fixed_step <= 0) {
                double fac11 = std::pow(std::max(err, 1e-16), expo1);
                double fac = fac11 / std::pow(facold, beta);
                double fac_max = reject ? 1.0 : fac_max_normal;
                fac = std::clamp(safety / fac, fac_min, fac_max);
                h *= fac;
                facold = std::max(err, 1e-4);
            }
            reject = false;

            if (!sink(ds)) return;
        } else {
            double fac11 = std::pow(err, expo1);
            h /= std::min(1.0 / fac_min, fac11 / safety);
            reject = true;
        }
    }
}

} // namespace detail

// Full integration with stored dense output.
inline Trajectory integrate(const Rhs& rhs, std::span<const double> y0, double t0, double t1,
                            const IntegratorConfig& cfg = {}) {
    Trajectory traj(static_cast<int>(y0.size()), t0, cfg.rel_tol, cfg.abs_tol);
    std::vector<double> yf;
    detail::drive(rhs, y0, t0, t1, cfg, [&](const DenseStep& s) {
        traj.push(s);
        return true;
    }, yf);
    traj.set_end(std::move(yf));
    return traj;
}

// Endpoint only; no step storage.
inline std::vector<double> integrate_to(const Rhs& rhs, std::span<const double> y0, double t0,
                                        double t1, const IntegratorConfig& cfg = {}) {
    std::vector<double> yf;
    detail::drive(rhs, y0, t0, t1, cfg, [](const DenseStep&) { return true; }, yf);
    return yf;
}

struct VariationalResult {
    std::vector<double> state;       // n
    std::vector<double> fundamental; // n x n row-major, identity at t0
};

// Integrates the n + n^2 augmented system  y' = f(t,y),  M' = J(t,y) M.
inline VariationalResult integrate_variational(const Rhs& rhs, const Jacobian& jac,
                                               std::span<const double> y0, double t0, double t1,
                                               const IntegratorConfig& cfg = {}) {
    const int n = static_cast<int>(y0.size());
    std::vector<double> aug(n + n * n, 0.0);
    std::copy(y0.begin(), y0.end(), aug.begin());
    for (int i = 0; i < n; ++i) aug[n + i * n + i] = 1.0;

    std::vector<double> J(n * n);
    Rhs aug_rhs = [&, n](double t, std::span<const double> s, std::span<double> ds) {
        rhs(t, s.first(n), ds.first(n));
        jac(t, s.first(n), J);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0;
                for (int k = 0; k < n; ++k) acc += J[r * n + k] * s[n + k * n + c];
                ds[n + r * n + c] = acc;
            }
    };

    std::vector<double> yf = integrate_to(aug_rhs, aug, t0, t1, cfg);
    VariationalResult res;
    res.state.assign(yf.begin(), yf.begin() + n);
    res.fundamental.assign(yf.begin() + n, yf.end());
    return res;
}

// ---------------------------------------------------------------------------
// Section crossings.

struct Crossing {
    double t = 0;
    std::vector<double> state;
    double event_derivative = 0;
};

struct CrossingOptions {
    double t_min = 0.0;          // crossings at |t - t0| <= t_min are ignored
    double event_tol = 1e-12;    // required |event| after root polishing
    double tangent_tol = 1e-8;   // |d(event)/dt| below this: tangential, skip
    int scan_points = 8;         // sign-change scan resolution per step
};

namespace detail {

// Root-polish the event function on one dense step; returns crossings in time
// order.  direction = +1 keeps roots with rising event value, -1 falling,
// 0 both.
inline void scan_step(const DenseStep& ds, const EventFn& event, int direction,
                      double t_origin, const CrossingOptions& opt,
                      std::vector<Crossing>& out, std::vector<std::string>* warnings) {
    const int n = ds.dim();
    const int m = std::max(2, opt.scan_points);
    std::vector<double> buf(n);
    auto g = [&](double t) {
        ds.eval(t, buf);
        return event(buf);
    };

    double prev_t = ds.t0;
    double prev_g = g(prev_t);
    for (int k = 1; k <= m; ++k) {
        double tk = ds.t0 + ds.h * (static_cast<double>(k) / m);
        double gk = g(tk);
        if (prev_g == 0.0 || prev_g * gk > 0.0) {
            prev_t = tk;
            prev_g = gk;
            continue;
        }

        // bisection bracket [a, b] (in integration order), then Newton
        double a = prev_t, b = tk, ga = prev_g;
        for (int it = 0; it < 60 && std::abs(b - a) > 1e-15 * (std::abs(a) + 1.0); ++it) {
            double mid = 0.5 * (a + b);
            double gm = g(mid);
            if (gm == 0.0) { a = b = mid; break; }
            if (ga * gm < 0) b = mid;
            else { a = mid; ga = gm; }
        }
        double root = 0.5 * (a + b);
        double dt = std::max(1e-7 * std::abs(ds.h), 1e-12);
        auto dg = [&](double t) { return (g(t + dt) - g(t - dt)) / (2 * dt); };
        for (int it = 0; it < 8; ++it) {
            double gv = g(root), dv = dg(root);
            if (std::abs(gv) <= 0.01 * opt.event_tol || dv == 0.0) break;
            double next = root - gv / dv;
            double lo = std::min(ds.t0, ds.t1()), hi = std::max(ds.t0, ds.t1());
            if (next < lo || next > hi) break;
            root = next;
        }

        double gval = g(root);
        double slope = dg(root);
        prev_t = tk;
        prev_g = gk;

        if (std::abs(root - t_origin) <= opt.t_min) continue;
        if (std::abs(slope) < opt.tangent_tol) {
            if (warnings)
                warnings->push_back("tangential crossing skipped at t = " +
                                    std::to_string(root));
            continue;
        }
        // slope is d(event)/dt in physical time, whatever the integration direction
        if (direction != 0 && slope * direction < 0) continue;
        if (std::abs(gval) > opt.event_tol)
            throw InternalError("crossing polish left |event| = " + std::to_string(gval));
        if (!out.empty() && std::abs(out.back().t - root) <=
                                1e-10 * (1.0 + std::abs(root)))
            continue;

        Crossing c;
        c.t = root;
        c.state.resize(n);
        ds.eval(root, c.state);
        c.event_derivative = slope;
        out.push_back(std::move(c));
    }
}

} // namespace detail

// All crossings (up to max_count) of a stored trajectory.
inline std::vector<Crossing> find_crossings(const Trajectory& traj, const EventFn& event,
                                            int direction, int max_count,
                                            const CrossingOptions& opt = {},
                                            std::vector<std::string>* warnings = nullptr) {
    std::vector<Crossing> out;
    for (const DenseStep& ds : traj.steps()) {
        detail::scan_step(ds, event, direction, traj.t_start(), opt, out, warnings);
        if (max_count > 0 && static_cast<int>(out.size()) >= max_count) {
            out.resize(max_count);
            break;
        }
    }
    return out;
}

struct FlowCrossings {
    std::vector<Crossing> crossings;
    std::vector<double> final_state; // state at the last crossing
};

// Integrates until `count` oriented crossings are found; throws if the time
// cap arrives first (the requested count is part of the contract).
inline FlowCrossings integrate_crossings(const Rhs& rhs, std::span<const double> y0, double t0,
                                         double t_cap, const EventFn& event, int direction,
                                         int count, const IntegratorConfig& cfg = {},
                                         const CrossingOptions& opt = {},
                                         std::vector<std::string>* warnings = nullptr) {
    if (count < 1) throw InputError("crossing count must be >= 1");
    FlowCrossings fc;
    std::vector<double> yf;
    detail::drive(rhs, y0, t0, t_cap, cfg, [&](const DenseStep& ds) {
        detail::scan_step(ds, event, direction, t0, opt, fc.crossings, warnings);
        return static_cast<int>(fc.crossings.size()) < count;
    }, yf);
    if (static_cast<int>(fc.crossings.size()) < count)
        throw IntegrationError("only " + std::to_string(fc.crossings.size()) + " of " +
                               std::to_string(count) + " requested crossings before the time cap");
    fc.crossings.resize(count);
    fc.final_state = fc.crossings.back().state;
    return fc;
}

} // namespace torusforge::odeint
