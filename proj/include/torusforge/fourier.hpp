#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace torusforge::fourier {

// f(phi) = c0 + sum_{k=1..M} a[k-1] cos(k phi) + b[k-1] sin(k phi)
struct Series {
    double c0 = 0;
    std::vector<double> a, b;

    int modes() const { return static_cast<int>(a.size()); }

    double eval(double phi) const {
        double s = c0;
        for (size_t k = 0; k < a.size(); ++k) {
            double w = (k + 1) * phi;
            s += a[k] * std::cos(w) + b[k] * std::sin(w);
        }
        return s;
    }

    double deriv(double phi) const {
        double s = 0;
        for (size_t k = 0; k < a.size(); ++k) {
            double m = static_cast<double>(k + 1), w = m * phi;
            s += m * (b[k] * std::cos(w) - a[k] * std::sin(w));
        }
        return s;
    }

    double deriv2(double phi) const {
        double s = 0;
        for (size_t k = 0; k < a.size(); ++k) {
            double m = static_cast<double>(k + 1), w = m * phi;
            s -= m * m * (a[k] * std::cos(w) + b[k] * std::sin(w));
        }
        return s;
    }
};

// Closed planar curve phi -> (x(phi), y(phi)), 2 pi periodic.
struct Curve2 {
    Series x, y;

    std::array<double, 2> eval(double phi) const { return {x.eval(phi), y.eval(phi)}; }
    std::array<double, 2> deriv(double phi) const { return {x.deriv(phi), y.deriv(phi)}; }
    std::array<double, 2> deriv2(double phi) const { return {x.deriv2(phi), y.deriv2(phi)}; }
};

// Least squares Fourier fit of scattered closed-curve samples.
inline Curve2 fit_closed_curve(std::span<const double> phi,
                               std::span<const std::array<double, 2>> pts, int modes) {
    const int n = static_cast<int>(phi.size());
    if (n != static_cast<int>(pts.size())) throw InputError("fit: angle/point count mismatch");
    if (modes < 0) throw InputError("fit: negative mode count");
    const int cols = 2 * modes + 1;
    if (n < cols) throw InputError("fit: fewer samples than Fourier coefficients");

    Eigen::MatrixXd A(n, cols);
    Eigen::MatrixXd B(n, 2);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        for (int k = 1; k <= modes; ++k) {
            A(i, 2 * k - 1) = std::cos(k * phi[i]);
            A(i, 2 * k) = std::sin(k * phi[i]);
        }
        B(i, 0) = pts[i][0];
        B(i, 1) = pts[i][1];
    }
    Eigen::MatrixXd X = A.colPivHouseholderQr().solve(B);

    Curve2 c;
    c.x.c0 = X(0, 0);
    c.y.c0 = X(0, 1);
    c.x.a.resize(modes);
    c.x.b.resize(modes);
    c.y.a.resize(modes);
    c.y.b.resize(modes);
    for (int k = 1; k <= modes; ++k) {
        c.x.a[k - 1] = X(2 * k - 1, 0);
        c.x.b[k - 1] = X(2 * k, 0);
        c.y.a[k - 1] = X(2 * k - 1, 1);
        c.y.b[k - 1] = X(2 * k, 1);
    }
    return c;
}

// Parameter of the curve point closest to p: coarse scan plus Newton on the
// squared-distance derivative.
inline double nearest_param(const Curve2& c, const std::array<double, 2>& p,
                            int coarse = 256) {
    constexpr double TWO_PI = 2 * std::numbers::pi;
    double best = 0, best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < coarse; ++i) {
        double ph = TWO_PI * i / coarse;
        auto q = c.eval(ph);
        double d2 = (q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = ph;
        }
    }
    double ph = best;
    for (int it = 0; it < 8; ++it) {
        auto q = c.eval(ph), d = c.deriv(ph), dd = c.deriv2(ph);
        double rx = q[0] - p[0], ry = q[1] - p[1];
        double g = rx * d[0] + ry * d[1];
        double h = d[0] * d[0] + d[1] * d[1] + rx * dd[0] + ry * dd[1];
        if (h <= 0) break; // not a local minimum profile; keep the scan value
        double step = g / h;
        if (std::abs(step) > TWO_PI / coarse) break;
        ph -= step;
        if (std::abs(step) < 1e-14) break;
    }
    auto q = c.eval(ph);
    double d2 = (q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]);
    return d2 <= best_d2 ? ph : best;
}

inline double distance_to(const Curve2& c, const std::array<double, 2>& p, int coarse = 256) {
    auto q = c.eval(nearest_param(c, p, coarse));
    return std::hypot(q[0] - p[0], q[1] - p[1]);
}

// Symmetric Hausdorff distance via dense sampling with polished projections.
inline double hausdorff(const Curve2& a, const Curve2& b, int samples = 1024) {
    constexpr double TWO_PI = 2 * std::numbers::pi;
    auto one_sided = [samples](const Curve2& from, const Curve2& to) {
        double worst = 0;
        for (int i = 0; i < samples; ++i)
            worst = std::max(worst, distance_to(to, from.eval(TWO_PI * i / samples)));
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

} // namespace torusforge::fourier
