#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace torusforge::svg {

// Minimal section-portrait renderer: polylines and point clouds in data
// coordinates, mapped onto a fixed canvas with equal margins.  Pure string
// formatting; no drawing dependency.

struct Polyline {
    std::vector<std::array<double, 2>> pts;
    std::string color = "#000000";
    double width = 1.5;
    bool closed = false;
    bool dashed = false;
};

struct Dots {
    std::vector<std::array<double, 2>> pts;
    std::string color = "#000000";
    double radius = 1.5;
};

struct Portrait {
    std::vector<Polyline> lines;
    std::vector<Dots> dots;
    std::string title;
    int canvas = 640;   // px, square
    int margin = 40;    // px on every side
};

namespace detail {

inline void grow(std::array<double, 4>& box, const std::array<double, 2>& p) {
    box[0] = std::min(box[0], p[0]);
    box[1] = std::max(box[1], p[0]);
    box[2] = std::min(box[2], p[1]);
    box[3] = std::max(box[3], p[1]);
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace detail

inline std::string render(const Portrait& p) {
    std::array<double, 4> box = {std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity()};
    for (const auto& l : p.lines)
        for (const auto& q : l.pts) detail::grow(box, q);
    for (const auto& d : p.dots)
        for (const auto& q : d.pts) detail::grow(box, q);
    if (!(box[0] <= box[1]) || !(box[2] <= box[3]))
        throw InputError("portrait has no points to render");

    // equal-aspect map of the data box onto the canvas, y up
    double spanx = std::max(box[1] - box[0], 1e-12);
    double spany = std::max(box[3] - box[2], 1e-12);
    double inner = p.canvas - 2.0 * p.margin;
    double scale = inner / std::max(spanx, spany);
    double cx = (box[0] + box[1]) / 2, cy = (box[2] + box[3]) / 2;
    auto X = [&](double x) { return p.canvas / 2.0 + (x - cx) * scale; };
    auto Y = [&](double y) { return p.canvas / 2.0 - (y - cy) * scale; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(p.canvas) +
           "\" height=\"" + std::to_string(p.canvas) + "\" viewBox=\"0 0 " +
           std::to_string(p.canvas) + " " + std::to_string(p.canvas) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!p.title.empty())
        out += "<text x=\"" + std::to_string(p.margin) + "\" y=\"24\" font-family=\"monospace\" "
               "font-size=\"14\">" + p.title + "</text>\n";
    for (const auto& d : p.dots) {
        out += "<g fill=\"" + d.color + "\">\n";
        for (const auto& q : d.pts)
            out += "<circle cx=\"" + detail::fmt(X(q[0])) + "\" cy=\"" + detail::fmt(Y(q[1])) +
                   "\" r=\"" + detail::fmt(d.radius) + "\"/>\n";
        out += "</g>\n";
    }
    for (const auto& l : p.lines) {
        if (l.pts.size() < 2) continue;
        out += "<path fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"" +
               detail::fmt(l.width) + "\"";
        if (l.dashed) out += " stroke-dasharray=\"6 4\"";
        out += " d=\"M";
        for (size_t i = 0; i < l.pts.size(); ++i) {
            out += (i ? " L" : " ");
            out += detail::fmt(X(l.pts[i][0])) + " " + detail::fmt(Y(l.pts[i][1]));
        }
        if (l.closed) out += " Z";
        out += "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace torusforge::svg
