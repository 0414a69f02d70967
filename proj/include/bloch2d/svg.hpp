#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "bloch2d/geometry.hpp"

namespace bloch2d {

/// One polyline in data coordinates.
struct SvgSeries {
    std::string label;
    std::string color = "#000000";
    std::string dash;  // e.g. "6,4"; empty = solid
    std::vector<Vec2> points;
};

namespace detail {

inline std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// A round tick step covering span/target intervals.
inline double tick_step(double span, int target = 5) {
    if (span <= 0.0) return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace detail

/// Minimal line plot. A pure function of the series rows: same input, same
/// bytes out.
inline void write_svg_plot(std::ostream& out, const std::vector<SvgSeries>& series,
                           const std::string& title, const std::string& xlabel,
                           const std::string& ylabel, bool equal_aspect = false,
                           int width = 720, int height = 540) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            if (first) {
                xmin = xmax = p.x;
                ymin = ymax = p.y;
                first = false;
            }
            xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
        }
    }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    if (equal_aspect) {
        const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
        const double half = 0.5 * std::max(xmax - xmin, ymax - ymin);
        xmin = cx - half; xmax = cx + half;
        ymin = cy - half; ymax = cy + half;
    }
    const double padx = 0.05 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

    const int ml = 64, mr = 16, mt = 36, mb = 48;  // margins
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto X = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
    auto Y = [&](double y) { return mt + ph * (ymax - y) / (ymax - ymin); };

    using detail::fmt6;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // frame
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << fmt6(pw)
        << "\" height=\"" << fmt6(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // ticks
    const double sx = detail::tick_step(xmax - xmin);
    for (double x = std::ceil(xmin / sx) * sx; x <= xmax + 1e-12 * sx; x += sx) {
        out << "<line x1=\"" << fmt6(X(x)) << "\" y1=\"" << mt + ph << "\" x2=\""
            << fmt6(X(x)) << "\" y2=\"" << fmt6(mt + ph + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt6(X(x)) << "\" y=\"" << fmt6(mt + ph + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" << fmt6(x) << "</text>\n";
    }
    const double sy = detail::tick_step(ymax - ymin);
    for (double y = std::ceil(ymin / sy) * sy; y <= ymax + 1e-12 * sy; y += sy) {
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt6(Y(y)) << "\" x2=\"" << ml
            << "\" y2=\"" << fmt6(Y(y)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt6(Y(y) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt6(y) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << ylabel
        << "</text>\n";

    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
        out << " points=\"";
        for (const auto& p : s.points)
            out << fmt6(X(p.x)) << "," << fmt6(Y(p.y)) << " ";
        out << "\"/>\n";
    }

    // legend, top-left inside the frame
    int ly = mt + 16;
    for (const auto& s : series) {
        out << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + 34
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
        if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
        out << "/>\n";
        out << "<text x=\"" << ml + 40 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
            << "</text>\n";
        ly += 16;
    }
    out << "</svg>\n";
}

}  // namespace bloch2d
