#pragma once

// Minimal static SVG charts. The CSV emitters are the exact outputs; these
// are for eyeballing.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "slce/errors.hpp"

namespace slce {

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

namespace detail {

inline const char* palette(std::size_t i)
{
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    double width = 640, height = 480, margin = 60;

    double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
    double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

inline Frame make_frame(double xmin, double xmax, double ymin, double ymax)
{
    auto pad = [](double& lo, double& hi) {
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double p = 0.05 * (hi - lo);
        lo -= p;
        hi += p;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);
    return Frame{xmin, xmax, ymin, ymax};
}

inline void axes(std::ostringstream& s, const Frame& f, const std::string& xlabel, const std::string& ylabel)
{
    s << "<rect x=\"0\" y=\"0\" width=\"" << f.width << "\" height=\"" << f.height << "\" fill=\"white\"/>\n";
    s << "<line x1=\"" << f.margin << "\" y1=\"" << f.height - f.margin << "\" x2=\"" << f.width - f.margin
      << "\" y2=\"" << f.height - f.margin << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << f.margin << "\" y1=\"" << f.margin << "\" x2=\"" << f.margin << "\" y2=\""
      << f.height - f.margin << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = f.x0 + (f.x1 - f.x0) * t / 4.0, yv = f.y0 + (f.y1 - f.y0) * t / 4.0;
        s << "<text x=\"" << fmt(f.px(xv)) << "\" y=\"" << f.height - f.margin + 16
          << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
        s << "<text x=\"" << f.margin - 6 << "\" y=\"" << fmt(f.py(yv)) << "\" font-size=\"10\" text-anchor=\"end\">"
          << fmt(yv) << "</text>\n";
    }
    s << "<text x=\"" << f.width / 2 << "\" y=\"" << f.height - 15 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << escape(xlabel) << "</text>\n";
    s << "<text x=\"15\" y=\"" << f.height / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << f.height / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

} // namespace detail

/// Scatter of the first two rows of `coords`. A third row, when present, is
/// shown as a grey-to-red fill ramp and class membership moves to the stroke.
/// Hollow markers (test points) are drawn unfilled.
inline std::string svg_scatter(const Eigen::MatrixXd& coords, const std::vector<int>& classes,
                               const std::vector<std::string>& names, const std::vector<bool>& hollow,
                               const std::string& title)
{
    if (coords.rows() < 2) throw DataError("svg_scatter: need at least two coordinates");
    const auto n = coords.cols();
    const detail::Frame f = n ? detail::make_frame(coords.row(0).minCoeff(), coords.row(0).maxCoeff(),
                                                   coords.row(1).minCoeff(), coords.row(1).maxCoeff())
                              : detail::make_frame(0, 1, 0, 1);
    const bool ramp = coords.rows() >= 3 && n > 0;
    const double zmin = ramp ? coords.row(2).minCoeff() : 0.0, zmax = ramp ? coords.row(2).maxCoeff() : 1.0;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height << "\">\n";
    detail::axes(s, f, "coord 1", "coord 2");
    s << "<text x=\"" << f.width / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << detail::escape(title)
      << "</text>\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        const char* cls = detail::palette(static_cast<std::size_t>(classes[static_cast<std::size_t>(i)]));
        std::string fill = cls;
        if (ramp) {
            const double t = zmax > zmin ? (coords(2, i) - zmin) / (zmax - zmin) : 0.5;
            char buf[16];
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(160 + 95 * t),
                          static_cast<int>(160 * (1 - t)), static_cast<int>(160 * (1 - t)));
            fill = buf;
        }
        if (hollow[static_cast<std::size_t>(i)]) fill = "none";
        s << "<circle cx=\"" << detail::fmt(f.px(coords(0, i))) << "\" cy=\"" << detail::fmt(f.py(coords(1, i)))
          << "\" r=\"3\" fill=\"" << fill << "\" stroke=\"" << cls << "\"/>\n";
    }
    // legend
    std::vector<std::string> seen;
    int row = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto c = static_cast<std::size_t>(classes[i]);
        if (std::find(seen.begin(), seen.end(), names[i]) != seen.end()) continue;
        seen.push_back(names[i]);
        s << "<circle cx=\"" << f.width - 110 << "\" cy=\"" << 40 + 14 * row << "\" r=\"4\" fill=\""
          << detail::palette(c) << "\"/><text x=\"" << f.width - 100 << "\" y=\"" << 44 + 14 * row
          << "\" font-size=\"11\">" << detail::escape(names[i]) << "</text>\n";
        ++row;
    }
    s << "</svg>\n";
    return s.str();
}

inline std::string svg_lines(const std::vector<SvgSeries>& series, const std::string& xlabel, const std::string& ylabel)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& sr : series)
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            xmin = std::min(xmin, sr.x[i]);
            xmax = std::max(xmax, sr.x[i]);
            ymin = std::min(ymin, sr.y[i]);
            ymax = std::max(ymax, sr.y[i]);
        }
    if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
    const detail::Frame f = detail::make_frame(xmin, xmax, ymin, ymax);

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height << "\">\n";
    detail::axes(s, f, xlabel, ylabel);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& sr = series[k];
        s << "<polyline fill=\"none\" stroke=\"" << detail::palette(k) << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < sr.x.size(); ++i) s << detail::fmt(f.px(sr.x[i])) << ',' << detail::fmt(f.py(sr.y[i])) << ' ';
        s << "\"/>\n";
        for (std::size_t i = 0; i < sr.x.size(); ++i)
            s << "<circle cx=\"" << detail::fmt(f.px(sr.x[i])) << "\" cy=\"" << detail::fmt(f.py(sr.y[i]))
              << "\" r=\"3\" fill=\"" << detail::palette(k) << "\"/>\n";
        s << "<text x=\"" << f.width - f.margin + 5 << "\" y=\"" << f.margin + 14 * static_cast<int>(k)
          << "\" font-size=\"11\" fill=\"" << detail::palette(k) << "\">" << detail::escape(sr.name) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

inline void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << contents;
    if (!out) throw DataError("failed writing '" + path + "'");
}

} // namespace slce
