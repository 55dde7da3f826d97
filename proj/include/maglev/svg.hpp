#pragma once

// Standalone SVG line/scatter plots.  Stable branches render solid, unstable
// ones dashed; everything is emitted with deterministic formatting.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maglev/csv.hpp"
#include "maglev/errors.hpp"

namespace maglev {

struct SvgSeries {
    enum class Kind { Line, Scatter };
    enum class Style { Plain, Stable, Unstable };
    Kind kind = Kind::Line;
    Style style = Style::Plain;
    std::vector<std::pair<double, double>> points;
    std::string label;
};

struct SvgStyle {
    int width = 820;
    int height = 540;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::optional<double> x_min, x_max, y_min, y_max;
};

namespace detail {

inline std::string svg_num(double v) {
    // Plot coordinates do not need full round-trip precision.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    return palette[i % 6];
}

} // namespace detail

inline std::string render_svg(const std::vector<SvgSeries>& series,
                              const SvgStyle& style = {}) {
    if (series.empty())
        throw InvalidParameter("render_svg: need at least one series");
    for (const auto& s : series)
        if (s.points.empty())
            throw InvalidParameter("render_svg: series '" + s.label +
                                   "' has no points");

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (style.x_min) x_lo = *style.x_min;
    if (style.x_max) x_hi = *style.x_max;
    if (style.y_min) y_lo = *style.y_min;
    if (style.y_max) y_hi = *style.y_max;
    auto pad = [](double& lo, double& hi) {
        if (hi <= lo) {
            const double w = std::max(1.0, std::fabs(lo)) * 0.1;
            lo -= w;
            hi += w;
        } else {
            const double w = (hi - lo) * 0.05;
            lo -= w;
            hi += w;
        }
    };
    pad(x_lo, x_hi);
    pad(y_lo, y_hi);

    const double ml = 64, mr = 16, mt = style.title.empty() ? 16 : 36, mb = 44;
    const double pw = style.width - ml - mr;
    const double ph = style.height - mt - mb;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return mt + (y_hi - y) / (y_hi - y_lo) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(style.width) + "\" height=\"" +
           std::to_string(style.height) + "\" viewBox=\"0 0 " +
           std::to_string(style.width) + " " + std::to_string(style.height) +
           "\">\n";
    out += "<style>.stable{stroke-dasharray:none;}.unstable{stroke-dasharray:6 "
           "4;}.axis{stroke:#333;stroke-width:1;}.grid{stroke:#ddd;stroke-width:"
           "0.5;}text{font-family:sans-serif;font-size:12px;fill:#333;}</style>\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (!style.title.empty())
        out += "<text x=\"" + detail::svg_num(ml + pw / 2) +
               "\" y=\"18\" text-anchor=\"middle\">" + style.title + "</text>\n";

    // frame + ticks
    out += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) +
           "\" width=\"" + detail::svg_num(pw) + "\" height=\"" +
           detail::svg_num(ph) + "\" fill=\"none\" class=\"axis\"/>\n";
    const int n_ticks = 6;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / n_ticks;
        const double fy = y_lo + (y_hi - y_lo) * i / n_ticks;
        char lx[32], ly[32];
        std::snprintf(lx, sizeof(lx), "%.4g", fx);
        std::snprintf(ly, sizeof(ly), "%.4g", fy);
        out += "<line class=\"grid\" x1=\"" + detail::svg_num(px(fx)) +
               "\" y1=\"" + detail::svg_num(mt) + "\" x2=\"" +
               detail::svg_num(px(fx)) + "\" y2=\"" + detail::svg_num(mt + ph) +
               "\"/>\n";
        out += "<text x=\"" + detail::svg_num(px(fx)) + "\" y=\"" +
               detail::svg_num(mt + ph + 16) + "\" text-anchor=\"middle\">" +
               lx + "</text>\n";
        out += "<line class=\"grid\" x1=\"" + detail::svg_num(ml) + "\" y1=\"" +
               detail::svg_num(py(fy)) + "\" x2=\"" + detail::svg_num(ml + pw) +
               "\" y2=\"" + detail::svg_num(py(fy)) + "\"/>\n";
        out += "<text x=\"" + detail::svg_num(ml - 6) + "\" y=\"" +
               detail::svg_num(py(fy) + 4) + "\" text-anchor=\"end\">" + ly +
               "</text>\n";
    }
    if (!style.x_label.empty())
        out += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
               detail::svg_num(style.height - 8) + "\" text-anchor=\"middle\">" +
               style.x_label + "</text>\n";
    if (!style.y_label.empty())
        out += "<text x=\"14\" y=\"" + detail::svg_num(mt + ph / 2) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
               detail::svg_num(mt + ph / 2) + ")\">" + style.y_label +
               "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const SvgSeries& s = series[i];
        const char* color = detail::series_color(i);
        const char* cls = s.style == SvgSeries::Style::Unstable ? "unstable"
                          : s.style == SvgSeries::Style::Stable ? "stable"
                                                                : "plain";
        if (s.kind == SvgSeries::Kind::Line) {
            out += "<polyline class=\"series " + std::string(cls) +
                   "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : s.points)
                out += detail::svg_num(px(x)) + "," + detail::svg_num(py(y)) + " ";
            out += "\"/>\n";
        } else {
            out += "<g class=\"series " + std::string(cls) + "\" fill=\"" +
                   color + "\">\n";
            for (const auto& [x, y] : s.points)
                out += "<circle cx=\"" + detail::svg_num(px(x)) + "\" cy=\"" +
                       detail::svg_num(py(y)) + "\" r=\"1.6\"/>\n";
            out += "</g>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

inline void emit_svg(const std::vector<SvgSeries>& series, const SvgStyle& style,
                     const std::string& path) {
    const std::string text = render_svg(series, style);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error("write failed for '" + path + "'");
}

} // namespace maglev
