#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace cnm {

struct SvgTrack {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgTrack> tracks;
    /// Vertical tick marks (e.g. warning times) along the x axis.
    std::vector<double> ticks;
    bool log_y = false;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace detail

/// Fixed 960×320 viewBox polyline chart, no external assets.
inline std::string render_svg(const SvgChart& chart) {
    constexpr double W = 960, H = 320, left = 70, right = 150, top = 30, bottom = 40;
    const double pw = W - left - right, ph = H - top - bottom;
    auto ty = [&](double v) { return chart.log_y ? std::log10(std::max(v, 1e-300)) : v; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& t : chart.tracks) {
        for (std::size_t k = 0; k < std::min(t.x.size(), t.y.size()); ++k) {
            if (!std::isfinite(t.x[k]) || !std::isfinite(t.y[k]) || (chart.log_y && t.y[k] <= 0.0)) continue;
            x0 = std::min(x0, t.x[k]);
            x1 = std::max(x1, t.x[k]);
            y0 = std::min(y0, ty(t.y[k]));
            y1 = std::max(y1, ty(t.y[k]));
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 320\" width=\"960\" height=\"320\">\n";
    out << "<rect width=\"960\" height=\"320\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
        << detail::xml_escape(chart.title) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = left + pw * k / 4.0;
        const double sy = top + ph * (1.0 - k / 4.0);
        out << "<text x=\"" << detail::num(sx) << "\" y=\"" << H - bottom + 15
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << detail::label(fx) << "</text>\n";
        out << "<text x=\"" << left - 5 << "\" y=\"" << detail::num(sy + 3)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
            << detail::label(chart.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 5
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << detail::xml_escape(chart.x_label)
        << "</text>\n";
    out << "<text x=\"15\" y=\"" << top + ph / 2 << "\" font-family=\"sans-serif\" font-size=\"11\" "
        << "text-anchor=\"middle\" transform=\"rotate(-90 15 " << top + ph / 2 << ")\">"
        << detail::xml_escape(chart.y_label) << "</text>\n";

    for (double t : chart.ticks) {
        if (!(t >= x0 && t <= x1)) continue;
        out << "<line x1=\"" << detail::num(px(t)) << "\" x2=\"" << detail::num(px(t)) << "\" y1=\"" << top + ph
            << "\" y2=\"" << top + ph - 12 << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    }

    double legend_y = top + 10;
    for (const auto& t : chart.tracks) {
        out << "<polyline fill=\"none\" stroke=\"" << t.color << "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (std::size_t k = 0; k < std::min(t.x.size(), t.y.size()); ++k) {
            if (!std::isfinite(t.x[k]) || !std::isfinite(t.y[k]) || (chart.log_y && t.y[k] <= 0.0)) continue;
            if (!first) out << ' ';
            out << detail::num(px(t.x[k])) << ',' << detail::num(py(t.y[k]));
            first = false;
        }
        out << "\"/>\n";
        out << "<line x1=\"" << W - right + 10 << "\" x2=\"" << W - right + 30 << "\" y1=\"" << legend_y << "\" y2=\""
            << legend_y << "\" stroke=\"" << t.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << W - right + 35 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(t.name) << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace cnm
