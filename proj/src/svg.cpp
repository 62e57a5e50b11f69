#include "pmnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pmnet/error.hpp"

namespace pmnet {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const SvgSeries& s : series) {
        if (s.x.size() != s.y.size() || (!s.y_err.empty() && s.y_err.size() != s.y.size())) {
            throw ArgumentError("svg chart: series lengths disagree");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double err = s.y_err.empty() ? 0.0 : s.y_err[i];
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i] - err);
            y_max = std::max(y_max, s.y[i] + err);
        }
    }
    if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
        throw ArgumentError("svg chart: no data points");
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    const auto py = [&](double y) {
        return kMarginTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";

    // Axes with 5 ticks each.
    out << "<g font-size=\"11\" font-family=\"sans-serif\" fill=\"#333\">\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x_min + (x_max - x_min) * t / 4.0;
        const double fy = y_min + (y_max - y_min) * t / 4.0;
        out << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(py(y_min)) << "\" x2=\""
            << num(px(fx)) << "\" y2=\"" << num(py(y_max))
            << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out << "<line x1=\"" << num(px(x_min)) << "\" y1=\"" << num(py(fy)) << "\" x2=\""
            << num(px(x_max)) << "\" y2=\"" << num(py(fy))
            << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(py(y_min) + 18)
            << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
        out << "<text x=\"" << num(px(x_min) - 8) << "\" y=\"" << num(py(fy) + 4)
            << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";

    double legend_y = kMarginTop + 6.0;
    for (const SvgSeries& s : series) {
        if (!s.y_err.empty()) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                out << "<line x1=\"" << num(px(s.x[i])) << "\" y1=\"" << num(py(s.y[i] - s.y_err[i]))
                    << "\" x2=\"" << num(px(s.x[i])) << "\" y2=\"" << num(py(s.y[i] + s.y_err[i]))
                    << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" opacity=\"0.6\"/>\n";
            }
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
                << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        }
        out << "<rect x=\"" << kWidth - kMarginRight - 150 << "\" y=\"" << num(legend_y - 9)
            << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << kWidth - kMarginRight - 132 << "\" y=\"" << num(legend_y + 1)
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        legend_y += 18.0;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace pmnet
