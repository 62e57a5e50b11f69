#pragma once

#include <string>
#include <vector>

namespace pmnet {

/// One line on a chart; optional symmetric error band around each point.
struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_err;  // empty = no band
};

/// Minimal SVG line chart used for sweep figures; plain markup, no deps.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series);

}  // namespace pmnet
