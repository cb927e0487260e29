#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace contagion {

// One data series on a chart: markers, a polyline, or both.
struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f6fb2";
    bool draw_line = false;
    bool draw_markers = true;
};

struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    // xmin, xmax, ymin, ymax; when absent the ranges come from the data
    // with 5% padding on each side.
    std::optional<std::array<double, 4>> fixed_range;
};

// Renders a self-contained 800x600 SVG (no external assets, no timestamps);
// identical charts produce byte-identical files.
std::string render_chart(const SvgChart& chart);

// Scatter of (xs, ys) with its least-squares line and a rho/p annotation.
// point_labels, when non-empty, must match xs in length and are drawn next
// to the markers.
std::string render_scatter_with_fit(const std::string& title, const std::string& x_label,
                                    const std::string& y_label, std::span<const double> xs,
                                    std::span<const double> ys,
                                    std::span<const std::string> point_labels = {});

} // namespace contagion
