#pragma once

#include <array>
#include <string>
#include <vector>

namespace foldcont {

using Point2 = std::array<double, 2>;

struct PlotSeries {
    enum class Style { solid, dotted, markers };
    std::string label;
    std::vector<Point2> points;
    Style style = Style::solid;
    std::string color;  // empty: taken from the palette by position
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string note;  // small print under the title, e.g. the projection used
    std::vector<PlotSeries> series;
};

/// Standalone SVG with a framed plot area, ticks, labels and a legend.
/// Polyline points are pixel coordinates at 17 digits and their group
/// carries the affine map back to data coordinates. Output depends only on
/// the input.
[[nodiscard]] std::string render_svg(const Plot& plot);

/// The points of every polyline in document order, in data coordinates.
[[nodiscard]] std::vector<std::vector<Point2>> parse_svg_polylines(const std::string& svg);

/// Cell-per-node colour map of a scalar field on a uniform grid, diverging
/// around zero.
[[nodiscard]] std::string render_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                                         const std::vector<double>& values, double cell, const std::string& title);

}  // namespace foldcont
