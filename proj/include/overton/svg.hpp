#pragma once

#include <string>

#include "overton/geometry.hpp"

namespace overton {

/// Fixed plot layout: [-10, 10]^2 maps linearly onto a 500x500 viewport with
/// 40-unit margins, authoritarian at the top.
inline constexpr double kSvgSize = 500.0;
inline constexpr double kSvgMargin = 40.0;

double svg_x(double economic);
double svg_y(double social);

/// Compass plot of one window: quadrant axes, band lines at +-1.5 and +-7.5,
/// the hull polygon (a polyline for a two-vertex hull, nothing for a single
/// vertex), one circle per persona point and a square for the default point.
/// Output is byte-stable for identical input.
std::string render_compass_svg(const OvertonWindow& window);

/// 5x5 heatmap of model counts per band cell.
std::string render_heatmap_svg(const HeatmapGrid& grid);

}  // namespace overton
