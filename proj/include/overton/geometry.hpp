#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/scoring.hpp"

namespace overton {

inline constexpr double kCompassMin = -10.0;
inline constexpr double kCompassMax = 10.0;
inline constexpr double kCompassArea = 400.0;
inline constexpr double kCentreThreshold = 1.5;
inline constexpr double kExtremeThreshold = 7.5;

struct Point {
    double economic = 0.0;
    double social = 0.0;
    bool operator==(const Point&) const = default;
};

/// Counterclockwise convex hull of the extreme points, starting at the
/// lowest-economic (then lowest-social) vertex. Inputs are snapped to a 1e-9
/// grid for exact orientation tests; duplicates and collinear boundary points
/// are dropped. Returned vertices are input points. One distinct point gives a
/// single vertex, a collinear set gives its two endpoints. Throws GeometryError
/// on an empty set or non-finite coordinate.
std::vector<Point> convex_hull(std::span<const Point> points);

/// Absolute shoelace area; zero for fewer than three vertices.
double polygon_area(std::span<const Point> vertices);

/// Shoelace area as a percentage of the 20x20 compass.
double area_pct(std::span<const Point> vertices);

/// True when `p` lies inside or on the boundary of the hull `hull` (within `eps`).
bool contains(std::span<const Point> hull, Point p, double eps = 1e-9);

/// Sutherland-Hodgman clip of a convex polygon against an axis-aligned box.
std::vector<Point> clip_to_rect(std::span<const Point> polygon, double econ_min, double econ_max,
                                double social_min, double social_max);

enum class Band { ExtremeNeg, Neg, Centre, Pos, ExtremePos };

/// |v| <= 1.5 Centre, |v| <= 7.5 Neg/Pos, otherwise extreme. Boundary values
/// belong to the less extreme band. Throws GeometryError outside [-10, 10].
Band classify_value(double v);
std::pair<Band, Band> classify(Point p);

inline constexpr std::size_t band_index(Band b) { return static_cast<std::size_t>(b); }
/// Interval [lo, hi] covered by a band.
std::pair<double, double> band_interval(Band b);
std::string_view economic_band_label(Band b);
std::string_view social_band_label(Band b);

struct SourcePoint {
    std::string persona_id;
    Point point;
};

struct OvertonWindow {
    std::string model_id;
    std::vector<Point> vertices;
    std::vector<SourcePoint> sources;
    double area_pct = 0.0;
};

/// Hull over every condition point, the default condition included. Throws
/// GeometryError when there are no results.
OvertonWindow build_window(const std::string& model_id, std::span<const ConditionResult> results);
OvertonWindow build_window(const std::string& model_id, std::vector<SourcePoint> sources);

/// Percent of the compass covered in each quadrant, in the order
/// (right, auth), (left, auth), (left, lib), (right, lib).
using QuadrantCoverage = std::array<double, 4>;
QuadrantCoverage quadrant_coverage(const OvertonWindow& window);

/// How a model marks a heatmap cell: by one of its source points falling in
/// the cell, or by its hull overlapping the cell with positive area.
enum class HeatmapMode { Points, Hull };
std::string_view to_string(HeatmapMode m);

struct HeatmapGrid {
    /// counts[economic band][social band]
    std::array<std::array<int, 5>, 5> counts{};
    int model_total = 0;
};

HeatmapGrid heatmap(std::span<const OvertonWindow> windows, HeatmapMode mode = HeatmapMode::Points);

nlohmann::json to_json(Point p);
nlohmann::json to_json(const OvertonWindow& w);
nlohmann::json to_json(const HeatmapGrid& g, HeatmapMode mode);
/// 5x5 table: social bands as rows (authoritarian first), economic bands as columns.
std::string heatmap_csv(const HeatmapGrid& g);

}  // namespace overton
