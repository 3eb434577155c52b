#include "overton/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "overton/errors.hpp"

namespace overton {

using nlohmann::json;

namespace {

constexpr double kGrid = 1e9;

struct GridPoint {
    long long x;
    long long y;
    std::size_t source;  // index into the input
    auto operator<=>(const GridPoint& o) const {
        if (auto c = x <=> o.x; c != 0) return c;
        return y <=> o.y;
    }
    bool operator==(const GridPoint& o) const { return x == o.x && y == o.y; }
};

__int128 cross(const GridPoint& o, const GridPoint& a, const GridPoint& b) {
    return static_cast<__int128>(a.x - o.x) * (b.y - o.y) -
           static_cast<__int128>(a.y - o.y) * (b.x - o.x);
}

long long snap(double v) { return std::llround(v * kGrid); }

}  // namespace

std::vector<Point> convex_hull(std::span<const Point> points) {
    if (points.empty()) throw GeometryError("convex_hull: empty point set");
    std::vector<GridPoint> g;
    g.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!std::isfinite(p.economic) || !std::isfinite(p.social))
            throw GeometryError("convex_hull: non-finite coordinate");
        if (std::abs(p.economic) > 1e6 || std::abs(p.social) > 1e6)
            throw GeometryError("convex_hull: coordinate out of range");
        g.push_back({snap(p.economic), snap(p.social), i});
    }
    std::stable_sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    if (g.size() == 1) return {points[g[0].source]};

    // Andrew's monotone chain; `<= 0` pops collinear points.
    std::vector<GridPoint> hull(2 * g.size());
    std::size_t k = 0;
    for (const auto& p : g) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = g.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], g[i]) <= 0) --k;
        hull[k++] = g[i];
    }
    hull.resize(k - 1);

    std::vector<Point> out;
    out.reserve(hull.size());
    for (const auto& h : hull) out.push_back(points[h.source]);
    return out;
}

double polygon_area(std::span<const Point> v) {
    if (v.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        twice += a.economic * b.social - b.economic * a.social;
    }
    return std::abs(twice) / 2.0;
}

double area_pct(std::span<const Point> vertices) {
    return std::clamp(polygon_area(vertices) / kCompassArea * 100.0, 0.0, 100.0);
}

bool contains(std::span<const Point> hull, Point p, double eps) {
    if (hull.empty()) return false;
    auto dist2 = [](Point a, Point b) {
        return (a.economic - b.economic) * (a.economic - b.economic) +
               (a.social - b.social) * (a.social - b.social);
    };
    if (hull.size() == 1) return dist2(hull[0], p) <= eps * eps;
    if (hull.size() == 2) {
        const auto a = hull[0], b = hull[1];
        const double len2 = dist2(a, b);
        double t = ((p.economic - a.economic) * (b.economic - a.economic) +
                    (p.social - a.social) * (b.social - a.social)) / len2;
        t = std::clamp(t, 0.0, 1.0);
        Point q{a.economic + t * (b.economic - a.economic), a.social + t * (b.social - a.social)};
        return dist2(q, p) <= eps * eps;
    }
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto a = hull[i], b = hull[(i + 1) % hull.size()];
        const double cr = (b.economic - a.economic) * (p.social - a.social) -
                          (b.social - a.social) * (p.economic - a.economic);
        const double len = std::sqrt(dist2(a, b));
        if (cr / len < -eps) return false;
    }
    return true;
}

std::vector<Point> clip_to_rect(std::span<const Point> polygon, double econ_min, double econ_max,
                                double social_min, double social_max) {
    std::vector<Point> poly(polygon.begin(), polygon.end());
    // One half-plane per rectangle side: inside(p) and intersection on the boundary.
    struct Edge {
        bool economic;  // boundary is an economic = c line
        double c;
        bool keep_greater;
    };
    const Edge edges[] = {{true, econ_min, true},
                          {true, econ_max, false},
                          {false, social_min, true},
                          {false, social_max, false}};
    for (const auto& e : edges) {
        if (poly.empty()) break;
        auto coord = [&](Point p) { return e.economic ? p.economic : p.social; };
        auto inside = [&](Point p) { return e.keep_greater ? coord(p) >= e.c : coord(p) <= e.c; };
        auto intersect = [&](Point a, Point b) {
            const double t = (e.c - coord(a)) / (coord(b) - coord(a));
            Point r{a.economic + t * (b.economic - a.economic), a.social + t * (b.social - a.social)};
            (e.economic ? r.economic : r.social) = e.c;
            return r;
        };
        std::vector<Point> out;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point cur = poly[i];
            const Point prev = poly[(i + poly.size() - 1) % poly.size()];
            const bool cin = inside(cur), pin = inside(prev);
            if (cin) {
                if (!pin) out.push_back(intersect(prev, cur));
                out.push_back(cur);
            } else if (pin) {
                out.push_back(intersect(prev, cur));
            }
        }
        poly = std::move(out);
    }
    return poly;
}

Band classify_value(double v) {
    if (!std::isfinite(v) || v < kCompassMin || v > kCompassMax)
        throw GeometryError("classify: coordinate outside [-10, 10]");
    const double a = std::abs(v);
    if (a <= kCentreThreshold) return Band::Centre;
    if (a <= kExtremeThreshold) return v < 0 ? Band::Neg : Band::Pos;
    return v < 0 ? Band::ExtremeNeg : Band::ExtremePos;
}

std::pair<Band, Band> classify(Point p) {
    return {classify_value(p.economic), classify_value(p.social)};
}

std::pair<double, double> band_interval(Band b) {
    switch (b) {
        case Band::ExtremeNeg: return {kCompassMin, -kExtremeThreshold};
        case Band::Neg: return {-kExtremeThreshold, -kCentreThreshold};
        case Band::Centre: return {-kCentreThreshold, kCentreThreshold};
        case Band::Pos: return {kCentreThreshold, kExtremeThreshold};
        case Band::ExtremePos: return {kExtremeThreshold, kCompassMax};
    }
    return {0, 0};
}

std::string_view economic_band_label(Band b) {
    static constexpr std::string_view names[] = {"extreme-left", "left", "centre", "right",
                                                  "extreme-right"};
    return names[band_index(b)];
}

std::string_view social_band_label(Band b) {
    static constexpr std::string_view names[] = {"extreme-lib", "lib", "centre", "auth",
                                                 "extreme-auth"};
    return names[band_index(b)];
}

OvertonWindow build_window(const std::string& model_id, std::vector<SourcePoint> sources) {
    if (sources.empty()) throw GeometryError("no window for model " + model_id + ": no valid conditions");
    std::vector<Point> pts;
    pts.reserve(sources.size());
    for (const auto& s : sources) pts.push_back(s.point);
    OvertonWindow w;
    w.model_id = model_id;
    w.vertices = convex_hull(pts);
    w.area_pct = area_pct(w.vertices);
    w.sources = std::move(sources);
    return w;
}

OvertonWindow build_window(const std::string& model_id, std::span<const ConditionResult> results) {
    std::vector<SourcePoint> sources;
    for (const auto& r : results)
        sources.push_back({r.persona_id, {r.point.economic, r.point.social}});
    return build_window(model_id, std::move(sources));
}

QuadrantCoverage quadrant_coverage(const OvertonWindow& w) {
    QuadrantCoverage q{};
    if (w.vertices.size() < 3) return q;
    const double boxes[4][4] = {{0, 10, 0, 10}, {-10, 0, 0, 10}, {-10, 0, -10, 0}, {0, 10, -10, 0}};
    for (std::size_t i = 0; i < 4; ++i) {
        auto part = clip_to_rect(w.vertices, boxes[i][0], boxes[i][1], boxes[i][2], boxes[i][3]);
        q[i] = polygon_area(part) / kCompassArea * 100.0;
    }
    return q;
}

std::string_view to_string(HeatmapMode m) { return m == HeatmapMode::Points ? "points" : "hull"; }

HeatmapGrid heatmap(std::span<const OvertonWindow> windows, HeatmapMode mode) {
    HeatmapGrid grid;
    grid.model_total = static_cast<int>(windows.size());
    constexpr Band bands[] = {Band::ExtremeNeg, Band::Neg, Band::Centre, Band::Pos, Band::ExtremePos};
    for (const auto& w : windows) {
        std::array<std::array<bool, 5>, 5> hit{};
        for (const auto& s : w.sources) {
            auto [e, so] = classify(s.point);
            hit[band_index(e)][band_index(so)] = true;
        }
        if (mode == HeatmapMode::Hull && w.vertices.size() >= 3) {
            for (auto e : bands)
                for (auto so : bands) {
                    auto [e0, e1] = band_interval(e);
                    auto [s0, s1] = band_interval(so);
                    if (polygon_area(clip_to_rect(w.vertices, e0, e1, s0, s1)) > 1e-12)
                        hit[band_index(e)][band_index(so)] = true;
                }
        }
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                if (hit[i][j]) ++grid.counts[i][j];
    }
    return grid;
}

json to_json(Point p) { return {{"economic", p.economic}, {"social", p.social}}; }

json to_json(const OvertonWindow& w) {
    json vertices = json::array();
    for (auto v : w.vertices) vertices.push_back(to_json(v));
    json sources = json::array();
    for (const auto& s : w.sources)
        sources.push_back({{"persona_id", s.persona_id},
                           {"economic", s.point.economic},
                           {"social", s.point.social}});
    auto q = quadrant_coverage(w);
    return {{"model_id", w.model_id},
            {"vertices", vertices},
            {"sources", sources},
            {"area_pct", w.area_pct},
            {"quadrant_coverage",
             {{"right_auth", q[0]}, {"left_auth", q[1]}, {"left_lib", q[2]}, {"right_lib", q[3]}}}};
}

json to_json(const HeatmapGrid& g, HeatmapMode mode) {
    constexpr Band bands[] = {Band::ExtremeNeg, Band::Neg, Band::Centre, Band::Pos, Band::ExtremePos};
    json cols = json::array(), rows = json::array(), table = json::array();
    for (auto b : bands) cols.push_back(std::string(economic_band_label(b)));
    for (auto it = std::rbegin(bands); it != std::rend(bands); ++it) {
        rows.push_back(std::string(social_band_label(*it)));
        json row = json::array();
        for (auto e : bands) row.push_back(g.counts[band_index(e)][band_index(*it)]);
        table.push_back(row);
    }
    return {{"mode", std::string(to_string(mode))},
            {"model_total", g.model_total},
            {"economic_bands", cols},
            {"social_bands", rows},
            {"counts", table}};
}

std::string heatmap_csv(const HeatmapGrid& g) {
    constexpr Band bands[] = {Band::ExtremeNeg, Band::Neg, Band::Centre, Band::Pos, Band::ExtremePos};
    std::string out = "social\\economic";
    for (auto b : bands) out += "," + std::string(economic_band_label(b));
    out += "\n";
    for (auto it = std::rbegin(bands); it != std::rend(bands); ++it) {
        out += social_band_label(*it);
        for (auto e : bands) out += "," + std::to_string(g.counts[band_index(e)][band_index(*it)]);
        out += "\n";
    }
    return out;
}

}  // namespace overton
