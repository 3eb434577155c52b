#include "overton/svg.hpp"

#include <cstdio>
#include <sstream>

#include "overton/persona.hpp"

namespace overton {

namespace {

constexpr double kPlotSpan = kSvgSize - 2 * kSvgMargin;

std::string num(double v) {
    if (v == 0.0) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
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

void line(std::ostringstream& o, double x1, double y1, double x2, double y2, const char* cls) {
    o << "  <line class=\"" << cls << "\" x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\""
      << num(x2) << "\" y2=\"" << num(y2) << "\"/>\n";
}

std::string points_attr(const std::vector<Point>& pts) {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) s += ' ';
        s += num(svg_x(pts[i].economic)) + "," + num(svg_y(pts[i].social));
    }
    return s;
}

}  // namespace

double svg_x(double economic) { return kSvgMargin + (economic - kCompassMin) / 20.0 * kPlotSpan; }
double svg_y(double social) { return kSvgSize - kSvgMargin - (social - kCompassMin) / 20.0 * kPlotSpan; }

std::string render_compass_svg(const OvertonWindow& w) {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n";
    o << "  <style>.band{stroke:#999;stroke-dasharray:4 3;stroke-width:1}"
         ".axis{stroke:#333;stroke-width:1.5}"
         ".window{fill:#7b3fa0;fill-opacity:0.35;stroke:#5a2d78;stroke-width:2}"
         ".persona{fill:#1f5fa8}.default{fill:#d9480f;stroke:#000;stroke-width:1}"
         "text{font-family:sans-serif;font-size:12px}</style>\n";
    o << "  <rect class=\"frame\" x=\"" << num(kSvgMargin) << "\" y=\"" << num(kSvgMargin)
      << "\" width=\"" << num(kPlotSpan) << "\" height=\"" << num(kPlotSpan)
      << "\" fill=\"#ffffff\" stroke=\"#333\"/>\n";

    for (double t : {-kExtremeThreshold, -kCentreThreshold, kCentreThreshold, kExtremeThreshold}) {
        line(o, svg_x(t), svg_y(kCompassMax), svg_x(t), svg_y(kCompassMin), "band");
        line(o, svg_x(kCompassMin), svg_y(t), svg_x(kCompassMax), svg_y(t), "band");
    }
    line(o, svg_x(0), svg_y(kCompassMax), svg_x(0), svg_y(kCompassMin), "axis");
    line(o, svg_x(kCompassMin), svg_y(0), svg_x(kCompassMax), svg_y(0), "axis");

    if (w.vertices.size() >= 3)
        o << "  <polygon class=\"window\" points=\"" << points_attr(w.vertices) << "\"/>\n";
    else if (w.vertices.size() == 2)
        o << "  <polyline class=\"window\" points=\"" << points_attr(w.vertices) << "\"/>\n";

    for (const auto& s : w.sources) {
        const double x = svg_x(s.point.economic), y = svg_y(s.point.social);
        if (s.persona_id == kDefaultPersonaId) continue;
        o << "  <circle class=\"persona\" data-persona=\"" << escape(s.persona_id) << "\" cx=\""
          << num(x) << "\" cy=\"" << num(y) << "\" r=\"4.00\"/>\n";
    }
    for (const auto& s : w.sources) {
        if (s.persona_id != kDefaultPersonaId) continue;
        const double x = svg_x(s.point.economic), y = svg_y(s.point.social);
        o << "  <rect class=\"default\" data-persona=\"default\" x=\"" << num(x - 5) << "\" y=\""
          << num(y - 5) << "\" width=\"10.00\" height=\"10.00\"/>\n";
    }

    o << "  <text x=\"" << num(kSvgMargin) << "\" y=\"" << num(kSvgSize - 12) << "\">Left</text>\n";
    o << "  <text x=\"" << num(kSvgSize - kSvgMargin) << "\" y=\"" << num(kSvgSize - 12)
      << "\" text-anchor=\"end\">Right</text>\n";
    o << "  <text x=\"" << num(kSvgSize / 2) << "\" y=\"" << num(kSvgMargin - 8)
      << "\" text-anchor=\"middle\">Authoritarian</text>\n";
    o << "  <text x=\"" << num(kSvgSize / 2) << "\" y=\"" << num(kSvgSize - kSvgMargin + 16)
      << "\" text-anchor=\"middle\">Libertarian</text>\n";
    o << "  <text x=\"" << num(kSvgMargin) << "\" y=\"" << num(16) << "\">" << escape(w.model_id)
      << " (" << num(w.area_pct) << "%)</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string render_heatmap_svg(const HeatmapGrid& g) {
    constexpr Band bands[] = {Band::ExtremeNeg, Band::Neg, Band::Centre, Band::Pos, Band::ExtremePos};
    constexpr double cell = kPlotSpan / 5.0;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n";
    o << "  <style>text{font-family:sans-serif;font-size:12px}</style>\n";
    for (std::size_t row = 0; row < 5; ++row) {
        const Band social = bands[4 - row];
        for (std::size_t col = 0; col < 5; ++col) {
            const Band econ = bands[col];
            const int count = g.counts[band_index(econ)][band_index(social)];
            const double share = g.model_total > 0 ? static_cast<double>(count) / g.model_total : 0.0;
            const double x = kSvgMargin + col * cell, y = kSvgMargin + row * cell;
            o << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell)
              << "\" height=\"" << num(cell) << "\" fill=\"#7b3fa0\" fill-opacity=\"" << num(share)
              << "\" stroke=\"#333\" data-economic=\"" << economic_band_label(econ)
              << "\" data-social=\"" << social_band_label(social) << "\"/>\n";
            o << "  <text x=\"" << num(x + cell / 2) << "\" y=\"" << num(y + cell / 2)
              << "\" text-anchor=\"middle\">" << count << "</text>\n";
        }
    }
    for (std::size_t col = 0; col < 5; ++col)
        o << "  <text x=\"" << num(kSvgMargin + (col + 0.5) * cell) << "\" y=\""
          << num(kSvgSize - kSvgMargin + 16) << "\" text-anchor=\"middle\">"
          << economic_band_label(bands[col]) << "</text>\n";
    for (std::size_t row = 0; row < 5; ++row)
        o << "  <text x=\"" << num(kSvgMargin - 4) << "\" y=\"" << num(kSvgMargin + (row + 0.5) * cell)
          << "\" text-anchor=\"end\" font-size=\"9\">" << social_band_label(bands[4 - row])
          << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace overton
