#include "csb/geometry_export.hpp"

#include <algorithm>
#include <sstream>

#include "csb/run_log.hpp"

namespace csb {

namespace {

constexpr const char* kPalette[] = {"#000000", "#e64980", "#4169e1",
                                    "#2f9e44", "#f08c00"};
constexpr int kPaletteSize = 5;

}  // namespace

std::string geometry_svg(std::span<const BridgeGeometry> geometries) {
  double max_height = 0.0, max_depth = 0.0, length = 0.0;
  for (const BridgeGeometry& g : geometries) {
    max_height = std::max(max_height, g.tower_height_above_deck);
    max_depth = std::max(max_depth, g.tower_height_below_deck);
    length = std::max(length, g.total_length);
  }
  const double margin = 10.0;
  const double w = length + 2.0 * margin;
  const double h = max_height + max_depth + 2.0 * margin + 12.0;
  // Flip the vertical axis: structural y up, SVG y down.
  auto sx = [&](double x) { return format_double(x + margin); };
  auto sy = [&](double y) { return format_double(margin + max_height - y); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
     << format_double(w) << " " << format_double(h) << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t gi = 0; gi < geometries.size(); ++gi) {
    const BridgeGeometry& g = geometries[gi];
    const char* color = kPalette[gi % kPaletteSize];
    os << "  <g stroke=\"" << color << "\" fill=\"none\" stroke-width=\"0.6\">\n";

    os << "    <line class=\"deck\" x1=\"" << sx(0.0) << "\" y1=\"" << sy(0.0)
       << "\" x2=\"" << sx(g.total_length) << "\" y2=\"" << sy(0.0)
       << "\"/>\n";

    const double towers[2] = {g.lateral_span, g.total_length - g.lateral_span};
    for (double xt : towers)
      os << "    <line class=\"tower\" x1=\"" << sx(xt) << "\" y1=\""
         << sy(-g.tower_height_below_deck) << "\" x2=\"" << sx(xt)
         << "\" y2=\"" << sy(g.tower_height_above_deck) << "\"/>\n";

    for (const CableSpec& c : cable_layout(g))
      os << "    <line class=\"cable\" x1=\"" << sx(c.deck_x) << "\" y1=\""
         << sy(0.0) << "\" x2=\"" << sx(c.tower_x) << "\" y2=\""
         << sy(c.anchor_y) << "\"/>\n";
    os << "  </g>\n";
  }

  // 50 m scale bar under the left abutment.
  const double bar_y = max_height + max_depth + margin + 6.0;
  os << "  <g stroke=\"#444444\" stroke-width=\"0.8\">\n";
  os << "    <line x1=\"" << format_double(margin) << "\" y1=\""
     << format_double(bar_y) << "\" x2=\"" << format_double(margin + 50.0)
     << "\" y2=\"" << format_double(bar_y) << "\"/>\n";
  os << "  </g>\n";
  os << "  <text x=\"" << format_double(margin + 55.0) << "\" y=\""
     << format_double(bar_y + 1.5) << "\" font-size=\"5\" fill=\"#444444\">"
     << "50 m</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string geometry_csv(std::span<const BridgeModel> models) {
  std::ostringstream os;
  os << "record,genome,id_or_kind,a,b\n";
  for (std::size_t gi = 0; gi < models.size(); ++gi) {
    const StructuralModel& m = models[gi].model;
    for (std::size_t n = 0; n < m.nodes.size(); ++n)
      os << "node," << gi << ',' << n << ',' << format_double(m.nodes[n].x)
         << ',' << format_double(m.nodes[n].y) << '\n';
    for (const BeamElement& b : m.beams) {
      const bool is_deck =
          m.nodes[static_cast<std::size_t>(b.n1)].y == 0.0 &&
          m.nodes[static_cast<std::size_t>(b.n2)].y == 0.0;
      os << "member," << gi << ',' << (is_deck ? "deck" : "tower") << ','
         << b.n1 << ',' << b.n2 << '\n';
    }
    for (const CableElement& c : m.cables)
      os << "member," << gi << ",cable," << c.n1 << ',' << c.n2 << '\n';
  }
  return os.str();
}

}  // namespace csb
