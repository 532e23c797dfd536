#include "csb/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace csb {

std::string to_string(GeneKind kind) {
  switch (kind) {
    case GeneKind::discrete: return "discrete";
    case GeneKind::geometry: return "geometry";
    case GeneKind::control: return "control";
    case GeneKind::sectional: return "sectional";
  }
  return "unknown";
}

GeneKind gene_kind_from_string(const std::string& s) {
  if (s == "discrete") return GeneKind::discrete;
  if (s == "geometry") return GeneKind::geometry;
  if (s == "control") return GeneKind::control;
  if (s == "sectional") return GeneKind::sectional;
  throw std::invalid_argument("unknown gene kind: " + s);
}

DomainTable DomainTable::standard() {
  DomainTable t;
  auto set = [&t](int i, const char* name, double lo, double hi, GeneKind k) {
    t.genes_[static_cast<std::size_t>(i)] = GeneDomain{i, name, lo, hi, k};
  };
  set(0, "cable_count", 3.0, 7.0, GeneKind::discrete);
  set(1, "central_span", 0.9, 1.2, GeneKind::geometry);
  set(2, "lateral_anchor_spacing", 0.7, 1.3, GeneKind::geometry);
  set(3, "central_first_gap", 0.7, 1.3, GeneKind::geometry);
  set(4, "central_last_gap", 0.7, 1.3, GeneKind::geometry);
  set(5, "tower_height", 0.1, 2.0, GeneKind::geometry);
  set(6, "cable_spread", 0.1, 4.0, GeneKind::geometry);
  set(7, "tower_spacing_top", 0.1, 1.3, GeneKind::geometry);
  set(8, "tower_spacing_base", 0.1, 1.13, GeneKind::geometry);
  set(9, "link_stiffness_transversal", 0.001, 1000.0, GeneKind::control);
  set(10, "link_stiffness_vertical", 0.001, 1000.0, GeneKind::control);
  set(11, "link_damping_transversal", 0.001, 1000.0, GeneKind::control);
  set(12, "link_damping_vertical", 0.001, 1000.0, GeneKind::control);
  set(13, "slab_added_mass", 0.1, 7.0, GeneKind::sectional);
  set(14, "deck_area", 0.1, 80.0, GeneKind::sectional);
  set(15, "deck_depth", 0.5, 1.3, GeneKind::sectional);
  set(16, "tower_width", 0.4, 1.5, GeneKind::sectional);
  set(17, "tower_depth", 0.1, 20.0, GeneKind::sectional);
  set(18, "tower_flange", 0.3, 20.0, GeneKind::sectional);
  set(19, "tower_web", 0.3, 9.0, GeneKind::sectional);
  set(20, "cable_prestress", 0.7, 3.0, GeneKind::sectional);
  set(21, "cable_area", 0.5, 9.0, GeneKind::sectional);
  t.validate();
  return t;
}

void DomainTable::validate() const {
  std::array<bool, kGeneCount> seen{};
  for (const GeneDomain& g : genes_) {
    if (g.index < 0 || g.index >= kGeneCount)
      throw std::invalid_argument("gene index out of range: " +
                                  std::to_string(g.index));
    if (seen[static_cast<std::size_t>(g.index)])
      throw std::invalid_argument("duplicate gene index: " +
                                  std::to_string(g.index));
    seen[static_cast<std::size_t>(g.index)] = true;
    if (!(g.lower < g.upper))
      throw std::invalid_argument("gene " + std::to_string(g.index) +
                                  ": lower must be < upper");
    if (g.name.empty())
      throw std::invalid_argument("gene " + std::to_string(g.index) +
                                  ": empty name");
  }
}

DomainTable DomainTable::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("genes") || !j["genes"].is_array() ||
      j["genes"].size() != kGeneCount)
    throw std::invalid_argument("domain table must list exactly 22 genes");
  DomainTable t;
  std::array<bool, kGeneCount> filled{};
  for (const auto& e : j["genes"]) {
    const int idx = e.at("index").get<int>();
    if (idx < 0 || idx >= kGeneCount)
      throw std::invalid_argument("gene index out of range");
    GeneDomain g;
    g.index = idx;
    g.name = e.at("name").get<std::string>();
    g.lower = e.at("lower").get<double>();
    g.upper = e.at("upper").get<double>();
    g.kind = gene_kind_from_string(e.at("kind").get<std::string>());
    t.genes_[static_cast<std::size_t>(idx)] = g;
    filled[static_cast<std::size_t>(idx)] = true;
  }
  if (!std::all_of(filled.begin(), filled.end(), [](bool b) { return b; }))
    throw std::invalid_argument("domain table has missing gene indices");
  t.validate();
  return t;
}

DomainTable DomainTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open domain table: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string DomainTable::to_json_text() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["genes"] = nlohmann::json::array();
  for (const GeneDomain& g : genes_) {
    j["genes"].push_back({{"index", g.index},
                          {"name", g.name},
                          {"lower", g.lower},
                          {"upper", g.upper},
                          {"kind", to_string(g.kind)}});
  }
  return j.dump(2) + "\n";
}

DesignVector sample_uniform(const DomainTable& domains, Rng& rng) {
  DesignVector v;
  for (int i = 0; i < kGeneCount; ++i)
    v[i] = rng.uniform(domains.lower(i), domains.upper(i));
  return v;
}

DesignVector clamp_to_domain(const DomainTable& domains, const DesignVector& v) {
  DesignVector out = v;
  for (int i = 0; i < kGeneCount; ++i)
    out[i] = std::min(domains.upper(i), std::max(domains.lower(i), v[i]));
  return out;
}

bool is_within_domain(const DomainTable& domains, const DesignVector& v) {
  for (int i = 0; i < kGeneCount; ++i)
    if (v[i] < domains.lower(i) || v[i] > domains.upper(i)) return false;
  return true;
}

int quantize_cable_count(double dv0) {
  const int n = static_cast<int>(std::floor(dv0 + 0.5));  // round half up
  return std::clamp(n, 3, 7);
}

namespace {

// Scales a reference gap pattern by per-gap multipliers, then renormalizes
// so the gaps exactly fill `length`. All multipliers are positive, so the
// resulting positions are strictly increasing.
std::vector<double> positions_from_gaps(double start, double length,
                                        const std::vector<double>& multipliers) {
  const double total =
      std::accumulate(multipliers.begin(), multipliers.end(), 0.0);
  std::vector<double> positions;
  positions.reserve(multipliers.size() - 1);
  double x = start;
  for (std::size_t k = 0; k + 1 < multipliers.size(); ++k) {
    x += multipliers[k] / total * length;
    positions.push_back(x);
  }
  return positions;
}

}  // namespace

BridgeGeometry decode(const DesignVector& v, const FixedParams& fixed,
                      const ReferenceScales& s) {
  BridgeGeometry g;
  g.cable_count = quantize_cable_count(v[0]);
  const int n = g.cable_count;

  g.total_length = fixed.total_length;
  g.deck_width = fixed.deck_width;
  g.central_span = v[1] * s.central_span_fraction * fixed.total_length;
  g.lateral_span = 0.5 * (fixed.total_length - g.central_span);

  // Lateral span: n anchorages between abutment and tower; the gap between
  // the first and second anchorage (counted from the abutment) is scaled
  // by DV2, the rest stay at the reference spacing.
  {
    std::vector<double> gaps(static_cast<std::size_t>(n) + 1, 1.0);
    if (gaps.size() > 2) gaps[1] = v[2];
    g.lateral_anchorages = positions_from_gaps(0.0, g.lateral_span, gaps);
  }

  // Central span, left half: first gap (tower to first anchorage) scaled
  // by DV3, last gap (last anchorage to the symmetry axis) by DV4.
  {
    std::vector<double> gaps(static_cast<std::size_t>(n) + 1, 1.0);
    gaps.front() = v[3];
    gaps.back() = v[4];
    g.central_anchorages =
        positions_from_gaps(g.lateral_span, 0.5 * g.central_span, gaps);
  }

  g.tower_height_above_deck =
      v[5] * s.tower_height_span_fraction * g.central_span;
  g.tower_height_below_deck = fixed.tower_below_deck;
  // The anchor window is capped so the lowest tower anchor stays well
  // above deck level for short towers.
  g.cable_spread =
      std::min(v[6] * s.cable_spread_m, 0.75 * g.tower_height_above_deck);
  g.tower_spacing_top = v[7] * fixed.deck_width;
  g.tower_spacing_base = v[8] * fixed.deck_width;

  g.link_stiffness_transversal = v[9] * s.link_stiffness_kn_m;
  g.link_stiffness_vertical = v[10] * s.link_stiffness_kn_m;
  g.link_damping_transversal = v[11] * s.link_damping_kns_m;
  g.link_damping_vertical = v[12] * s.link_damping_kns_m;

  g.slab_mass_per_m = v[13] * s.slab_mass_t_per_m;

  g.deck_area = v[14] * s.deck_area_m2;
  g.deck_depth = v[15] * s.deck_depth_m;
  // Two-flange idealization: half the area at each extreme fiber.
  g.deck_inertia = g.deck_area * g.deck_depth * g.deck_depth / 4.0;

  g.tower_width = v[16] * s.tower_width_m;
  g.tower_depth = v[17] * s.tower_depth_m;
  g.tower_flange_t = v[18] * s.tower_flange_m;
  g.tower_web_t = v[19] * s.tower_web_m;
  {
    const double b = g.tower_width, h = g.tower_depth;
    const double bi = b - 2.0 * g.tower_web_t;
    const double hi = h - 2.0 * g.tower_flange_t;
    // Wall scales keep the inner void positive over the whole domain box.
    g.tower_leg_area = b * h - bi * hi;
    g.tower_leg_inertia = (b * h * h * h - bi * hi * hi * hi) / 12.0;
  }
  {
    const double lean =
        0.5 * std::abs(g.tower_spacing_base - g.tower_spacing_top);
    const double height = g.tower_height_below_deck + g.tower_height_above_deck;
    g.tower_leg_length = std::hypot(height, lean);
  }

  g.cable_prestress = v[20] * s.prestress_kn;
  g.cable_area = v[21] * s.cable_area_m2;

  // Invariant guards; a violation is a decode-rule bug.
  const double midspan = 0.5 * g.total_length;
  auto check_increasing = [](const std::vector<double>& xs, double lo,
                             double hi) {
    double prev = lo;
    for (double x : xs) {
      if (!(x > prev) || !(x < hi)) return false;
      prev = x;
    }
    return true;
  };
  if (!check_increasing(g.lateral_anchorages, 0.0, g.lateral_span) ||
      !check_increasing(g.central_anchorages, g.lateral_span, midspan))
    throw InvalidGeometry("anchorage ordering violated after decode");
  if (std::abs(2.0 * g.lateral_span + g.central_span - g.total_length) >
      1e-9 * g.total_length)
    throw InvalidGeometry("span closure violated after decode");

  return g;
}

}  // namespace csb
