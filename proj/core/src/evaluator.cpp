#include "csb/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace csb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MaterialParams MaterialParams::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  MaterialParams p;
  auto get = [&j](const char* section, const char* key, double& out) {
    if (j.contains(section) && j[section].contains(key))
      out = j[section][key].get<double>();
  };
  get("prices", "structural_steel_eur_per_kg", p.steel_price_eur_kg);
  get("prices", "cable_steel_eur_per_kg", p.cable_price_eur_kg);
  get("prices", "concrete_eur_per_m3", p.concrete_price_eur_m3);
  get("densities", "steel_kg_per_m3", p.steel_density_kg_m3);
  get("densities", "concrete_kg_per_m3", p.concrete_density_kg_m3);
  get("elastic", "steel_e_kn_m2", p.steel_e_kn_m2);
  get("elastic", "cable_e_kn_m2", p.cable_e_kn_m2);
  get("capacities", "steel_yield_mpa", p.steel_yield_mpa);
  get("capacities", "steel_safety_factor", p.steel_safety);
  get("capacities", "cable_ultimate_mpa", p.cable_ultimate_mpa);
  get("capacities", "cable_utilization", p.cable_utilization);
  get("capacities", "deflection_span_divisor", p.deflection_span_divisor);
  get("capacities", "slack_prestress_fraction", p.slack_fraction);
  get("capacities", "comfort_accel_limit_ms2", p.comfort_accel_limit_ms2);
  get("loads", "live_load_kn_m2", p.live_load_kn_m2);
  get("loads", "pedestrian_load_kn_m2", p.pedestrian_load_kn_m2);
  get("loads", "pacing_frequency_hz", p.pacing_frequency_hz);
  get("loads", "gravity_ms2", p.gravity_ms2);
  if (j.contains("comfort_constraint_enabled"))
    p.comfort_enabled = j["comfort_constraint_enabled"].get<bool>();
  return p;
}

MaterialParams MaterialParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open materials file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string MaterialParams::to_json_text() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["prices"] = {{"structural_steel_eur_per_kg", steel_price_eur_kg},
                 {"cable_steel_eur_per_kg", cable_price_eur_kg},
                 {"concrete_eur_per_m3", concrete_price_eur_m3}};
  j["densities"] = {{"steel_kg_per_m3", steel_density_kg_m3},
                    {"concrete_kg_per_m3", concrete_density_kg_m3}};
  j["elastic"] = {{"steel_e_kn_m2", steel_e_kn_m2},
                  {"cable_e_kn_m2", cable_e_kn_m2}};
  j["capacities"] = {{"steel_yield_mpa", steel_yield_mpa},
                     {"steel_safety_factor", steel_safety},
                     {"cable_ultimate_mpa", cable_ultimate_mpa},
                     {"cable_utilization", cable_utilization},
                     {"deflection_span_divisor", deflection_span_divisor},
                     {"slack_prestress_fraction", slack_fraction},
                     {"comfort_accel_limit_ms2", comfort_accel_limit_ms2}};
  j["loads"] = {{"live_load_kn_m2", live_load_kn_m2},
                {"pedestrian_load_kn_m2", pedestrian_load_kn_m2},
                {"pacing_frequency_hz", pacing_frequency_hz},
                {"gravity_ms2", gravity_ms2}};
  j["comfort_constraint_enabled"] = comfort_enabled;
  return j.dump(2) + "\n";
}

double EvaluationResult::ratio(std::string_view name) const {
  for (std::size_t i = 0; i < kConstraintNames.size(); ++i)
    if (kConstraintNames[i] == name) return constraint_ratios[i];
  throw std::invalid_argument("unknown constraint name: " + std::string(name));
}

double CableSpec::length() const {
  return std::hypot(deck_x - tower_x, anchor_y);
}

std::vector<CableSpec> cable_layout(const BridgeGeometry& g) {
  const int n = g.cable_count;
  const double h = g.tower_height_above_deck;
  const double xt1 = g.lateral_span;
  const double xt2 = g.total_length - g.lateral_span;

  // Fan rule: the anchorage farthest from its tower takes the highest
  // tower anchor; anchors descend by equal steps over the spread window.
  auto anchor_height = [&](int rank_from_farthest) {
    return h - g.cable_spread * static_cast<double>(rank_from_farthest) /
                   static_cast<double>(n - 1);
  };

  std::vector<CableSpec> specs;
  specs.reserve(4 * static_cast<std::size_t>(n));
  // Left tower, lateral fan (anchorages ascend toward the tower).
  for (int i = 0; i < n; ++i)
    specs.push_back({g.lateral_anchorages[static_cast<std::size_t>(i)], xt1,
                     anchor_height(i)});
  // Left tower, central fan (anchorages ascend away from the tower).
  for (int i = 0; i < n; ++i)
    specs.push_back({g.central_anchorages[static_cast<std::size_t>(i)], xt1,
                     anchor_height(n - 1 - i)});
  // Right tower, mirrored central fan.
  for (int i = 0; i < n; ++i)
    specs.push_back(
        {g.total_length - g.central_anchorages[static_cast<std::size_t>(i)],
         xt2, anchor_height(n - 1 - i)});
  // Right tower, mirrored lateral fan.
  for (int i = 0; i < n; ++i)
    specs.push_back(
        {g.total_length - g.lateral_anchorages[static_cast<std::size_t>(i)],
         xt2, anchor_height(i)});
  return specs;
}

Evaluator::Evaluator(FixedParams fixed, MaterialParams materials,
                     ReferenceScales scales)
    : fixed_(fixed), materials_(materials), scales_(scales) {}

CostBreakdown Evaluator::cost_breakdown(const BridgeGeometry& g) const {
  const MaterialParams& m = materials_;
  CostBreakdown cb;

  const double deck_volume = g.deck_area * g.total_length;
  cb.deck_steel_keur =
      deck_volume * m.steel_density_kg_m3 * m.steel_price_eur_kg / 1000.0;

  const double slab_volume =
      g.slab_mass_per_m * 1000.0 / m.concrete_density_kg_m3 * g.total_length;
  cb.slab_concrete_keur = slab_volume * m.concrete_price_eur_m3 / 1000.0;

  // Two pylons, two legs each; leg length includes the transversal lean.
  const double tower_volume = 4.0 * g.tower_leg_area * g.tower_leg_length;
  cb.tower_steel_keur =
      tower_volume * m.steel_density_kg_m3 * m.steel_price_eur_kg / 1000.0;

  double cable_length = 0.0;
  for (const CableSpec& c : cable_layout(g)) cable_length += c.length();
  cb.cable_steel_keur = cable_length * g.cable_area * m.steel_density_kg_m3 *
                        m.cable_price_eur_kg / 1000.0;
  return cb;
}

double Evaluator::cost_keur(const BridgeGeometry& g) const {
  return cost_breakdown(g).total_keur();
}

namespace {

// Node bookkeeping while assembling one tower.
struct TowerNodes {
  int base = 0;
  int deck_level = 0;
  std::vector<int> anchors;  // parallel to descending anchor heights
};

}  // namespace

BridgeModel Evaluator::build_model(const BridgeGeometry& g) const {
  BridgeModel bm;
  StructuralModel& sm = bm.model;
  const MaterialParams& m = materials_;
  const int n = g.cable_count;

  // The model lives in midspan-centered coordinates: the right half is the
  // exact negation of the left half, so mirrored elements get bitwise
  // identical lengths and the assembled system is exactly symmetric.
  const double mid = 0.5 * g.total_length;

  // Left-half bay boundaries (centered), abutment to midspan. Anchorages
  // and the tower crossing are boundary points so cables and links land on
  // nodes.
  std::vector<double> half_bounds;
  half_bounds.push_back(-mid);
  for (double x : g.lateral_anchorages) half_bounds.push_back(x - mid);
  const std::size_t ix_tower1 = half_bounds.size();
  half_bounds.push_back(-0.5 * g.central_span);
  for (double x : g.central_anchorages) half_bounds.push_back(x - mid);
  half_bounds.push_back(0.0);

  constexpr int kElementsPerBay = 10;
  std::vector<double> left_nodes;  // abutment .. midspan inclusive
  for (std::size_t b = 0; b + 1 < half_bounds.size(); ++b) {
    for (int k = 0; k < kElementsPerBay; ++k) {
      const double t = static_cast<double>(k) / kElementsPerBay;
      left_nodes.push_back(half_bounds[b] +
                           t * (half_bounds[b + 1] - half_bounds[b]));
    }
  }
  left_nodes.push_back(0.0);

  const int half_count = static_cast<int>(left_nodes.size());
  for (double x : left_nodes) sm.nodes.push_back({x, 0.0});
  for (int i = half_count - 2; i >= 0; --i)
    sm.nodes.push_back({-left_nodes[static_cast<std::size_t>(i)], 0.0});
  const int deck_node_count = static_cast<int>(sm.nodes.size());

  auto deck_node_of_boundary = [&](std::size_t b) {
    return static_cast<int>(b) * kElementsPerBay;
  };
  auto mirror_node = [&](int node) { return deck_node_count - 1 - node; };
  bm.deck_nodes.resize(static_cast<std::size_t>(deck_node_count));
  for (int i = 0; i < deck_node_count; ++i)
    bm.deck_nodes[static_cast<std::size_t>(i)] = i;

  for (int e = 0; e + 1 < deck_node_count; ++e) {
    sm.beams.push_back(
        {e, e + 1, g.deck_area, g.deck_inertia, m.steel_e_kn_m2});
    bm.deck_elements.push_back(static_cast<int>(sm.beams.size()) - 1);
  }

  // Towers: pylon modelled as one planar column carrying both legs.
  auto build_tower = [&](double x) {
    TowerNodes tn;
    std::vector<double> heights;  // descending anchor heights
    for (int j = 0; j < n; ++j)
      heights.push_back(g.tower_height_above_deck -
                        g.cable_spread * static_cast<double>(j) /
                            static_cast<double>(n - 1));

    std::vector<double> ys;
    ys.push_back(-g.tower_height_below_deck);
    ys.push_back(0.0);
    for (int j = n - 1; j >= 0; --j)
      ys.push_back(heights[static_cast<std::size_t>(j)]);

    std::vector<int> y_nodes;
    int prev_node = -1;
    for (std::size_t s = 0; s < ys.size(); ++s) {
      if (s > 0) {
        const double seg = ys[s] - ys[s - 1];
        const int subdiv = std::max(1, static_cast<int>(std::ceil(seg / 3.0)));
        for (int k = 1; k <= subdiv; ++k) {
          sm.nodes.push_back(
              {x, ys[s - 1] + seg * static_cast<double>(k) / subdiv});
          const int node = static_cast<int>(sm.nodes.size()) - 1;
          sm.beams.push_back({prev_node, node, 2.0 * g.tower_leg_area,
                              2.0 * g.tower_leg_inertia, m.steel_e_kn_m2});
          bm.tower_elements.push_back(static_cast<int>(sm.beams.size()) - 1);
          prev_node = node;
        }
      } else {
        sm.nodes.push_back({x, ys[s]});
        prev_node = static_cast<int>(sm.nodes.size()) - 1;
        tn.base = prev_node;
      }
      y_nodes.push_back(prev_node);
    }
    tn.deck_level = y_nodes[1];
    tn.anchors.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      tn.anchors[static_cast<std::size_t>(j)] =
          y_nodes[static_cast<std::size_t>(1 + n - j)];
    return tn;
  };

  const TowerNodes t1 = build_tower(-0.5 * g.central_span);
  const TowerNodes t2 = build_tower(0.5 * g.central_span);

  const int tower1_deck_node = deck_node_of_boundary(ix_tower1);
  const int tower2_deck_node = mirror_node(tower1_deck_node);

  // Tower-deck vertical link springs.
  sm.springs.push_back(
      {tower1_deck_node, t1.deck_level, 1, g.link_stiffness_vertical});
  sm.springs.push_back(
      {tower2_deck_node, t2.deck_level, 1, g.link_stiffness_vertical});

  // Cables, in cable_layout order.
  bm.cable_specs = cable_layout(g);
  auto add_cable = [&](int deck_node, const TowerNodes& tn, int rank) {
    sm.cables.push_back({deck_node, tn.anchors[static_cast<std::size_t>(rank)],
                         g.cable_area, m.cable_e_kn_m2, g.cable_prestress});
  };
  for (int i = 0; i < n; ++i)
    add_cable(deck_node_of_boundary(1 + static_cast<std::size_t>(i)), t1, i);
  for (int i = 0; i < n; ++i)
    add_cable(deck_node_of_boundary(ix_tower1 + 1 + static_cast<std::size_t>(i)),
              t1, n - 1 - i);
  for (int i = 0; i < n; ++i)
    add_cable(mirror_node(deck_node_of_boundary(
                  ix_tower1 + 1 + static_cast<std::size_t>(i))),
              t2, n - 1 - i);
  for (int i = 0; i < n; ++i)
    add_cable(mirror_node(deck_node_of_boundary(1 + static_cast<std::size_t>(i))),
              t2, i);

  // Rollers at both abutments, the longitudinal restraint at midspan so
  // the boundary conditions share the structure's mirror symmetry; towers
  // are fixed at the base.
  bm.left_support_node = 0;
  bm.right_support_node = deck_node_count - 1;
  sm.supports.push_back({bm.left_support_node, false, true, false});
  sm.supports.push_back({bm.right_support_node, false, true, false});
  sm.supports.push_back({half_count - 1, true, false, false});  // midspan
  sm.supports.push_back({t1.base, true, true, true});
  sm.supports.push_back({t2.base, true, true, true});

  return bm;
}

LoadSet Evaluator::loads_for(const BridgeModel& bm, const BridgeGeometry& g,
                             LoadCase lc) const {
  const MaterialParams& m = materials_;
  LoadSet ls;

  const double steel_weight_kn_m3 =
      m.steel_density_kg_m3 * m.gravity_ms2 / 1000.0;
  double w_deck = g.deck_area * steel_weight_kn_m3 +
                  g.slab_mass_per_m * m.gravity_ms2;
  if (lc == LoadCase::live) w_deck += m.live_load_kn_m2 * g.deck_width;
  for (int e : bm.deck_elements) ls.lines.push_back({e, 0.0, -w_deck});

  // Both legs act on the single planar column; the lean factor converts
  // per-leg-length weight to per-height.
  const double lean_factor =
      g.tower_leg_length / (g.tower_height_above_deck + g.tower_height_below_deck);
  const double w_tower =
      2.0 * g.tower_leg_area * lean_factor * steel_weight_kn_m3;
  for (int e : bm.tower_elements) ls.lines.push_back({e, 0.0, -w_tower});

  return ls;
}

double Evaluator::comfort_acceleration_ms2(const BridgeGeometry& g) const {
  const MaterialParams& m = materials_;
  const double mass_per_m =
      g.deck_area * m.steel_density_kg_m3 / 1000.0 + g.slab_mass_per_m;  // t/m
  const double modal_mass = 0.5 * mass_per_m * g.central_span;           // t
  const double modal_force =
      0.5 * m.pedestrian_load_kn_m2 * g.deck_width * g.central_span;  // kN
  const double k = 2.0 * g.link_stiffness_vertical;                   // kN/m
  const double c = 2.0 * g.link_damping_vertical;                     // kN*s/m
  const double omega = 2.0 * M_PI * m.pacing_frequency_hz;

  const double dk = k - modal_mass * omega * omega;
  const double denom = std::hypot(dk, c * omega);
  const double amplitude = modal_force / std::max(denom, 1e-12);  // m
  return omega * omega * amplitude;
}

std::array<double, 6> Evaluator::constraint_ratios(
    const BridgeGeometry& g, const BridgeModel& bm, const AnalysisResult& dead,
    const AnalysisResult& total) const {
  const MaterialParams& m = materials_;
  std::array<double, 6> r{};

  auto stress_over = [&](const std::vector<int>& elements, double area,
                         double inertia, double half_depth) {
    double worst = 0.0;
    for (int e : elements) {
      const BeamEndForces& f = total.beam_forces[static_cast<std::size_t>(e)];
      const double moment = std::max(std::abs(f.moment1), std::abs(f.moment2));
      const double sigma =
          std::abs(f.axial) / area + moment * half_depth / inertia;
      worst = std::max(worst, sigma);
    }
    return worst;
  };

  r[0] = stress_over(bm.deck_elements, g.deck_area, g.deck_inertia,
                     0.5 * g.deck_depth) /
         m.steel_allowable_kn_m2();
  r[1] = stress_over(bm.tower_elements, 2.0 * g.tower_leg_area,
                     2.0 * g.tower_leg_inertia, 0.5 * g.tower_depth) /
         m.steel_allowable_kn_m2();

  double max_cable_force = 0.0;
  double min_cable_force = kInf;
  for (std::size_t i = 0; i < total.cable_forces.size(); ++i) {
    const double f = total.cable_active[i] ? total.cable_forces[i] : 0.0;
    max_cable_force = std::max(max_cable_force, f);
    min_cable_force = std::min(min_cable_force, f);
  }
  r[2] = max_cable_force / (g.cable_area * m.cable_allowable_kn_m2());

  double live_deflection = 0.0;
  for (int node : bm.deck_nodes) {
    const double dv = total.displacements(3 * node + 1) -
                      dead.displacements(3 * node + 1);
    live_deflection = std::max(live_deflection, std::abs(dv));
  }
  r[3] = live_deflection / (g.central_span / m.deflection_span_divisor);

  // Slack margin: 1.0 exactly when the least-loaded stay sits at the
  // slack threshold (slack_fraction of its prestress), 2.0 when fully
  // slack, clamped at zero for generously tensioned stays.
  const double threshold = m.slack_fraction * g.cable_prestress;
  r[4] = std::max(0.0, 2.0 - min_cable_force / threshold);

  r[5] = m.comfort_enabled
             ? comfort_acceleration_ms2(g) / m.comfort_accel_limit_ms2
             : 0.0;
  return r;
}

EvaluationResult Evaluator::evaluate(const DesignVector& v) const {
  const BridgeGeometry g = decode(v, fixed_, scales_);
  EvaluationResult out;
  out.cost_keur = cost_keur(g);

  const BridgeModel bm = build_model(g);
  const LoadSet cases[2] = {loads_for(bm, g, LoadCase::dead),
                            loads_for(bm, g, LoadCase::live)};
  const std::vector<AnalysisResult> solved = solve_static_cases(bm.model, cases);
  const AnalysisResult& dead = solved[0];
  const AnalysisResult& total = solved[1];

  if (dead.singular || total.singular) {
    out.analysis_singular = true;
    out.constraint_ratios.fill(kInf);
    out.s_max = kInf;
    out.feasible = false;
    return out;
  }

  out.constraint_ratios = constraint_ratios(g, bm, dead, total);
  out.s_max =
      *std::max_element(out.constraint_ratios.begin(), out.constraint_ratios.end());
  out.feasible = out.s_max <= 1.0;
  return out;
}

}  // namespace csb
