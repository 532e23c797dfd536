#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "csb/design_space.hpp"
#include "csb/structural_model.hpp"

namespace csb {

/// Unit prices, densities, capacities and load intensities. Everything the
/// evaluator treats as a constant lives here and can be overridden from a
/// JSON file (CLI flag --materials).
struct MaterialParams {
  // Prices.
  double steel_price_eur_kg = 3.0;
  double cable_price_eur_kg = 6.0;
  double concrete_price_eur_m3 = 150.0;

  // Densities.
  double steel_density_kg_m3 = 7850.0;
  double concrete_density_kg_m3 = 2500.0;

  // Elastic moduli, kN/m^2.
  double steel_e_kn_m2 = 210.0e6;
  double cable_e_kn_m2 = 195.0e6;

  // Capacities.
  double steel_yield_mpa = 235.0;
  double steel_safety = 1.1;
  double cable_ultimate_mpa = 1570.0;
  double cable_utilization = 0.45;
  double deflection_span_divisor = 400.0;
  double slack_fraction = 0.05;          // of prestress
  double comfort_accel_limit_ms2 = 0.7;

  // Loads.
  double live_load_kn_m2 = 5.0;
  double pedestrian_load_kn_m2 = 0.4;
  double pacing_frequency_hz = 2.0;
  double gravity_ms2 = 9.80665;

  bool comfort_enabled = true;

  double steel_allowable_kn_m2() const {
    return steel_yield_mpa / steel_safety * 1000.0;
  }
  double cable_allowable_kn_m2() const {
    return cable_ultimate_mpa * cable_utilization * 1000.0;
  }

  static MaterialParams standard() { return {}; }
  static MaterialParams from_json_text(const std::string& text);
  static MaterialParams load(const std::string& path);
  std::string to_json_text() const;
};

inline constexpr std::array<std::string_view, 6> kConstraintNames = {
    "deck_stress",     "tower_stress", "cable_stress",
    "deck_deflection", "cable_slack",  "comfort_acceleration"};

struct EvaluationResult {
  double cost_keur = 0.0;
  std::array<double, 6> constraint_ratios{};  // order of kConstraintNames
  double s_max = 0.0;
  bool feasible = false;
  bool analysis_singular = false;

  double ratio(std::string_view name) const;
};

struct CostBreakdown {
  double deck_steel_keur = 0.0;
  double slab_concrete_keur = 0.0;
  double tower_steel_keur = 0.0;
  double cable_steel_keur = 0.0;

  double total_keur() const {
    return deck_steel_keur + slab_concrete_keur + tower_steel_keur +
           cable_steel_keur;
  }
};

/// One stay: deck anchorage abscissa, tower abscissa and the anchor height
/// on the tower (above deck level).
struct CableSpec {
  double deck_x = 0.0;
  double tower_x = 0.0;
  double anchor_y = 0.0;

  double length() const;
};

/// All 4n stays of the full bridge, in a fixed deterministic order (left
/// tower lateral fan, left tower central fan, then the mirrored fans).
std::vector<CableSpec> cable_layout(const BridgeGeometry& g);

/// `dead` is self-weight plus slab; `live` is the governing combination,
/// dead plus the distributed crowd load over the whole deck.
enum class LoadCase { dead, live };

/// Structural model plus the bookkeeping needed to turn raw analysis
/// results into named constraint ratios.
struct BridgeModel {
  StructuralModel model;
  std::vector<int> deck_nodes;      // left to right
  std::vector<int> deck_elements;   // indices into model.beams
  std::vector<int> tower_elements;
  std::vector<CableSpec> cable_specs;  // parallel to model.cables
  int left_support_node = 0;
  int right_support_node = 0;
};

/// Surrogate structural evaluator: planar static model of the decoded
/// bridge plus a single-mode pedestrian comfort check. Pure and stateless
/// per call; safe to share across threads.
class Evaluator {
 public:
  explicit Evaluator(FixedParams fixed = {},
                     MaterialParams materials = MaterialParams::standard(),
                     ReferenceScales scales = {});

  /// decode -> build model -> analyze dead and dead+live -> cost and
  /// constraint ratios. A failed solve is reported with an s_max = +inf
  /// sentinel (cost still computed from geometry), never an exception.
  EvaluationResult evaluate(const DesignVector& v) const;

  double cost_keur(const BridgeGeometry& g) const;
  CostBreakdown cost_breakdown(const BridgeGeometry& g) const;

  BridgeModel build_model(const BridgeGeometry& g) const;
  LoadSet loads_for(const BridgeModel& bm, const BridgeGeometry& g,
                    LoadCase lc) const;

  /// Steady-state vertical acceleration of the deck under the distributed
  /// pedestrian harmonic load at the walking frequency, from a one-mode
  /// model: modal mass = half the deck mass (steel + slab) of the central
  /// span, stiffness and damping = the two tower-deck links in parallel.
  double comfort_acceleration_ms2(const BridgeGeometry& g) const;

  /// Demand/capacity ratios from the two static solves. Stresses and the
  /// slack check come from the dead+live case; the deflection limit applies
  /// to the live effect (dead+live minus dead, camber compensates the rest).
  std::array<double, 6> constraint_ratios(const BridgeGeometry& g,
                                          const BridgeModel& bm,
                                          const AnalysisResult& dead,
                                          const AnalysisResult& total) const;

  const FixedParams& fixed() const { return fixed_; }
  const MaterialParams& materials() const { return materials_; }
  const ReferenceScales& scales() const { return scales_; }

 private:
  FixedParams fixed_;
  MaterialParams materials_;
  ReferenceScales scales_;
};

}  // namespace csb
