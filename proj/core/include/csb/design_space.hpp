#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "csb/rng.hpp"

namespace csb {

inline constexpr int kGeneCount = 22;

enum class GeneKind { discrete, geometry, control, sectional };

std::string to_string(GeneKind kind);
GeneKind gene_kind_from_string(const std::string& s);

struct GeneDomain {
  int index = 0;
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  GeneKind kind = GeneKind::geometry;
};

/// The 22-gene search domain. The shipped table is the standard bridge
/// encoding; alternative tables can be loaded from JSON but must satisfy
/// the same structural invariants (22 entries, unique indices 0..21,
/// lower < upper everywhere).
class DomainTable {
 public:
  static DomainTable standard();
  static DomainTable from_json_text(const std::string& text);
  static DomainTable load(const std::string& path);

  const GeneDomain& gene(int i) const { return genes_.at(static_cast<std::size_t>(i)); }
  double lower(int i) const { return gene(i).lower; }
  double upper(int i) const { return gene(i).upper; }
  double width(int i) const { return gene(i).upper - gene(i).lower; }
  double midpoint(int i) const { return 0.5 * (gene(i).lower + gene(i).upper); }

  const std::array<GeneDomain, kGeneCount>& genes() const { return genes_; }

  /// Throws std::invalid_argument when a structural invariant is violated.
  void validate() const;

  std::string to_json_text() const;

 private:
  std::array<GeneDomain, kGeneCount> genes_{};
};

/// One point of the search space: 22 scalar genes. The cable-count gene
/// (index 0) is carried as a real in [3, 7] and quantized only at decode.
struct DesignVector {
  std::array<double, kGeneCount> genes{};

  double& operator[](int i) { return genes[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return genes[static_cast<std::size_t>(i)]; }

  bool operator==(const DesignVector&) const = default;
};

struct FixedParams {
  double total_length = 220.0;     // m
  double deck_width = 4.0;         // m
  double tower_below_deck = 10.0;  // m
};

/// Physical bridge geometry decoded from a design vector. The layout is
/// symmetric about midspan; anchorage lists describe the left half and
/// are mirrored when the structural model is built.
struct BridgeGeometry {
  int cable_count = 0;  // stays per half-span, 3..7

  double total_length = 0.0;  // m
  double deck_width = 0.0;    // m
  double central_span = 0.0;  // m, tower to tower
  double lateral_span = 0.0;  // m, abutment to tower

  // Deck anchorage abscissae, measured from the left abutment.
  std::vector<double> lateral_anchorages;  // within (0, lateral_span)
  std::vector<double> central_anchorages;  // within (lateral_span, midspan)

  double tower_height_above_deck = 0.0;  // m
  double tower_height_below_deck = 0.0;  // m
  double cable_spread = 0.0;             // m, vertical anchor window at tower top
  double tower_spacing_top = 0.0;        // m, transversal
  double tower_spacing_base = 0.0;       // m, transversal

  // Deck section (steel box idealized as two flanges at +-depth/2).
  double deck_area = 0.0;     // m^2
  double deck_inertia = 0.0;  // m^4
  double deck_depth = 0.0;    // m

  double slab_mass_per_m = 0.0;  // t/m, added concrete slab mass

  // Tower section, one rectangular hollow leg (a pylon has two legs).
  double tower_width = 0.0;     // m, outer, transversal
  double tower_depth = 0.0;     // m, outer, longitudinal
  double tower_flange_t = 0.0;  // m
  double tower_web_t = 0.0;     // m
  double tower_leg_area = 0.0;     // m^2
  double tower_leg_inertia = 0.0;  // m^4, in-plane bending
  double tower_leg_length = 0.0;   // m, including transversal lean

  // Tower-deck connection.
  double link_stiffness_transversal = 0.0;  // kN/m
  double link_stiffness_vertical = 0.0;     // kN/m
  double link_damping_transversal = 0.0;    // kN*s/m
  double link_damping_vertical = 0.0;       // kN*s/m

  double cable_prestress = 0.0;  // kN, per stay
  double cable_area = 0.0;       // m^2, per stay
};

/// Decode produced geometry that violates its own invariants; indicates a
/// decode-rule bug, never a user error.
struct InvalidGeometry : std::logic_error {
  using std::logic_error::logic_error;
};

/// Reference dimensions used to turn the dimensionless genes into physical
/// quantities. All values live here so the gene-to-geometry mapping is
/// auditable in one place (see README for the full table).
struct ReferenceScales {
  double central_span_fraction = 0.5;     // of total length (DV1 reference)
  double tower_height_span_fraction = 0.2;  // of central span (DV5 reference)
  double cable_spread_m = 2.0;            // m (DV6 reference)
  double slab_mass_t_per_m = 1.0;         // t/m per DV13 unit
  double deck_area_m2 = 2.0e-4;           // m^2 per DV14 unit
  double deck_depth_m = 1.0;              // m per DV15 unit
  double tower_width_m = 1.0;             // m per DV16 unit
  double tower_depth_m = 0.1;             // m per DV17 unit
  double tower_flange_m = 2.0e-4;         // m per DV18 unit
  double tower_web_m = 4.0e-4;            // m per DV19 unit
  double prestress_kn = 100.0;            // kN per DV20 unit
  double cable_area_m2 = 1.0e-4;          // m^2 per DV21 unit
  double link_stiffness_kn_m = 1000.0;    // kN/m per DV9/DV10 unit
  double link_damping_kns_m = 10.0;       // kN*s/m per DV11/DV12 unit
};

DesignVector sample_uniform(const DomainTable& domains, Rng& rng);
DesignVector clamp_to_domain(const DomainTable& domains, const DesignVector& v);
bool is_within_domain(const DomainTable& domains, const DesignVector& v);

/// Round-half-up quantization of the cable-count gene, clamped to 3..7.
int quantize_cable_count(double dv0);

BridgeGeometry decode(const DesignVector& v, const FixedParams& fixed,
                      const ReferenceScales& scales = {});

}  // namespace csb
