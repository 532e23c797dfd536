#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace csb {

// Planar static model, kN-m-t unit system (1 kN accelerates 1 t at 1 m/s^2).
// Three DOFs per node: u (global x), v (global y), theta.

struct Node {
  double x = 0.0;
  double y = 0.0;
};

struct BeamElement {
  int n1 = 0;
  int n2 = 0;
  double area = 0.0;     // m^2
  double inertia = 0.0;  // m^4
  double e_mod = 0.0;    // kN/m^2
};

/// Tension-only bar with an initial (prestress) force. While active it
/// contributes EA/L axial stiffness and pulls its end nodes together with
/// the prestress force; once the total force drops below zero it is
/// deactivated and carries nothing.
struct CableElement {
  int n1 = 0;
  int n2 = 0;
  double area = 0.0;       // m^2
  double e_mod = 0.0;      // kN/m^2
  double prestress = 0.0;  // kN
};

/// Couples one DOF (0 = x, 1 = y) of two nodes through a linear spring.
struct LinkSpring {
  int n1 = 0;
  int n2 = 0;
  int dof = 1;
  double stiffness = 0.0;  // kN/m
};

struct Support {
  int node = 0;
  bool fix_x = false;
  bool fix_y = false;
  bool fix_rot = false;
};

struct StructuralModel {
  std::vector<Node> nodes;
  std::vector<BeamElement> beams;
  std::vector<CableElement> cables;
  std::vector<LinkSpring> springs;
  std::vector<Support> supports;

  int dof_count() const { return 3 * static_cast<int>(nodes.size()); }
};

struct PointLoad {
  int node = 0;
  double fx = 0.0;  // kN
  double fy = 0.0;  // kN
  double mz = 0.0;  // kN*m
};

/// Uniform load per unit element length, given in global components and
/// applied to one beam element (consistent nodal load vector).
struct LineLoad {
  int element = 0;  // index into StructuralModel::beams
  double wx = 0.0;  // kN/m
  double wy = 0.0;  // kN/m
};

struct LoadSet {
  std::vector<PointLoad> points;
  std::vector<LineLoad> lines;
};

struct BeamEndForces {
  double axial = 0.0;    // kN, tension positive
  double shear1 = 0.0;   // kN
  double moment1 = 0.0;  // kN*m
  double shear2 = 0.0;
  double moment2 = 0.0;
};

struct AnalysisResult {
  Eigen::VectorXd displacements;  // 3 per node, constrained DOFs zero
  std::vector<BeamEndForces> beam_forces;
  std::vector<double> cable_forces;    // kN, zero when deactivated
  std::vector<std::uint8_t> cable_active;
  Eigen::VectorXd reactions;      // full-size, nonzero only at supports
  double residual = 0.0;          // relative equilibrium residual
  bool singular = false;
  int deactivation_iterations = 0;
};

/// Linear static solve with iterative deactivation of compressed cables.
/// Never throws on numerical failure: a singular or non-converging system
/// is reported through AnalysisResult::singular.
AnalysisResult solve_static(const StructuralModel& model, const LoadSet& loads);

/// Several load cases on one model; the symbolic analysis and, when the
/// cable active sets agree, the numeric factorization are shared.
std::vector<AnalysisResult> solve_static_cases(const StructuralModel& model,
                                               std::span<const LoadSet> cases);

}  // namespace csb
