#include "csb/structural_model.hpp"

#include <cmath>
#include <limits>

namespace csb {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ElementGeom {
  double length;
  double c;  // cos of element axis vs global x
  double s;
};

ElementGeom element_geom(const StructuralModel& m, int n1, int n2) {
  const double dx = m.nodes[static_cast<std::size_t>(n2)].x -
                    m.nodes[static_cast<std::size_t>(n1)].x;
  const double dy = m.nodes[static_cast<std::size_t>(n2)].y -
                    m.nodes[static_cast<std::size_t>(n1)].y;
  const double len = std::hypot(dx, dy);
  return {len, dx / len, dy / len};
}

Eigen::Matrix<double, 6, 6> beam_local_stiffness(const BeamElement& b,
                                                 double length) {
  const double ea = b.e_mod * b.area / length;
  const double ei = b.e_mod * b.inertia;
  const double e12 = 12.0 * ei / (length * length * length);
  const double e6 = 6.0 * ei / (length * length);
  const double e4 = 4.0 * ei / length;
  const double e2 = 2.0 * ei / length;
  Eigen::Matrix<double, 6, 6> kl;
  kl << ea, 0, 0, -ea, 0, 0,
      0, e12, e6, 0, -e12, e6,
      0, e6, e4, 0, -e6, e2,
      -ea, 0, 0, ea, 0, 0,
      0, -e12, -e6, 0, e12, -e6,
      0, e6, e2, 0, -e6, e4;
  return kl;
}

Eigen::Matrix<double, 6, 6> frame_rotation(double c, double s) {
  Eigen::Matrix<double, 6, 6> t = Eigen::Matrix<double, 6, 6>::Zero();
  t(0, 0) = c; t(0, 1) = s;
  t(1, 0) = -s; t(1, 1) = c;
  t(2, 2) = 1.0;
  t(3, 3) = c; t(3, 4) = s;
  t(4, 3) = -s; t(4, 4) = c;
  t(5, 5) = 1.0;
  return t;
}

// Shared assembly/factorization context: the sparsity pattern is fixed
// (deactivated cables keep zero-valued entries), so the symbolic analysis
// runs once and the numeric factorization only when the cable active set
// changes.
class StaticSystem {
 public:
  explicit StaticSystem(const StructuralModel& model) : model_(model) {
    const int ndof = model.dof_count();
    fixed_.assign(static_cast<std::size_t>(ndof), false);
    for (const Support& sp : model.supports) {
      if (sp.fix_x) fixed_[static_cast<std::size_t>(3 * sp.node)] = true;
      if (sp.fix_y) fixed_[static_cast<std::size_t>(3 * sp.node + 1)] = true;
      if (sp.fix_rot) fixed_[static_cast<std::size_t>(3 * sp.node + 2)] = true;
    }
    free_index_.assign(static_cast<std::size_t>(ndof), -1);
    nfree_ = 0;
    for (int d = 0; d < ndof; ++d)
      if (!fixed_[static_cast<std::size_t>(d)])
        free_index_[static_cast<std::size_t>(d)] = nfree_++;

    base_.reserve(36 * model.beams.size() + 4 * model.springs.size());
    for (const BeamElement& b : model.beams) {
      const auto [len, c, s] = element_geom(model, b.n1, b.n2);
      const Eigen::Matrix<double, 6, 6> t = frame_rotation(c, s);
      const Eigen::Matrix<double, 6, 6> kg =
          t.transpose() * beam_local_stiffness(b, len) * t;
      const int dofs[6] = {3 * b.n1, 3 * b.n1 + 1, 3 * b.n1 + 2,
                           3 * b.n2, 3 * b.n2 + 1, 3 * b.n2 + 2};
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          base_.emplace_back(dofs[i], dofs[j], kg(i, j));
    }
    for (const LinkSpring& sp : model.springs) {
      const int d1 = 3 * sp.n1 + sp.dof;
      const int d2 = 3 * sp.n2 + sp.dof;
      base_.emplace_back(d1, d1, sp.stiffness);
      base_.emplace_back(d2, d2, sp.stiffness);
      base_.emplace_back(d1, d2, -sp.stiffness);
      base_.emplace_back(d2, d1, -sp.stiffness);
    }

    cable_blocks_.resize(model.cables.size());
    for (std::size_t ci = 0; ci < model.cables.size(); ++ci) {
      const CableElement& cb = model.cables[ci];
      const auto [len, c, s] = element_geom(model, cb.n1, cb.n2);
      const double k = cb.e_mod * cb.area / len;
      const double kxx = k * c * c, kxy = k * c * s, kyy = k * s * s;
      const int dx[4] = {3 * cb.n1, 3 * cb.n1 + 1, 3 * cb.n2, 3 * cb.n2 + 1};
      const double kk[4][4] = {{kxx, kxy, -kxx, -kxy},
                               {kxy, kyy, -kxy, -kyy},
                               {-kxx, -kxy, kxx, kxy},
                               {-kxy, -kyy, kxy, kyy}};
      auto& block = cable_blocks_[ci];
      int t = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          block[static_cast<std::size_t>(t++)] =
              Eigen::Triplet<double>(dx[i], dx[j], kk[i][j]);
    }
    k_free_.resize(nfree_, nfree_);
  }

  int nfree() const { return nfree_; }
  bool is_free(int dof) const {
    return free_index_[static_cast<std::size_t>(dof)] >= 0;
  }

  /// Factorizes for the given cable active mask (no-op when unchanged).
  bool factorize(const std::vector<std::uint8_t>& active) {
    if (nfree_ == 0) {
      // Fully constrained model; keep the triplets for reaction recovery.
      Triplets trip = base_;
      for (std::size_t ci = 0; ci < cable_blocks_.size(); ++ci) {
        const double f = active[ci] ? 1.0 : 0.0;
        for (const auto& t : cable_blocks_[ci])
          trip.emplace_back(t.row(), t.col(), f * t.value());
      }
      full_triplets_ = std::move(trip);
      current_mask_ = active;
      factorized_ = true;
      return true;
    }
    if (factorized_ && active == current_mask_) return true;
    Triplets trip = base_;
    trip.reserve(base_.size() + 16 * cable_blocks_.size());
    for (std::size_t ci = 0; ci < cable_blocks_.size(); ++ci) {
      const double f = active[ci] ? 1.0 : 0.0;
      for (const auto& t : cable_blocks_[ci])
        trip.emplace_back(t.row(), t.col(), f * t.value());
    }
    Triplets trip_free;
    trip_free.reserve(trip.size());
    for (const auto& t : trip) {
      const int r = free_index_[static_cast<std::size_t>(t.row())];
      const int c = free_index_[static_cast<std::size_t>(t.col())];
      if (r >= 0 && c >= 0) trip_free.emplace_back(r, c, t.value());
    }
    full_triplets_ = std::move(trip);

    // Symmetric Jacobi equilibration. Stiffness entries span many orders
    // of magnitude (axial vs rotational DOFs, link springs); scaling keeps
    // the factorization accurate on badly scaled designs.
    scale_.assign(static_cast<std::size_t>(nfree_), 0.0);
    for (const auto& t : trip_free)
      if (t.row() == t.col())
        scale_[static_cast<std::size_t>(t.row())] += t.value();
    for (double& s : scale_) s = 1.0 / std::sqrt(std::max(s, 1e-30));
    for (auto& t : trip_free)
      t = Eigen::Triplet<double>(
          t.row(), t.col(),
          t.value() * scale_[static_cast<std::size_t>(t.row())] *
              scale_[static_cast<std::size_t>(t.col())]);
    k_free_.setFromTriplets(trip_free.begin(), trip_free.end());

    if (!pattern_ready_) {
      solver_.analyzePattern(k_free_);
      pattern_ready_ = true;
    }
    solver_.factorize(k_free_);
    current_mask_ = active;
    factorized_ = solver_.info() == Eigen::Success;
    return factorized_;
  }

  /// Solves for the free DOFs with iterative refinement; returns the full
  /// displacement vector and the relative residual.
  bool solve(const Eigen::VectorXd& f_total, Eigen::VectorXd& u_full,
             double& rel_res) const {
    const int ndof = model_.dof_count();
    if (nfree_ == 0) {
      u_full = Eigen::VectorXd::Zero(ndof);
      rel_res = 0.0;
      return true;
    }
    Eigen::VectorXd f_scaled(nfree_);
    for (int d = 0; d < ndof; ++d) {
      const int fi = free_index_[static_cast<std::size_t>(d)];
      if (fi >= 0)
        f_scaled(fi) = f_total(d) * scale_[static_cast<std::size_t>(fi)];
    }

    Eigen::VectorXd y = solver_.solve(f_scaled);
    const double f_norm = std::max(f_scaled.norm(), 1e-30);
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd r = f_scaled - k_free_ * y;
      if (r.norm() / f_norm < 1e-14) break;
      y += solver_.solve(r);
    }
    rel_res = (f_scaled - k_free_ * y).norm() / f_norm;
    if (!y.allFinite() || rel_res > 1e-8) return false;

    u_full = Eigen::VectorXd::Zero(ndof);
    for (int d = 0; d < ndof; ++d) {
      const int fi = free_index_[static_cast<std::size_t>(d)];
      if (fi >= 0)
        u_full(d) = y(fi) * scale_[static_cast<std::size_t>(fi)];
    }
    return true;
  }

  /// Reactions at constrained DOFs for the last factorized mask:
  /// K_full * u - F at the fixed rows, accumulated from the triplets.
  Eigen::VectorXd reactions(const Eigen::VectorXd& u_full,
                            const Eigen::VectorXd& f_total) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(model_.dof_count());
    for (const auto& t : full_triplets_)
      if (!is_free(t.row())) r(t.row()) += t.value() * u_full(t.col());
    for (int d = 0; d < model_.dof_count(); ++d)
      r(d) = is_free(d) ? 0.0 : r(d) - f_total(d);
    return r;
  }

 private:
  const StructuralModel& model_;
  std::vector<bool> fixed_;
  std::vector<int> free_index_;
  int nfree_ = 0;
  Triplets base_;
  std::vector<std::array<Eigen::Triplet<double>, 16>> cable_blocks_;
  Triplets full_triplets_;
  std::vector<double> scale_;
  Eigen::SparseMatrix<double> k_free_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool pattern_ready_ = false;
  bool factorized_ = false;
  std::vector<std::uint8_t> current_mask_;
};

// Consistent nodal loads for a uniform load in global components.
void add_line_load(const StructuralModel& m, const LineLoad& ll,
                   Eigen::VectorXd& f) {
  const BeamElement& b = m.beams[static_cast<std::size_t>(ll.element)];
  const auto [len, c, s] = element_geom(m, b.n1, b.n2);
  const double qa = ll.wx * c + ll.wy * s;   // along local x
  const double qt = -ll.wx * s + ll.wy * c;  // along local y
  Eigen::Matrix<double, 6, 1> fl;
  fl << qa * len / 2.0, qt * len / 2.0, qt * len * len / 12.0,
      qa * len / 2.0, qt * len / 2.0, -qt * len * len / 12.0;
  Eigen::Matrix<double, 6, 1> fg;
  fg << c * fl(0) - s * fl(1), s * fl(0) + c * fl(1), fl(2),
      c * fl(3) - s * fl(4), s * fl(3) + c * fl(4), fl(5);
  const int dofs[6] = {3 * b.n1, 3 * b.n1 + 1, 3 * b.n1 + 2,
                       3 * b.n2, 3 * b.n2 + 1, 3 * b.n2 + 2};
  for (int i = 0; i < 6; ++i) f(dofs[i]) += fg(i);
}

Eigen::VectorXd external_loads(const StructuralModel& m, const LoadSet& loads) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m.dof_count());
  for (const PointLoad& pl : loads.points) {
    f(3 * pl.node) += pl.fx;
    f(3 * pl.node + 1) += pl.fy;
    f(3 * pl.node + 2) += pl.mz;
  }
  for (const LineLoad& ll : loads.lines) add_line_load(m, ll, f);
  return f;
}

void add_cable_prestress(const StructuralModel& m, const CableElement& cb,
                         Eigen::VectorXd& f) {
  const auto [len, c, s] = element_geom(m, cb.n1, cb.n2);
  (void)len;
  f(3 * cb.n1) += cb.prestress * c;
  f(3 * cb.n1 + 1) += cb.prestress * s;
  f(3 * cb.n2) -= cb.prestress * c;
  f(3 * cb.n2 + 1) -= cb.prestress * s;
}

double cable_total_force(const StructuralModel& m, const CableElement& cb,
                         const Eigen::VectorXd& u) {
  const auto [len, c, s] = element_geom(m, cb.n1, cb.n2);
  const double du = u(3 * cb.n2) - u(3 * cb.n1);
  const double dv = u(3 * cb.n2 + 1) - u(3 * cb.n1 + 1);
  const double elongation = du * c + dv * s;
  return cb.prestress + cb.e_mod * cb.area / len * elongation;
}

BeamEndForces beam_end_forces(const StructuralModel& m, const BeamElement& b,
                              const Eigen::VectorXd& u, const LoadSet& loads,
                              int element_index) {
  const auto [len, c, s] = element_geom(m, b.n1, b.n2);
  Eigen::Matrix<double, 6, 1> dg;
  dg << u(3 * b.n1), u(3 * b.n1 + 1), u(3 * b.n1 + 2),
      u(3 * b.n2), u(3 * b.n2 + 1), u(3 * b.n2 + 2);
  Eigen::Matrix<double, 6, 1> dl;
  dl << c * dg(0) + s * dg(1), -s * dg(0) + c * dg(1), dg(2),
      c * dg(3) + s * dg(4), -s * dg(3) + c * dg(4), dg(5);

  Eigen::Matrix<double, 6, 1> fl = beam_local_stiffness(b, len) * dl;

  // Subtract the equivalent loads of distributed load on this element so
  // the recovered values are true member end forces.
  for (const LineLoad& ll : loads.lines) {
    if (ll.element != element_index) continue;
    const double qa = ll.wx * c + ll.wy * s;
    const double qt = -ll.wx * s + ll.wy * c;
    fl(0) -= qa * len / 2.0;
    fl(1) -= qt * len / 2.0;
    fl(2) -= qt * len * len / 12.0;
    fl(3) -= qa * len / 2.0;
    fl(4) -= qt * len / 2.0;
    fl(5) -= -qt * len * len / 12.0;
  }

  BeamEndForces out;
  out.axial = fl(3);  // tension positive
  out.shear1 = fl(1);
  out.moment1 = fl(2);
  out.shear2 = fl(4);
  out.moment2 = fl(5);
  return out;
}

AnalysisResult solve_one_case(const StructuralModel& model,
                              StaticSystem& system, const LoadSet& loads) {
  AnalysisResult res;
  res.displacements = Eigen::VectorXd::Zero(model.dof_count());
  res.reactions = Eigen::VectorXd::Zero(model.dof_count());
  res.cable_active.assign(model.cables.size(), 1);
  res.cable_forces.assign(model.cables.size(), 0.0);

  const Eigen::VectorXd f_ext = external_loads(model, loads);

  const int max_iter = static_cast<int>(model.cables.size()) + 1;
  for (int iter = 0; iter < max_iter; ++iter) {
    res.deactivation_iterations = iter;
    if (!system.factorize(res.cable_active)) {
      res.singular = true;
      return res;
    }

    Eigen::VectorXd f_total = f_ext;
    for (std::size_t i = 0; i < model.cables.size(); ++i)
      if (res.cable_active[i]) add_cable_prestress(model, model.cables[i], f_total);

    Eigen::VectorXd u_full;
    if (!system.solve(f_total, u_full, res.residual)) {
      res.singular = true;
      return res;
    }
    res.displacements = u_full;

    bool changed = false;
    for (std::size_t i = 0; i < model.cables.size(); ++i) {
      if (!res.cable_active[i]) {
        res.cable_forces[i] = 0.0;
        continue;
      }
      const double n = cable_total_force(model, model.cables[i], u_full);
      res.cable_forces[i] = n;
      if (n < 0.0) {
        res.cable_active[i] = 0;
        res.cable_forces[i] = 0.0;
        changed = true;
      }
    }
    if (!changed) {
      res.reactions = system.reactions(u_full, f_total);
      res.beam_forces.resize(model.beams.size());
      for (std::size_t e = 0; e < model.beams.size(); ++e)
        res.beam_forces[e] = beam_end_forces(model, model.beams[e], u_full,
                                             loads, static_cast<int>(e));
      return res;
    }
  }

  // No fixed point within the iteration budget; report as a failed solve.
  res.singular = true;
  return res;
}

}  // namespace

AnalysisResult solve_static(const StructuralModel& model, const LoadSet& loads) {
  StaticSystem system(model);
  return solve_one_case(model, system, loads);
}

std::vector<AnalysisResult> solve_static_cases(const StructuralModel& model,
                                               std::span<const LoadSet> cases) {
  StaticSystem system(model);
  std::vector<AnalysisResult> out;
  out.reserve(cases.size());
  for (const LoadSet& loads : cases) out.push_back(solve_one_case(model, system, loads));
  return out;
}

}  // namespace csb
