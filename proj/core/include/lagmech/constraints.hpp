#ifndef LAGMECH_CONSTRAINTS_HPP
#define LAGMECH_CONSTRAINTS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "lagmech/dynamics.hpp"

namespace lagmech {

// One linear constraint: a horizontal 1-form with q-only components,
// optionally the primitive B with beta = dB (holonomic).
struct Constraint {
  OneForm beta;
  std::optional<Expr> primitive;
};

// Linear constraint system beta_1, ..., beta_r (r < n). Components
// depending on velocities are rejected at load.
class ConstraintSystem {
 public:
  ConstraintSystem(const Chart& chart, std::vector<Constraint> constraints);

  static ConstraintSystem empty() { return ConstraintSystem(); }

  int rank() const { return static_cast<int>(constraints_.size()); }
  bool holonomic() const;
  const Constraint& constraint(int k) const { return constraints_[k]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  ConstraintSystem() = default;
  std::vector<Constraint> constraints_;
};

// beta_dot_k values; the state is admissible iff all vanish.
VectorXd admissible(const Chart& chart, const ConstraintSystem& cs, const TangentState& state);

// Lagrange multipliers from the Gram system
//   lambda^k <v_k, v_l> = -D beta_dot_l,  v_k = grad beta_k,
// with D the free field of sys. Requires a positive-definite metric and
// pointwise-independent constraints.
VectorXd solve_multipliers(const MechanicalSystem& sys, const ConstraintSystem& cs,
                           const TangentState& state);

// accel = free accel + sum_k lambda^k grad beta_k.
SecondOrderField constrained_field(const MechanicalSystem& sys, const ConstraintSystem& cs);

// Covariant value of the constrained field split into the orthogonal
// projection of D^nabla onto ker(beta) and the curvature (second
// fundamental form) part, computed in an orthonormalized constraint basis.
// Requires an admissible state.
struct CovariantDecomposition {
  VectorXd projection;
  VectorXd curvature;
};
CovariantDecomposition covariant_decomposition(const MechanicalSystem& sys,
                                               const ConstraintSystem& cs,
                                               const TangentState& state);

// Metric-orthogonal projection of qdot onto ker(beta); used as an optional
// per-step drift correction during integration.
VectorXd project_velocity(const MechanicalSystem& sys, const ConstraintSystem& cs,
                          const TangentState& state);

}  // namespace lagmech

#endif
