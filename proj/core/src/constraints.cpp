#include "lagmech/constraints.hpp"

#include <Eigen/SVD>

#include "lagmech/errors.hpp"

namespace lagmech {

namespace {

constexpr double kGramConditionLimit = 1e12;

// B matrix with column k = components of beta_k at q.
MatrixXd constraint_matrix(const Chart& chart, const ConstraintSystem& cs,
                           const TangentState& state) {
  int n = chart.dim();
  int r = cs.rank();
  MatrixXd B(n, r);
  for (int k = 0; k < r; ++k)
    B.col(k) = cs.constraint(k).beta.at(chart, state);
  return B;
}

// Cholesky of the Gram matrix <v_k, v_l> = B^T g^-1 B; throws on
// dependent constraints.
Eigen::LLT<MatrixXd> gram_factorization(const MatrixXd& gram) {
  Eigen::JacobiSVD<MatrixXd> svd(gram);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > kGramConditionLimit)
    throw SingularityError("dependent constraints (ill-conditioned Gram matrix)");
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SingularityError("dependent constraints (Gram matrix not positive definite)");
  return llt;
}

void require_positive_definite(const MechanicalSystem& sys, const TangentState& state) {
  if (!sys.g.positive_definite_at(state.q))
    throw PreconditionError("constraint solve requires a positive-definite metric");
}

}  // namespace

ConstraintSystem::ConstraintSystem(const Chart& chart, std::vector<Constraint> constraints)
    : constraints_(std::move(constraints)) {
  int n = chart.dim();
  if (static_cast<int>(constraints_.size()) >= n)
    throw ConfigError("constraint rank must be smaller than the chart dimension");
  for (const auto& c : constraints_) {
    if (static_cast<int>(c.beta.comp.size()) != n)
      throw ConfigError("constraint form needs one component per coordinate");
    if (c.beta.depends_on_velocity(chart))
      throw ConfigError(
          "velocity-dependent (nonlinear) constraints are not supported; "
          "constraint components may depend on coordinates only");
  }
}

bool ConstraintSystem::holonomic() const {
  if (constraints_.empty()) return false;
  for (const auto& c : constraints_)
    if (!c.primitive) return false;
  return true;
}

VectorXd admissible(const Chart& chart, const ConstraintSystem& cs, const TangentState& state) {
  VectorXd out(cs.rank());
  for (int k = 0; k < cs.rank(); ++k)
    out[k] = pairing_dot(chart, cs.constraint(k).beta, state);
  return out;
}

VectorXd solve_multipliers(const MechanicalSystem& sys, const ConstraintSystem& cs,
                           const TangentState& state) {
  require_positive_definite(sys, state);
  int r = cs.rank();
  if (r == 0) return VectorXd(0);

  MatrixXd B = constraint_matrix(sys.chart, cs, state);
  MatrixXd ginv = sys.g.inverse_at(state.q);
  MatrixXd gram = B.transpose() * ginv * B;
  auto llt = gram_factorization(gram);

  SecondOrderField D = free_field(sys);
  VectorXd rhs(r);
  for (int l = 0; l < r; ++l)
    rhs[l] = -pairing_dot_along(D, sys.chart, cs.constraint(l).beta, state);
  return llt.solve(rhs);
}

SecondOrderField constrained_field(const MechanicalSystem& sys, const ConstraintSystem& cs) {
  if (cs.rank() == 0) return free_field(sys);
  MechanicalSystem s = sys;
  SecondOrderField free = free_field(sys);
  return SecondOrderField(
      [s, cs, free](const TangentState& state) {
        VectorXd lambda = solve_multipliers(s, cs, state);
        MatrixXd B = constraint_matrix(s.chart, cs, state);
        VectorXd a = free.accel(state);
        a += s.g.inverse_at(state.q) * (B * lambda);
        return a;
      },
      "constrained");
}

CovariantDecomposition covariant_decomposition(const MechanicalSystem& sys,
                                               const ConstraintSystem& cs,
                                               const TangentState& state) {
  require_positive_definite(sys, state);
  int r = cs.rank();
  int n = sys.chart.dim();

  VectorXd bdot_values = admissible(sys.chart, cs, state);
  if (bdot_values.lpNorm<Eigen::Infinity>() >
      1e-8 * std::max(1.0, state.qdot.lpNorm<Eigen::Infinity>()))
    throw PreconditionError("covariant decomposition requires an admissible state");

  MatrixXd B = constraint_matrix(sys.chart, cs, state);
  MatrixXd ginv = sys.g.inverse_at(state.q);
  MatrixXd gram = B.transpose() * ginv * B;
  auto llt = gram_factorization(gram);

  // Orthonormalize: e_k = sum_m C(k, m) v_m with C = L^-1 from G = L L^T.
  MatrixXd C = MatrixXd(llt.matrixL())
                   .triangularView<Eigen::Lower>()
                   .solve(MatrixXd::Identity(r, r));

  MatrixXd V = ginv * B;        // columns: v_m = grad beta_m
  MatrixXd E = V * C.transpose();  // columns: orthonormalized e_k

  SecondOrderField D = free_field(sys);
  VectorXd dnabla = covariant_value(D, sys, state);
  MatrixXd g = sys.g.at(state.q);

  // II of the raw constraint fields; at admissible states the
  // orthonormalized II is the same linear combination.
  VectorXd ii(r);
  for (int m = 0; m < r; ++m)
    ii[m] = second_fundamental_form_lowered(sys.g, cs.constraint(m).beta, state);
  VectorXd ii_ortho = C * ii;

  CovariantDecomposition out;
  out.projection = dnabla;
  out.curvature = VectorXd::Zero(n);
  for (int k = 0; k < r; ++k) {
    double coeff = E.col(k).dot(g * dnabla);
    out.projection -= coeff * E.col(k);
    out.curvature -= ii_ortho[k] * E.col(k);
  }
  return out;
}

VectorXd project_velocity(const MechanicalSystem& sys, const ConstraintSystem& cs,
                          const TangentState& state) {
  if (cs.rank() == 0) return state.qdot;
  MatrixXd B = constraint_matrix(sys.chart, cs, state);
  MatrixXd ginv = sys.g.inverse_at(state.q);
  MatrixXd gram = B.transpose() * ginv * B;
  auto llt = gram_factorization(gram);
  // qdot - v_k (G^-1)_kl beta_dot_l removes the component along grad beta.
  VectorXd bdot = B.transpose() * state.qdot;
  return state.qdot - ginv * B * llt.solve(bdot);
}

}  // namespace lagmech
