#include "lagmech/timeconstraint.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "lagmech/errors.hpp"

namespace lagmech {

namespace {

constexpr double kIsotropicTol = 1e-12;
constexpr double kGramConditionLimit = 1e12;

}  // namespace

TimeForm TimeForm::exact(OneForm tau, std::optional<Expr> primitive) {
  return TimeForm(std::move(tau), std::move(primitive));
}

TimeForm TimeForm::verified(const Chart& chart, OneForm tau,
                            std::span<const VectorXd> samples, double tol) {
  int n = chart.dim();
  if (tau.depends_on_velocity(chart))
    throw ConfigError("time form components may depend on coordinates only");
  for (const VectorXd& q : samples) {
    VarEnv env = base_env(chart, q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        double curl = tau.comp[i].diff(chart.coord(j), env) -
                      tau.comp[j].diff(chart.coord(i), env);
        if (std::abs(curl) > tol)
          throw ConfigError("time form fails the closedness check at a sample point");
      }
  }
  return TimeForm(std::move(tau), std::nullopt);
}

VectorXd TimeForm::at(const Chart& chart, const VectorXd& q) const {
  TangentState s(q, VectorXd::Zero(chart.dim()));
  VectorXd a = tau_.at(chart, s);
  if (a.lpNorm<Eigen::Infinity>() == 0.0)
    throw SingularityError("time form vanishes at the evaluated point");
  return a;
}

SecondOrderField modified_field(const MechanicalSystem& sys, const TimeForm& tau) {
  MechanicalSystem s = sys;
  SecondOrderField free = free_field(sys);
  TimeForm tf = tau;
  return SecondOrderField(
      [s, free, tf](const TangentState& state) {
        VectorXd t = tf.at(s.chart, state.q);
        VectorXd grad_tau = s.g.inverse_at(state.q) * t;
        double norm2 = t.dot(grad_tau);
        if (std::abs(norm2) <= kIsotropicTol)
          throw SingularityError("grad tau is isotropic at the evaluated state");
        double dtaudot = pairing_dot_along(free, s.chart, tf.form(), state);
        return VectorXd(free.accel(state) - (dtaudot / norm2) * grad_tau);
      },
      "time-constrained");
}

VectorXd adapted_equations_check(const MechanicalSystem& sys, const TimeForm& tau,
                                 double c, const TangentState& state) {
  int n = sys.chart.dim();
  // tau must be dq^0 in this chart.
  VectorXd t = tau.at(sys.chart, state.q);
  for (int i = 0; i < n; ++i) {
    double expect = i == 0 ? 1.0 : 0.0;
    bool constant = true;
    for (int k = 0; k < n; ++k)
      if (tau.form().comp[i].depends_on(sys.chart.coord(k))) constant = false;
    if (t[i] != expect || !constant)
      throw PreconditionError("adapted equations require tau = d" + sys.chart.coord(0));
  }

  TangentState s = state;
  s.qdot[0] = c;

  SecondOrderField dbar = modified_field(sys, tau);
  VectorXd accel = dbar.accel(s);

  MatrixXd g = sys.g.at(s.q);
  Christoffel gamma = sys.g.christoffel(s.q);
  VectorXd a = sys.alpha_at(s);

  VectorXd res(n - 1);
  for (int mu = 1; mu < n; ++mu) {
    double r = 0.0;
    for (int nu = 1; nu < n; ++nu) r += g(mu, nu) * accel[nu];
    for (int sg = 1; sg < n; ++sg)
      for (int nu = 1; nu < n; ++nu) r += gamma.first[mu](sg, nu) * s.qdot[sg] * s.qdot[nu];
    for (int nu = 1; nu < n; ++nu) r += 2.0 * c * gamma.first[mu](nu, 0) * s.qdot[nu];
    r += c * c * gamma.first[mu](0, 0);
    r += a[mu];
    res[mu - 1] = r;
  }
  return res;
}

DisplacementVerdict admissible_displacement(const Chart& chart, const TimeForm& tau,
                                            const std::vector<Expr>& v,
                                            std::span<const VectorXd> samples) {
  DisplacementVerdict out;
  int n = chart.dim();
  for (const VectorXd& q : samples) {
    VectorXd t = tau.at(chart, q);
    VarEnv env = base_env(chart, q);
    double p = 0.0;
    for (int i = 0; i < n; ++i) p += t[i] * v[i].eval(env);
    out.pairings.push_back(p);
  }
  constexpr double tol = 1e-10;
  bool all_zero = true, all_const = true;
  for (double p : out.pairings) {
    if (std::abs(p) > tol) all_zero = false;
    if (std::abs(p - out.pairings.front()) > tol) all_const = false;
  }
  out.cls = all_zero    ? DisplacementClass::ModuleAdmissible
            : all_const ? DisplacementClass::Tangent
                        : DisplacementClass::NotTangent;
  return out;
}

SecondOrderField time_dependent_field(const MechanicalSystem& sys,
                                      const TimeDependentConstraints& tc,
                                      bool assert_indefinite_splitting) {
  MechanicalSystem s = sys;
  SecondOrderField free = free_field(sys);
  TimeDependentConstraints c = tc;
  bool allow_indefinite = assert_indefinite_splitting;
  return SecondOrderField(
      [s, free, c, allow_indefinite](const TangentState& state) {
        if (!allow_indefinite && !s.g.positive_definite_at(state.q))
          throw PreconditionError(
              "time-dependent constraints require a positive-definite metric "
              "(or an asserted definite-splitting hypothesis)");
        int n = s.chart.dim();
        int r = c.constraints.rank();

        // Columns: beta_0 = tau, beta_1..beta_r.
        MatrixXd B(n, r + 1);
        B.col(0) = c.tau.at(s.chart, state.q);
        for (int k = 0; k < r; ++k)
          B.col(k + 1) = c.constraints.constraint(k).beta.at(s.chart, state);

        MatrixXd ginv = s.g.inverse_at(state.q);
        MatrixXd gram = B.transpose() * ginv * B;
        Eigen::JacobiSVD<MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
        double smin = svd.singularValues().minCoeff();
        double smax = svd.singularValues().maxCoeff();
        if (smin <= 0.0 || smax / smin > kGramConditionLimit)
          throw SingularityError("singular augmented Gram matrix (tau in Lambda_M?)");

        VectorXd rhs(r + 1);
        rhs[0] = -pairing_dot_along(free, s.chart, c.tau.form(), state);
        for (int l = 0; l < r; ++l)
          rhs[l + 1] =
              -pairing_dot_along(free, s.chart, c.constraints.constraint(l).beta, state);
        VectorXd lambda = svd.solve(rhs);
        return VectorXd(free.accel(state) + ginv * (B * lambda));
      },
      "time-dependent-constrained");
}

}  // namespace lagmech
