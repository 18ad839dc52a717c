#include "lagmech/dynamics.hpp"

#include "lagmech/errors.hpp"

namespace lagmech {

VectorXd MechanicalSystem::alpha_at(const TangentState& state) const {
  if (alpha.empty()) return VectorXd::Zero(chart.dim());
  return alpha.at(chart, state);
}

double along_field(const SecondOrderField& D, const TangentState& state,
                   const VectorXd& df_dq, const VectorXd& df_dqdot) {
  return state.qdot.dot(df_dq) + D.accel(state).dot(df_dqdot);
}

double kinetic_energy(const MechanicalSystem& sys, const TangentState& state) {
  return 0.5 * state.qdot.dot(sys.g.at(state.q) * state.qdot);
}

VectorXd kinetic_energy_dq(const MechanicalSystem& sys, const TangentState& state) {
  int n = sys.chart.dim();
  VectorXd dq(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += sys.g.partial(i, j, k, state.q) * state.qdot[i] * state.qdot[j];
    dq[k] = 0.5 * s;
  }
  return dq;
}

VectorXd kinetic_energy_dqdot(const MechanicalSystem& sys, const TangentState& state) {
  return sys.g.at(state.q) * state.qdot;
}

namespace {

VectorXd geodesic_accel(const MetricField& g, const TangentState& state) {
  int n = g.dim();
  Christoffel c = g.christoffel(state.q);
  VectorXd a(n);
  for (int l = 0; l < n; ++l) a[l] = -state.qdot.dot(c.second[l] * state.qdot);
  return a;
}

}  // namespace

SecondOrderField geodesic_field(const MechanicalSystem& sys) {
  MetricField g = sys.g;
  return SecondOrderField(
      [g](const TangentState& state) { return geodesic_accel(g, state); }, "geodesic");
}

SecondOrderField free_field(const MechanicalSystem& sys) {
  if (sys.alpha.empty()) return geodesic_field(sys);
  MechanicalSystem s = sys;
  return SecondOrderField(
      [s](const TangentState& state) {
        VectorXd a = geodesic_accel(s.g, state);
        return VectorXd(a - s.g.inverse_at(state.q) * s.alpha_at(state));
      },
      "free");
}

VectorXd covariant_value(const SecondOrderField& D, const MechanicalSystem& sys,
                         const TangentState& state) {
  return D.accel(state) - geodesic_accel(sys.g, state);
}

VectorXd work_form_of(const SecondOrderField& D, const MechanicalSystem& sys,
                      const TangentState& state) {
  return -(sys.g.at(state.q) * covariant_value(D, sys, state));
}

double energy_residual(const SecondOrderField& D, const MechanicalSystem& sys,
                       const TangentState& state) {
  double dT = along_field(D, state, kinetic_energy_dq(sys, state),
                          kinetic_energy_dqdot(sys, state));
  return dT + sys.alpha_at(state).dot(state.qdot);
}

double pairing_dot(const Chart& chart, const OneForm& beta, const TangentState& state) {
  return beta.at(chart, state).dot(state.qdot);
}

void pairing_dot_partials(const Chart& chart, const OneForm& beta, const TangentState& state,
                          VectorXd& dq, VectorXd& dqdot) {
  int n = chart.dim();
  VarEnv env = tangent_env(chart, state);
  dq = VectorXd::Zero(n);
  dqdot = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    dqdot[i] += beta.comp[i].eval(env);
    for (int k = 0; k < n; ++k) {
      dq[k] += beta.comp[i].diff(chart.coord(k), env) * state.qdot[i];
      if (beta.comp[i].depends_on(chart.velocity(k)))
        dqdot[k] += beta.comp[i].diff(chart.velocity(k), env) * state.qdot[i];
    }
  }
}

double pairing_dot_along(const SecondOrderField& D, const Chart& chart, const OneForm& beta,
                         const TangentState& state) {
  VectorXd dq, dqdot;
  pairing_dot_partials(chart, beta, state, dq, dqdot);
  return along_field(D, state, dq, dqdot);
}

VectorXd Variation::base_at(const Chart& chart, const VectorXd& q) const {
  VarEnv env = base_env(chart, q);
  VectorXd a(comp_.size());
  for (std::size_t i = 0; i < comp_.size(); ++i) a[static_cast<int>(i)] = comp_[i].eval(env);
  return a;
}

VectorXd Variation::prolonged_at(const Chart& chart, const TangentState& state) const {
  VarEnv env = base_env(chart, state.q);
  int n = chart.dim();
  VectorXd out = VectorXd::Zero(2 * n);
  out.head(n) = base_at(chart, state.q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[n + i] += state.qdot[j] * comp_[i].diff(chart.coord(j), env);
  return out;
}

Variation prolong(std::vector<Expr> v) { return Variation(std::move(v)); }

double zentral_residual(const SecondOrderField& D, const MechanicalSystem& sys,
                        const Variation& delta, const TangentState& state) {
  const Chart& chart = sys.chart;
  int n = chart.dim();
  VarEnv env = base_env(chart, state.q);

  VectorXd a = delta.base_at(chart, state.q);
  VectorXd adot = delta.prolonged_at(chart, state).tail(n);

  // F = <theta, delta> = g_jk qdot^k a^j, with exact partials.
  MatrixXd g = sys.g.at(state.q);
  VectorXd dF_dq(n), dF_dqdot(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += sys.g.partial(i, j, k, state.q) * state.qdot[j] * a[i] +
             g(i, j) * state.qdot[j] * delta.comp()[i].diff(chart.coord(k), env);
    dF_dq[k] = s;
    dF_dqdot[k] = g.row(k).dot(a);
  }
  double DF = along_field(D, state, dF_dq, dF_dqdot);

  double deltaT = a.dot(kinetic_energy_dq(sys, state)) +
                  adot.dot(kinetic_energy_dqdot(sys, state));
  double alpha_delta = sys.alpha_at(state).dot(a);
  return DF - deltaT + alpha_delta;
}

double time_class_check(const Chart& chart, const OneForm& tau, const TangentState& state) {
  if (state.qdot.norm() == 0.0)
    throw PreconditionError("class of time is defined off the zero section (qdot = 0)");
  return pairing_dot(chart, tau, state);
}

}  // namespace lagmech
