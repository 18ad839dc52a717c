#include "lagmech/integrate.hpp"

#include <cmath>

#include "lagmech/errors.hpp"

namespace lagmech {

namespace {

bool finite(const VectorXd& v) { return v.allFinite(); }

struct Deriv {
  VectorXd dq, dqdot;
};

Deriv eval_deriv(const SecondOrderField& D, const TangentState& s) {
  Deriv d;
  d.dq = s.qdot;
  d.dqdot = D.accel(s);
  if (!finite(d.dqdot))
    throw EvalError("non-finite acceleration at an RK4 stage");
  return d;
}

}  // namespace

TangentState rk4_step(const SecondOrderField& D, const TangentState& state, double h) {
  if (!(h > 0.0)) throw PreconditionError("step size must be positive");
  Deriv k1 = eval_deriv(D, state);
  TangentState s2(state.q + 0.5 * h * k1.dq, state.qdot + 0.5 * h * k1.dqdot);
  Deriv k2 = eval_deriv(D, s2);
  TangentState s3(state.q + 0.5 * h * k2.dq, state.qdot + 0.5 * h * k2.dqdot);
  Deriv k3 = eval_deriv(D, s3);
  TangentState s4(state.q + h * k3.dq, state.qdot + h * k3.dqdot);
  Deriv k4 = eval_deriv(D, s4);
  return TangentState(
      state.q + (h / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
      state.qdot + (h / 6.0) * (k1.dqdot + 2.0 * k2.dqdot + 2.0 * k3.dqdot + k4.dqdot));
}

Trajectory integrate(const SecondOrderField& D, const TangentState& state0, double h,
                     double t_end, const std::vector<Monitor>& monitors,
                     const IntegrateOptions& options) {
  Trajectory traj;
  for (const auto& m : monitors) traj.monitor_names.push_back(m.name);
  traj.max_drift.assign(monitors.size(), 0.0);

  auto record = [&](double t, const TangentState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    std::vector<double> row;
    row.reserve(monitors.size());
    for (const auto& m : monitors) row.push_back(m.fn(t, s));
    if (!traj.monitor_values.empty())
      for (std::size_t i = 0; i < row.size(); ++i)
        traj.max_drift[i] =
            std::max(traj.max_drift[i], std::abs(row[i] - traj.monitor_values.front()[i]));
    traj.monitor_values.push_back(std::move(row));
  };

  if (t_end < 0.0) throw PreconditionError("t_end must be non-negative");
  // Full steps of h, then one shorter step landing exactly on t_end when h
  // does not divide the horizon.
  long steps = static_cast<long>(std::floor(t_end / h + 1e-9));
  double remainder = t_end - static_cast<double>(steps) * h;
  if (remainder <= 1e-9 * h) remainder = 0.0;

  TangentState s = state0;
  record(0.0, s);
  for (long i = 0; i < steps + (remainder > 0.0 ? 1 : 0); ++i) {
    bool last_partial = i == steps;
    try {
      s = rk4_step(D, s, last_partial ? remainder : h);
    } catch (const Error& e) {
      traj.abort_reason = e.what();
      return traj;
    }
    if (options.velocity_projection) {
      VectorXd projected = options.velocity_projection(s);
      traj.projection_magnitudes.push_back((projected - s.qdot).norm());
      s.qdot = projected;
    }
    record(last_partial ? t_end : static_cast<double>(i + 1) * h, s);
  }
  return traj;
}

}  // namespace lagmech
