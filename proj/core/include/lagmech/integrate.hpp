#ifndef LAGMECH_INTEGRATE_HPP
#define LAGMECH_INTEGRATE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lagmech/dynamics.hpp"

namespace lagmech {

// Named scalar observable evaluated at trajectory nodes.
struct Monitor {
  std::string name;
  std::function<double(double t, const TangentState&)> fn;
};

// Fixed-step trajectory with monitor channels evaluated at every node.
struct Trajectory {
  std::vector<double> times;
  std::vector<TangentState> states;
  std::vector<std::string> monitor_names;
  std::vector<std::vector<double>> monitor_values;  // [node][monitor]
  std::vector<double> max_drift;                    // per monitor: max |m - m(0)|
  std::vector<double> projection_magnitudes;        // per step, when projecting
  std::optional<std::string> abort_reason;          // set when integration aborted

  const TangentState& final_state() const { return states.back(); }
};

struct IntegrateOptions {
  // Applied to qdot after each step; the correction magnitude is logged.
  std::function<VectorXd(const TangentState&)> velocity_projection;
};

// One classical RK4 step on the first-order system (qdot, accel).
TangentState rk4_step(const SecondOrderField& D, const TangentState& state, double h);

// Integrate to t_end on a uniform grid. A non-finite acceleration aborts the
// run; the partial trajectory up to the last good state is returned with an
// abort annotation.
Trajectory integrate(const SecondOrderField& D, const TangentState& state0, double h,
                     double t_end, const std::vector<Monitor>& monitors = {},
                     const IntegrateOptions& options = {});

}  // namespace lagmech

#endif
