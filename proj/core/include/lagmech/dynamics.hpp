#ifndef LAGMECH_DYNAMICS_HPP
#define LAGMECH_DYNAMICS_HPP

#include <functional>
#include <string>
#include <utility>

#include "lagmech/geometry.hpp"

namespace lagmech {

// Configuration space, kinetic metric, and work form alpha.
// alpha is the 1-form of Newton's law i_D w2 + dT + alpha = 0; the
// classical force covector is -alpha.
struct MechanicalSystem {
  Chart chart;
  MetricField g;
  OneForm alpha;  // empty => zero

  MechanicalSystem(Chart c, MetricField metric, OneForm work = {})
      : chart(std::move(c)), g(std::move(metric)), alpha(std::move(work)) {}

  VectorXd alpha_at(const TangentState& state) const;
};

// The acceleration map (q, qdot) -> qddot of a second order equation.
// The full field on TM is qdot^i d/dq^i + accel^i d/dqdot^i.
class SecondOrderField {
 public:
  using AccelFn = std::function<VectorXd(const TangentState&)>;

  SecondOrderField() = default;
  SecondOrderField(AccelFn accel, std::string tag)
      : accel_(std::move(accel)), tag_(std::move(tag)) {}

  VectorXd accel(const TangentState& state) const { return accel_(state); }
  const std::string& tag() const { return tag_; }
  bool valid() const { return static_cast<bool>(accel_); }

 private:
  AccelFn accel_;
  std::string tag_;
};

// Directional derivative along D of a function on TM with known exact
// partials: D f = qdot . df/dq + accel . df/dqdot.
double along_field(const SecondOrderField& D, const TangentState& state,
                   const VectorXd& df_dq, const VectorXd& df_dqdot);

// T = 1/2 g_ij qdot^i qdot^j and its exact partials.
double kinetic_energy(const MechanicalSystem& sys, const TangentState& state);
VectorXd kinetic_energy_dq(const MechanicalSystem& sys, const TangentState& state);
VectorXd kinetic_energy_dqdot(const MechanicalSystem& sys, const TangentState& state);

// qddot^l = -Gamma^l_ij qdot^i qdot^j.
SecondOrderField geodesic_field(const MechanicalSystem& sys);

// qddot^l = -Gamma^l_ij qdot^i qdot^j - g^lk A_k  (Newton's law).
SecondOrderField free_field(const MechanicalSystem& sys);

// D^nabla = qddot^l + Gamma^l_ij qdot^i qdot^j.
VectorXd covariant_value(const SecondOrderField& D, const MechanicalSystem& sys,
                         const TangentState& state);

// The horizontal form of D recovered through the metric:
// A_k = -g_lk (accel^l + Gamma^l_ij qdot^i qdot^j).
VectorXd work_form_of(const SecondOrderField& D, const MechanicalSystem& sys,
                      const TangentState& state);

// DT + <alpha, D>; zero for any field obeying Newton's law with sys.alpha.
double energy_residual(const SecondOrderField& D, const MechanicalSystem& sys,
                       const TangentState& state);

// beta_dot = A_i qdot^i for a horizontal form, with exact partials, and its
// derivative along a second order field.
double pairing_dot(const Chart& chart, const OneForm& beta, const TangentState& state);
void pairing_dot_partials(const Chart& chart, const OneForm& beta, const TangentState& state,
                          VectorXd& dq, VectorXd& dqdot);
double pairing_dot_along(const SecondOrderField& D, const Chart& chart, const OneForm& beta,
                         const TangentState& state);

// Prolongation delta_v = a^i d/dq^i + adot^i d/dqdot^i with
// adot^i = qdot^j da^i/dq^j (Euler commutation built in).
class Variation {
 public:
  explicit Variation(std::vector<Expr> comp) : comp_(std::move(comp)) {}

  const std::vector<Expr>& comp() const { return comp_; }
  VectorXd base_at(const Chart& chart, const VectorXd& q) const;
  // Full prolonged vector (a^1..a^n, adot^1..adot^n).
  VectorXd prolonged_at(const Chart& chart, const TangentState& state) const;

 private:
  std::vector<Expr> comp_;
};

Variation prolong(std::vector<Expr> v);

// Zentralgleichung residual D<theta, delta> - delta T + <alpha, delta>;
// vanishes identically for D built from sys.
double zentral_residual(const SecondOrderField& D, const MechanicalSystem& sys,
                        const Variation& delta, const TangentState& state);

// tau_dot(state); tau is in the class of time at the state iff this is 1.
// Rejects states on the zero section.
double time_class_check(const Chart& chart, const OneForm& tau, const TangentState& state);

}  // namespace lagmech

#endif
