#ifndef LAGMECH_TIMECONSTRAINT_HPP
#define LAGMECH_TIMECONSTRAINT_HPP

#include <span>

#include "lagmech/constraints.hpp"

namespace lagmech {

// Closed 1-form tau without zeros defining the time constraint tau_dot = 1.
// Closedness is either declared (tau = df with f given) or verified by
// sampling d(tau) at user-provided points.
class TimeForm {
 public:
  // Declared exact, optionally with the primitive f.
  static TimeForm exact(OneForm tau, std::optional<Expr> primitive = std::nullopt);

  // Numerically verified closed: dA_i/dq^j - dA_j/dq^i at each sample.
  static TimeForm verified(const Chart& chart, OneForm tau,
                           std::span<const VectorXd> samples, double tol = 1e-9);

  const OneForm& form() const { return tau_; }
  const std::optional<Expr>& primitive() const { return primitive_; }

  // Components at q; throws if all vanish simultaneously (tau has a zero).
  VectorXd at(const Chart& chart, const VectorXd& q) const;

 private:
  TimeForm(OneForm tau, std::optional<Expr> primitive)
      : tau_(std::move(tau)), primitive_(std::move(primitive)) {}
  OneForm tau_;
  std::optional<Expr> primitive_;
};

// Time-dependent linear constraints: Lambda_M plus tau, with
// {tau, beta_1, ..., beta_r} pointwise independent.
struct TimeDependentConstraints {
  TimeForm tau;
  ConstraintSystem constraints;
};

// D_bar = D - (D tau_dot / <grad tau, grad tau>) Grad tau.
// Tangent to every level set tau_dot = c; errors on isotropic grad tau.
SecondOrderField modified_field(const MechanicalSystem& sys, const TimeForm& tau);

// Residuals of the adapted-coordinate equations (tau = dq^0, qdot^0 = c):
//   g_{mu nu} qddot^nu + Gamma_{sigma nu, mu} qdot^sigma qdot^nu
//     + 2 c Gamma_{nu 0, mu} qdot^nu + c^2 Gamma_{00, mu} + A_mu
// with qddot from the modified field. Spatial indices run 1..n-1.
VectorXd adapted_equations_check(const MechanicalSystem& sys, const TimeForm& tau,
                                 double c, const TangentState& state);

// <tau, v> at sample points and the resulting classification.
enum class DisplacementClass { ModuleAdmissible, Tangent, NotTangent };
struct DisplacementVerdict {
  DisplacementClass cls;
  std::vector<double> pairings;  // <tau, v> at each sample
};
DisplacementVerdict admissible_displacement(const Chart& chart, const TimeForm& tau,
                                            const std::vector<Expr>& v,
                                            std::span<const VectorXd> samples);

// D_bar = D + sum_{k=0}^r lambda^k Grad beta_k with beta_0 = tau, solved so
// that D_bar tau_dot = D_bar beta_dot_k = 0. Requires a positive-definite
// metric unless the caller asserts the definite-splitting hypothesis.
SecondOrderField time_dependent_field(const MechanicalSystem& sys,
                                      const TimeDependentConstraints& tc,
                                      bool assert_indefinite_splitting = false);

}  // namespace lagmech

#endif
