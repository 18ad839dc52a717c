#ifndef LAGMECH_GEOMETRY_HPP
#define LAGMECH_GEOMETRY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lagmech/expr.hpp"

namespace lagmech {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Coordinate chart: ordered, distinct coordinate names. The name
// "<coord>_dot" is derived for velocities and must not be used directly.
class Chart {
 public:
  explicit Chart(std::vector<std::string> coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::string& coord(int i) const { return coords_[i]; }
  const std::string& velocity(int i) const { return velocities_[i]; }
  const std::vector<std::string>& coords() const { return coords_; }
  int index(const std::string& name) const;  // -1 when absent

 private:
  std::vector<std::string> coords_;
  std::vector<std::string> velocities_;
};

// A point of TM in chart coordinates.
struct TangentState {
  VectorXd q;
  VectorXd qdot;

  TangentState() = default;
  TangentState(VectorXd q_, VectorXd qdot_) : q(std::move(q_)), qdot(std::move(qdot_)) {}
};

// Variable bindings for expressions of q only.
VarEnv base_env(const Chart& chart, const VectorXd& q);
// Bindings for q and q_dot.
VarEnv tangent_env(const Chart& chart, const TangentState& state);

// Christoffel symbols at a point: first kind Gamma_ij,k and second kind
// Gamma^l_ij, both symmetric in (i, j).
struct Christoffel {
  std::vector<MatrixXd> first;   // first[k](i, j)  = Gamma_ij,k
  std::vector<MatrixXd> second;  // second[l](i, j) = Gamma^l_ij
};

// Symmetric metric coefficient field g_ij(q) with exact derivatives.
class MetricField {
 public:
  // Lower-triangular entries: lower[i][j] for j <= i. Symmetric fill.
  MetricField(Chart chart, std::vector<std::vector<Expr>> lower);

  static MetricField euclidean(Chart chart);

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const Expr& entry(int i, int j) const { return entries_[i][j]; }

  MatrixXd at(const VectorXd& q) const;
  MatrixXd inverse_at(const VectorXd& q) const;  // throws SingularityError
  bool positive_definite_at(const VectorXd& q) const;

  // Exact partial dg_ij/dq^k.
  double partial(int i, int j, int k, const VectorXd& q) const;

  Christoffel christoffel(const VectorXd& q) const;

 private:
  Chart chart_;
  std::vector<std::vector<Expr>> entries_;  // full symmetric matrix of Expr
};

// Horizontal 1-form on TM: components A_i(q [, q_dot]).
struct OneForm {
  std::vector<Expr> comp;

  OneForm() = default;
  explicit OneForm(std::vector<Expr> c) : comp(std::move(c)) {}

  static OneForm zero(int n);
  static OneForm coordinate(int n, int i);  // dq^i

  bool empty() const { return comp.empty(); }
  VectorXd at(const Chart& chart, const TangentState& state) const;
  bool depends_on_velocity(const Chart& chart) const;
};

// Vector with g v = beta at state (index raised with the inverse metric).
VectorXd grad_form(const MetricField& g, const OneForm& beta, const TangentState& state);

// II_v(qdot, qdot) for a vector field v given by n component expressions of q.
double second_fundamental_form(const MetricField& g, const std::vector<Expr>& v,
                               const TangentState& state);

// Same quantity from the lowered form beta = i_v T2 (components of q only):
// II(qdot,qdot) = qdot^h qdot^k (dB_h/dq^k - B_l Gamma^l_hk).
double second_fundamental_form_lowered(const MetricField& g, const OneForm& beta,
                                       const TangentState& state);

}  // namespace lagmech

#endif
