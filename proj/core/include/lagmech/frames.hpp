#ifndef LAGMECH_FRAMES_HPP
#define LAGMECH_FRAMES_HPP

#include <memory>
#include <random>
#include <span>

#include "lagmech/dynamics.hpp"

namespace lagmech {

// Differentiable chart map with user-supplied inverse; first and second
// derivatives are exact.
class ChartMap {
 public:
  virtual ~ChartMap() = default;
  virtual int dim() const = 0;
  virtual VectorXd map(const VectorXd& q) const = 0;
  virtual VectorXd inverse_map(const VectorXd& p) const = 0;
  virtual MatrixXd jacobian(const VectorXd& q) const = 0;  // J(i,j) = dphi^i/dq^j
  // hessian[i](j,k) = d^2 phi^i / dq^j dq^k
  virtual std::vector<MatrixXd> hessian(const VectorXd& q) const = 0;
};

// Reference frame phi: R -> M given by component expressions of the source
// coordinates (and their user-supplied inverse).
class Frame : public ChartMap {
 public:
  Frame(Chart source, Chart target, std::vector<Expr> forward, std::vector<Expr> inverse);

  const Chart& source() const { return source_; }
  const Chart& target() const { return target_; }

  int dim() const override { return source_.dim(); }
  VectorXd map(const VectorXd& q) const override;
  VectorXd inverse_map(const VectorXd& p) const override;
  MatrixXd jacobian(const VectorXd& q) const override;  // nonsingular or throws
  std::vector<MatrixXd> hessian(const VectorXd& q) const override;

  // phi(phi^-1) = id at each sample to tol; throws ConfigError otherwise.
  void check_inverse(std::span<const VectorXd> samples, double tol = 1e-8) const;

 private:
  Chart source_, target_;
  std::vector<Expr> forward_, inverse_;
};

// phi then psi (evaluated numerically; derivatives by the chain rule).
class ComposedMap : public ChartMap {
 public:
  ComposedMap(std::shared_ptr<const ChartMap> inner, std::shared_ptr<const ChartMap> outer)
      : inner_(std::move(inner)), outer_(std::move(outer)) {}

  int dim() const override { return inner_->dim(); }
  VectorXd map(const VectorXd& q) const override { return outer_->map(inner_->map(q)); }
  VectorXd inverse_map(const VectorXd& p) const override {
    return inner_->inverse_map(outer_->inverse_map(p));
  }
  MatrixXd jacobian(const VectorXd& q) const override;
  std::vector<MatrixXd> hessian(const VectorXd& q) const override;

 private:
  std::shared_ptr<const ChartMap> inner_, outer_;
};

// Uniparametric group read as a frame of R x M: (t, a) -> (t, phi_t(a)).
// The source chart's first coordinate is the group parameter t.
class GroupFrame {
 public:
  explicit GroupFrame(Frame frame);  // validates the (t, a) -> (t, .) shape

  const Frame& frame() const { return frame_; }
  const Chart& chart() const { return frame_.source(); }  // chart of R x M
  int spatial_dim() const { return frame_.source().dim() - 1; }

  // phi_t(a): spatial image at parameter t.
  VectorXd apply_at(double t, const VectorXd& a) const;
  // Spatial Jacobian d phi_t / d a at (t, a).
  MatrixXd spatial_jacobian(double t, const VectorXd& a) const;
  // Infinitesimal generator u(a) = d/ds phi_s(a) | s=0 (exact t-derivative).
  VectorXd generator(const VectorXd& a) const;
  // (phi_t^* T2)(a) for a metric T2 on M.
  MatrixXd spatial_pullback(double t, const VectorXd& a, const MetricField& g_M) const;

 private:
  Frame frame_;
};

// Built-in group frames on R x R^2 with the Euclidean spatial metric.
GroupFrame translation_group(const VectorXd& direction);
GroupFrame rotation_group(double rate);
GroupFrame dilatation_group(double rate);

// Extended product metric dt^2 (+) T2 on R x M, as a MetricField on the
// group frame's chart.
MetricField product_metric(const Chart& extended_chart, const MetricField& g_M);

// (phi^* gbar)(q) = J(q)^T gbar(phi(q)) J(q), evaluated numerically.
MatrixXd pullback_metric_at(const ChartMap& phi, const MetricField& gbar, const VectorXd& q);

// Closed-form pullback of dt^2 (+) T2 through a group frame:
//   (1 + |u|^2_{phi_t(a)}) dt^2 + 2 dt i_u(phi_t^* T2) + phi_t^* T2.
MatrixXd group_pullback_closed_form(const GroupFrame& phi, const MetricField& g_M,
                                    const VectorXd& q);

// Pullback of a horizontal 1-form: values of phi^*(abar) at a source state,
// where abar is a numeric covector function of the target state.
VectorXd pullback_form_at(const ChartMap& phi,
                          const std::function<VectorXd(const TangentState&)>& abar,
                          const TangentState& state);

// The unique field D1 with phi_* D1 = Dbar:
//   accel1(q, qdot) = J^-1 (accel_bar(phi(q), J qdot) - qdot^T H qdot).
SecondOrderField transported_field(std::shared_ptr<const ChartMap> phi,
                                   const SecondOrderField& dbar);

// Transported geodesic field of g_tgt minus the geodesic field of g_src;
// a vertical field read as an acceleration.
VectorXd inertial_force(const ChartMap& phi, const MetricField& g_src,
                        const MetricField& g_tgt, const TangentState& state);

// Sampling box for classification.
struct SampleBox {
  VectorXd lo, hi;  // coordinate bounds (spatial chart of M)
  int budget = 64;
  unsigned seed = 20240915;
};

struct FrameClassification {
  bool inertial = false;
  bool isometry_group = false;
  bool preserves_equations = false;  // direct congruence test
  bool theorem_consistent = false;   // preserves == (inertial && isometry)
  double max_inertial_force = 0.0;
  double max_isometry_defect = 0.0;
  double max_congruence_residual = 0.0;
  int samples = 0;
};

// Sample-based classification of a group frame over the box, with the
// equivalence (preserves equations <=> inertial and isometry) cross-checked.
FrameClassification classify_frame(const GroupFrame& phi, const MetricField& g_M,
                                   const SampleBox& box);

}  // namespace lagmech

#endif
