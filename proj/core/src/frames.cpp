#include "lagmech/frames.hpp"

#include <cmath>
#include <sstream>

#include "lagmech/errors.hpp"

namespace lagmech {

namespace {

using DDual = Dual<double>;
using D2 = Dual<Dual<double>>;

}  // namespace

Frame::Frame(Chart source, Chart target, std::vector<Expr> forward, std::vector<Expr> inverse)
    : source_(std::move(source)),
      target_(std::move(target)),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)) {
  if (source_.dim() != target_.dim())
    throw ConfigError("frame source and target must have the same dimension");
  if (static_cast<int>(forward_.size()) != source_.dim() ||
      static_cast<int>(inverse_.size()) != source_.dim())
    throw ConfigError("frame needs one forward and one inverse expression per coordinate");
}

VectorXd Frame::map(const VectorXd& q) const {
  VarEnv env = base_env(source_, q);
  VectorXd p(dim());
  for (int i = 0; i < dim(); ++i) p[i] = forward_[i].eval(env);
  return p;
}

VectorXd Frame::inverse_map(const VectorXd& p) const {
  VarEnv env = base_env(target_, p);
  VectorXd q(dim());
  for (int i = 0; i < dim(); ++i) q[i] = inverse_[i].eval(env);
  return q;
}

MatrixXd Frame::jacobian(const VectorXd& q) const {
  int n = dim();
  MatrixXd jac(n, n);
  VarEnv env = base_env(source_, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jac(i, j) = forward_[i].diff(source_.coord(j), env);
  Eigen::FullPivLU<MatrixXd> lu(jac);
  if (!lu.isInvertible()) throw SingularityError("singular frame Jacobian");
  return jac;
}

std::vector<MatrixXd> Frame::hessian(const VectorXd& q) const {
  int n = dim();
  std::vector<MatrixXd> h(n, MatrixXd(n, n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k <= j; ++k) {
      auto lookup = [&](const std::string& name) -> D2 {
        int i = source_.index(name);
        if (i < 0) throw EvalError("unbound variable '" + name + "'");
        D2 x(DDual(q[i], i == k ? 1.0 : 0.0), DDual(i == j ? 1.0 : 0.0, 0.0));
        return x;
      };
      for (int i = 0; i < n; ++i) {
        double second = forward_[i].eval_generic<D2>(lookup).d.d;
        h[i](j, k) = h[i](k, j) = second;
      }
    }
  return h;
}

void Frame::check_inverse(std::span<const VectorXd> samples, double tol) const {
  for (const VectorXd& q : samples) {
    VectorXd back = inverse_map(map(q));
    if ((back - q).lpNorm<Eigen::Infinity>() > tol) {
      std::ostringstream os;
      os << "frame inverse check failed at sample (" << q.transpose() << ")";
      throw ConfigError(os.str());
    }
  }
}

MatrixXd ComposedMap::jacobian(const VectorXd& q) const {
  return outer_->jacobian(inner_->map(q)) * inner_->jacobian(q);
}

std::vector<MatrixXd> ComposedMap::hessian(const VectorXd& q) const {
  int n = dim();
  VectorXd mid = inner_->map(q);
  MatrixXd ji = inner_->jacobian(q);
  MatrixXd jo = outer_->jacobian(mid);
  std::vector<MatrixXd> hi = inner_->hessian(q);
  std::vector<MatrixXd> ho = outer_->hessian(mid);

  std::vector<MatrixXd> h(n, MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) h[i] += jo(i, l) * hi[l];
    h[i] += ji.transpose() * ho[i] * ji;
  }
  return h;
}

GroupFrame::GroupFrame(Frame frame) : frame_(std::move(frame)) {
  const Chart& src = frame_.source();
  if (src.coord(0) != "t")
    throw ConfigError("group frame chart must have 't' as its first coordinate");
  // phi_0 = id and the t component passes through, checked at a few points.
  int n = src.dim();
  for (double t : {0.0, 0.37, -1.1}) {
    VectorXd q(n);
    q[0] = t;
    for (int i = 1; i < n; ++i) q[i] = 0.25 * i - 0.6;
    VectorXd p = frame_.map(q);
    if (std::abs(p[0] - t) > 1e-12)
      throw ConfigError("group frame must map (t, a) to (t, phi_t(a))");
    if (t == 0.0) {
      for (int i = 1; i < n; ++i)
        if (std::abs(p[i] - q[i]) > 1e-12)
          throw ConfigError("group frame must satisfy phi_0 = id");
    }
  }
}

VectorXd GroupFrame::apply_at(double t, const VectorXd& a) const {
  int n = frame_.source().dim();
  VectorXd q(n);
  q[0] = t;
  q.tail(n - 1) = a;
  return frame_.map(q).tail(n - 1);
}

MatrixXd GroupFrame::spatial_jacobian(double t, const VectorXd& a) const {
  int n = frame_.source().dim();
  VectorXd q(n);
  q[0] = t;
  q.tail(n - 1) = a;
  return frame_.jacobian(q).bottomRightCorner(n - 1, n - 1);
}

VectorXd GroupFrame::generator(const VectorXd& a) const {
  int n = frame_.source().dim();
  VectorXd q(n);
  q[0] = 0.0;
  q.tail(n - 1) = a;
  // u^i(a) = d phi^i / dt at (0, a): the t-column of the full Jacobian.
  return frame_.jacobian(q).col(0).tail(n - 1);
}

MatrixXd GroupFrame::spatial_pullback(double t, const VectorXd& a, const MetricField& g_M) const {
  MatrixXd js = spatial_jacobian(t, a);
  VectorXd b = apply_at(t, a);
  return js.transpose() * g_M.at(b) * js;
}

MatrixXd pullback_metric_at(const ChartMap& phi, const MetricField& gbar, const VectorXd& q) {
  MatrixXd j = phi.jacobian(q);
  return j.transpose() * gbar.at(phi.map(q)) * j;
}

MetricField product_metric(const Chart& extended_chart, const MetricField& g_M) {
  int n = extended_chart.dim();
  std::vector<std::vector<Expr>> lower(n);
  lower[0] = {Expr::constant(1.0)};
  for (int i = 1; i < n; ++i) {
    lower[i].resize(i + 1, Expr::constant(0.0));
    for (int j = 1; j <= i; ++j) lower[i][j] = g_M.entry(i - 1, j - 1);
  }
  return MetricField(extended_chart, std::move(lower));
}

MatrixXd group_pullback_closed_form(const GroupFrame& phi, const MetricField& g_M,
                                    const VectorXd& q) {
  int m = phi.spatial_dim();
  double t = q[0];
  VectorXd a = q.tail(m);

  MatrixXd s = phi.spatial_pullback(t, a, g_M);  // phi_t^* T2 at a
  VectorXd b = phi.apply_at(t, a);
  VectorXd u_b = phi.generator(b);
  VectorXd u_a = phi.generator(a);

  MatrixXd out = MatrixXd::Zero(m + 1, m + 1);
  out(0, 0) = 1.0 + u_b.dot(g_M.at(b) * u_b);
  VectorXd cross = s * u_a;  // i_{u_a}(phi_t^* T2)
  out.block(0, 1, 1, m) = cross.transpose();
  out.block(1, 0, m, 1) = cross;
  out.block(1, 1, m, m) = s;
  return out;
}

VectorXd pullback_form_at(const ChartMap& phi,
                          const std::function<VectorXd(const TangentState&)>& abar,
                          const TangentState& state) {
  MatrixXd j = phi.jacobian(state.q);
  TangentState target(phi.map(state.q), j * state.qdot);
  return j.transpose() * abar(target);
}

SecondOrderField transported_field(std::shared_ptr<const ChartMap> phi,
                                   const SecondOrderField& dbar) {
  return SecondOrderField(
      [phi, dbar](const TangentState& state) {
        MatrixXd j = phi->jacobian(state.q);
        std::vector<MatrixXd> h = phi->hessian(state.q);
        TangentState target(phi->map(state.q), j * state.qdot);
        VectorXd a_target = dbar.accel(target);
        VectorXd hq(j.rows());
        for (int i = 0; i < j.rows(); ++i)
          hq[i] = state.qdot.dot(h[static_cast<std::size_t>(i)] * state.qdot);
        Eigen::FullPivLU<MatrixXd> lu(j);
        if (!lu.isInvertible()) throw SingularityError("singular frame Jacobian");
        return VectorXd(lu.solve(a_target - hq));
      },
      "transported");
}

VectorXd inertial_force(const ChartMap& phi, const MetricField& g_src,
                        const MetricField& g_tgt, const TangentState& state) {
  MechanicalSystem src(g_src.chart(), g_src);
  MechanicalSystem tgt(g_tgt.chart(), g_tgt);
  SecondOrderField transported = transported_field(
      std::shared_ptr<const ChartMap>(&phi, [](const ChartMap*) {}), geodesic_field(tgt));
  return transported.accel(state) - geodesic_field(src).accel(state);
}

namespace {

// Random polynomial vertical force on the target (spatial components only),
// used to sample the preservation congruence.
struct SpatialForce {
  MatrixXd lin_q, lin_qdot;  // m x n coefficient blocks
  VectorXd constant;
  VectorXd accel_spatial(const TangentState& target) const {
    return constant + lin_q * target.q + lin_qdot * target.qdot +
           0.1 * (lin_q * target.q.cwiseProduct(target.q));
  }
};

}  // namespace

FrameClassification classify_frame(const GroupFrame& phi, const MetricField& g_M,
                                   const SampleBox& box) {
  FrameClassification out;
  out.samples = box.budget;
  int m = phi.spatial_dim();
  int n = m + 1;

  const Chart& chart = phi.chart();
  MetricField g_ext = product_metric(chart, g_M);
  MechanicalSystem sys_ext(chart, g_ext);
  SecondOrderField geo_ext = geodesic_field(sys_ext);

  std::mt19937 rng(box.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto sample_spatial = [&] {
    VectorXd a(m);
    for (int i = 0; i < m; ++i)
      a[i] = box.lo[i] + 0.5 * (unit(rng) + 1.0) * (box.hi[i] - box.lo[i]);
    return a;
  };

  auto frame_ptr = std::make_shared<Frame>(phi.frame());

  for (int s = 0; s < box.budget; ++s) {
    double t = unit(rng);
    VectorXd a = sample_spatial();
    VectorXd q(n);
    q[0] = t;
    q.tail(m) = a;
    VectorXd qdot(n);
    qdot[0] = 1.0;
    for (int i = 1; i < n; ++i) qdot[i] = unit(rng);
    TangentState state(q, qdot);

    // Inertial: transported geodesic vs own geodesic of dt^2 (+) T2.
    VectorXd force = inertial_force(phi.frame(), g_ext, g_ext, state);
    out.max_inertial_force = std::max(out.max_inertial_force,
                                      force.lpNorm<Eigen::Infinity>());

    // Isometry of each phi_t on M.
    MatrixXd defect = phi.spatial_pullback(t, a, g_M) - g_M.at(a);
    out.max_isometry_defect = std::max(out.max_isometry_defect,
                                       defect.lpNorm<Eigen::Infinity>());

    // Preservation congruence, sampled over vertical forces W with W t-dot = 0.
    SpatialForce w;
    w.lin_q = MatrixXd::NullaryExpr(m, n, [&](Eigen::Index, Eigen::Index) { return unit(rng); });
    w.lin_qdot = MatrixXd::NullaryExpr(m, n, [&](Eigen::Index, Eigen::Index) { return unit(rng); });
    w.constant = VectorXd::NullaryExpr(m, [&](Eigen::Index) { return unit(rng); });

    SecondOrderField dbar(
        [geo_ext, w, m](const TangentState& st) {
          VectorXd acc = geo_ext.accel(st);
          acc.tail(m) += w.accel_spatial(st);
          return acc;
        },
        "sampled");
    auto abar = [&](const TangentState& st) {
      return VectorXd(-(g_ext.at(st.q) * covariant_value(dbar, sys_ext, st)));
    };
    SecondOrderField d1 = transported_field(frame_ptr, dbar);
    VectorXd alpha1 = work_form_of(d1, sys_ext, state);
    VectorXd pulled = pullback_form_at(*frame_ptr, abar, state);
    double res = (pulled - alpha1).tail(m).lpNorm<Eigen::Infinity>();
    out.max_congruence_residual = std::max(out.max_congruence_residual, res);
  }

  out.inertial = out.max_inertial_force <= 1e-7;
  out.isometry_group = out.max_isometry_defect <= 1e-7;
  out.preserves_equations = out.max_congruence_residual <= 1e-7;
  out.theorem_consistent = out.preserves_equations == (out.inertial && out.isometry_group);
  return out;
}

GroupFrame translation_group(const VectorXd& direction) {
  int m = static_cast<int>(direction.size());
  std::vector<std::string> names = {"t"};
  std::vector<std::string> base = {"x", "y", "z"};
  for (int i = 0; i < m; ++i)
    names.push_back(i < 3 ? base[static_cast<std::size_t>(i)] : "x" + std::to_string(i + 1));
  Chart src(names);
  Chart tgt(names);
  std::vector<Expr> fwd, inv;
  fwd.push_back(Expr::parse("t"));
  inv.push_back(Expr::parse("t"));
  for (int i = 0; i < m; ++i) {
    std::ostringstream f, b;
    f << names[i + 1] << " + (" << direction[i] << ")*t";
    b << names[i + 1] << " - (" << direction[i] << ")*t";
    fwd.push_back(Expr::parse(f.str()));
    inv.push_back(Expr::parse(b.str()));
  }
  return GroupFrame(Frame(src, tgt, std::move(fwd), std::move(inv)));
}

GroupFrame rotation_group(double rate) {
  Chart chart({"t", "x", "y"});
  std::ostringstream w;
  w << "(" << rate << ")";
  std::string r = w.str();
  std::vector<Expr> fwd = {
      Expr::parse("t"),
      Expr::parse("x*cos(" + r + "*t) - y*sin(" + r + "*t)"),
      Expr::parse("x*sin(" + r + "*t) + y*cos(" + r + "*t)")};
  std::vector<Expr> inv = {
      Expr::parse("t"),
      Expr::parse("x*cos(" + r + "*t) + y*sin(" + r + "*t)"),
      Expr::parse("-x*sin(" + r + "*t) + y*cos(" + r + "*t)")};
  return GroupFrame(Frame(chart, chart, std::move(fwd), std::move(inv)));
}

GroupFrame dilatation_group(double rate) {
  Chart chart({"t", "x", "y"});
  std::ostringstream w;
  w << "(" << rate << ")";
  std::string r = w.str();
  std::vector<Expr> fwd = {Expr::parse("t"), Expr::parse("exp(" + r + "*t)*x"),
                           Expr::parse("exp(" + r + "*t)*y")};
  std::vector<Expr> inv = {Expr::parse("t"), Expr::parse("exp(-" + r + "*t)*x"),
                           Expr::parse("exp(-" + r + "*t)*y")};
  return GroupFrame(Frame(chart, chart, std::move(fwd), std::move(inv)));
}

}  // namespace lagmech
