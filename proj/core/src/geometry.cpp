#include "lagmech/geometry.hpp"

#include <set>
#include <sstream>

#include "lagmech/errors.hpp"

namespace lagmech {

namespace {

std::string point_str(const VectorXd& q) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q[i];
  os << ")";
  return os.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Chart::Chart(std::vector<std::string> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw ConfigError("chart needs at least one coordinate");
  std::set<std::string> seen;
  for (const auto& c : coords_) {
    if (c.empty()) throw ConfigError("empty coordinate name");
    if (ends_with(c, "_dot"))
      throw ConfigError("coordinate name '" + c + "' must not end in _dot");
    if (!seen.insert(c).second)
      throw ConfigError("duplicate coordinate name '" + c + "'");
    velocities_.push_back(c + "_dot");
  }
}

int Chart::index(const std::string& name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] == name) return static_cast<int>(i);
  return -1;
}

VarEnv base_env(const Chart& chart, const VectorXd& q) {
  VarEnv env;
  env.reserve(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) env.emplace_back(chart.coord(i), q[i]);
  return env;
}

VarEnv tangent_env(const Chart& chart, const TangentState& state) {
  VarEnv env;
  env.reserve(2 * chart.dim());
  for (int i = 0; i < chart.dim(); ++i) env.emplace_back(chart.coord(i), state.q[i]);
  for (int i = 0; i < chart.dim(); ++i) env.emplace_back(chart.velocity(i), state.qdot[i]);
  return env;
}

MetricField::MetricField(Chart chart, std::vector<std::vector<Expr>> lower)
    : chart_(std::move(chart)) {
  int n = chart_.dim();
  if (static_cast<int>(lower.size()) != n)
    throw ConfigError("metric needs one row per coordinate");
  entries_.assign(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(lower[i].size()) != i + 1)
      throw ConfigError("metric row " + std::to_string(i + 1) + " must have " +
                        std::to_string(i + 1) + " lower-triangular entries");
    for (int j = 0; j <= i; ++j) {
      if (!lower[i][j].valid()) throw ConfigError("missing metric entry");
      entries_[i][j] = lower[i][j];
      entries_[j][i] = lower[i][j];
    }
  }
}

MetricField MetricField::euclidean(Chart chart) {
  int n = chart.dim();
  std::vector<std::vector<Expr>> lower(n);
  for (int i = 0; i < n; ++i) {
    lower[i].resize(i + 1, Expr::constant(0.0));
    lower[i][i] = Expr::constant(1.0);
  }
  return MetricField(std::move(chart), std::move(lower));
}

MatrixXd MetricField::at(const VectorXd& q) const {
  int n = dim();
  VarEnv env = base_env(chart_, q);
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) g(i, j) = g(j, i) = entries_[i][j].eval(env);
  return g;
}

MatrixXd MetricField::inverse_at(const VectorXd& q) const {
  MatrixXd g = at(q);
  Eigen::FullPivLU<MatrixXd> lu(g);
  if (!lu.isInvertible())
    throw SingularityError("degenerate metric at q = " + point_str(q));
  return lu.inverse();
}

bool MetricField::positive_definite_at(const VectorXd& q) const {
  MatrixXd g = at(q);
  Eigen::LLT<MatrixXd> llt(g);
  return llt.info() == Eigen::Success;
}

double MetricField::partial(int i, int j, int k, const VectorXd& q) const {
  return entries_[i][j].diff(chart_.coord(k), base_env(chart_, q));
}

Christoffel MetricField::christoffel(const VectorXd& q) const {
  int n = dim();
  VarEnv env = base_env(chart_, q);

  // dg[k](i, j) = dg_ij/dq^k, from exact dual-number derivatives.
  std::vector<MatrixXd> dg(n, MatrixXd(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j)
        dg[k](i, j) = dg[k](j, i) = entries_[i][j].diff(chart_.coord(k), env);

  Christoffel c;
  c.first.assign(n, MatrixXd(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        c.first[k](i, j) = 0.5 * (dg[j](i, k) + dg[i](j, k) - dg[k](i, j));

  MatrixXd ginv = inverse_at(q);
  c.second.assign(n, MatrixXd::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      if (ginv(l, k) != 0.0) c.second[l] += ginv(l, k) * c.first[k];
  return c;
}

OneForm OneForm::zero(int n) {
  std::vector<Expr> c(n);
  for (auto& e : c) e = Expr::constant(0.0);
  return OneForm(std::move(c));
}

OneForm OneForm::coordinate(int n, int i) {
  OneForm f = zero(n);
  f.comp[i] = Expr::constant(1.0);
  return f;
}

VectorXd OneForm::at(const Chart& chart, const TangentState& state) const {
  VarEnv env = tangent_env(chart, state);
  VectorXd a(comp.size());
  for (std::size_t i = 0; i < comp.size(); ++i) a[static_cast<int>(i)] = comp[i].eval(env);
  return a;
}

bool OneForm::depends_on_velocity(const Chart& chart) const {
  for (const auto& e : comp)
    for (int i = 0; i < chart.dim(); ++i)
      if (e.depends_on(chart.velocity(i))) return true;
  return false;
}

VectorXd grad_form(const MetricField& g, const OneForm& beta, const TangentState& state) {
  return g.inverse_at(state.q) * beta.at(g.chart(), state);
}

double second_fundamental_form(const MetricField& g, const std::vector<Expr>& v,
                               const TangentState& state) {
  const Chart& chart = g.chart();
  int n = g.dim();
  VarEnv env = base_env(chart, state.q);

  VectorXd vval(n);
  for (int i = 0; i < n; ++i) vval[i] = v[i].eval(env);

  MatrixXd gq = g.at(state.q);
  // dB[h](k) = d(g_kl v^l)/dq^h by the product rule.
  MatrixXd dB(n, n);
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int l = 0; l < n; ++l)
        s += g.partial(k, l, h, state.q) * vval[l] + gq(k, l) * v[l].diff(chart.coord(h), env);
      dB(h, k) = s;
    }

  Christoffel c = g.christoffel(state.q);
  double out = 0.0;
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k) {
      double gamma = 0.0;
      for (int l = 0; l < n; ++l) gamma += c.first[l](h, k) * vval[l];
      out += state.qdot[h] * state.qdot[k] * (dB(h, k) - gamma);
    }
  return out;
}

double second_fundamental_form_lowered(const MetricField& g, const OneForm& beta,
                                       const TangentState& state) {
  const Chart& chart = g.chart();
  int n = g.dim();
  VarEnv env = base_env(chart, state.q);

  VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = beta.comp[i].eval(env);
  VectorXd v = g.inverse_at(state.q) * b;

  Christoffel c = g.christoffel(state.q);
  double out = 0.0;
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k) {
      double gamma = 0.0;
      for (int l = 0; l < n; ++l) gamma += c.first[l](h, k) * v[l];
      out += state.qdot[h] * state.qdot[k] *
             (beta.comp[h].diff(chart.coord(k), env) - gamma);
    }
  return out;
}

}  // namespace lagmech
