#ifndef TESTS_HELPERS_HPP
#define TESTS_HELPERS_HPP

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <lagmech/constraints.hpp>
#include <lagmech/dynamics.hpp>

namespace testutil {

using lagmech::Chart;
using lagmech::Expr;
using lagmech::MatrixXd;
using lagmech::MetricField;
using lagmech::OneForm;
using lagmech::TangentState;
using lagmech::VectorXd;

inline std::string poly_term(std::mt19937& rng, const Chart& chart) {
  std::uniform_real_distribution<double> coef(-0.4, 0.4);
  std::uniform_int_distribution<int> pick(0, chart.dim() - 1);
  std::ostringstream os;
  os << coef(rng) << "*" << chart.coord(pick(rng));
  if (pick(rng) % 2 == 0) os << "*" << chart.coord(pick(rng));
  return os.str();
}

// Random polynomial scalar: constant + a few linear/quadratic terms.
inline std::string random_poly(std::mt19937& rng, const Chart& chart, double constant = 0.0) {
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  std::ostringstream os;
  os << constant + coef(rng);
  for (int k = 0; k < 3; ++k) os << " + " << poly_term(rng, chart);
  return os.str();
}

// Positive-definite polynomial metric on the unit box: identity plus small
// symmetric polynomial perturbations (diagonally dominant there).
inline MetricField random_pd_metric(std::mt19937& rng, const Chart& chart) {
  int n = chart.dim();
  std::uniform_real_distribution<double> small(-0.08, 0.08);
  std::vector<std::vector<Expr>> lower(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      std::ostringstream os;
      if (i == j) os << "1 + (" << poly_term(rng, chart) << ")*(0.2)";
      else os << "(" << small(rng) << ") + (" << poly_term(rng, chart) << ")*(0.1)";
      lower[static_cast<std::size_t>(i)].push_back(Expr::parse(os.str()));
    }
  }
  return MetricField(Chart(chart.coords()), std::move(lower));
}

inline TangentState random_state(std::mt19937& rng, int n, double box = 1.0) {
  std::uniform_real_distribution<double> unit(-box, box);
  VectorXd q(n), qdot(n);
  for (int i = 0; i < n; ++i) {
    q[i] = unit(rng);
    qdot[i] = unit(rng);
  }
  return TangentState(std::move(q), std::move(qdot));
}

inline OneForm random_form(std::mt19937& rng, const Chart& chart) {
  std::vector<Expr> comps;
  for (int i = 0; i < chart.dim(); ++i) comps.push_back(Expr::parse(random_poly(rng, chart)));
  return OneForm(std::move(comps));
}

inline VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

inline VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace testutil

#endif
