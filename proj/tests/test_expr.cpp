#include <doctest.h>

#include <cmath>
#include <random>

#include <lagmech/expr.hpp>

#include "helpers.hpp"

using namespace lagmech;

namespace {

double fd_diff(const Expr& e, const std::string& var, VarEnv env) {
  const double h = 1e-6;
  for (auto& [name, value] : env)
    if (name == var) {
      double x = value;
      value = x + h;
      double up = e.eval(env);
      value = x - h;
      double down = e.eval(env);
      value = x;
      return (up - down) / (2 * h);
    }
  throw std::runtime_error("variable not bound");
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("parse and evaluate basics") {
  CHECK(Expr::parse("0").eval({}) == 0.0);
  CHECK(Expr::parse("x^2 + y^2").eval({{"x", 1}, {"y", 2}}) == 5.0);
  CHECK(Expr::parse("1 + x^2 + y^2").eval({{"x", 1}, {"y", 2}}) == 6.0);
  CHECK(Expr::parse("sin(0)").eval({}) == 0.0);
  CHECK(Expr::parse("exp(2*t)").eval({{"t", 0}}) == 1.0);
  CHECK(Expr::parse("exp(2*t)*(x^2+y^2)").eval({{"t", 0}, {"x", 3}, {"y", 4}}) == 25.0);
  CHECK(Expr::parse("atan2(1, 1)").eval({}) == doctest::Approx(M_PI / 4).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
  // ^ binds tighter than unary minus and is right-associative
  CHECK(Expr::parse("-x^2").eval({{"x", 2}}) == -4.0);
  CHECK(Expr::parse("-2^2").eval({}) == -4.0);
  CHECK(Expr::parse("2^3^2").eval({}) == 512.0);
  CHECK(Expr::parse("6/3*2").eval({}) == 4.0);
  CHECK(Expr::parse("1 - 2 - 3").eval({}) == -4.0);
  CHECK(Expr::parse("2*x^2").eval({{"x", 3}}) == 18.0);
  CHECK(Expr::parse("(-2)^2").eval({}) == 4.0);
}

TEST_CASE("exact derivatives") {
  CHECK(Expr::parse("x^2").diff("x", {{"x", 3}}) == 6.0);
  CHECK(Expr::parse("5").diff("x", {{"x", 1}}) == 0.0);
  CHECK(Expr::parse("c").diff("x", {{"c", 7}, {"x", 1}}) == 0.0);
  // d g_theta_theta / dr for the polar metric dr^2 + r^2 dtheta^2
  CHECK(Expr::parse("r^2").diff("r", {{"r", 2}}) == 4.0);
  CHECK(Expr::parse("sin(x)").diff("x", {{"x", 0}}) == 1.0);
  CHECK(Expr::parse("x^x").diff("x", {{"x", 2}}) ==
        doctest::Approx(4 * (std::log(2.0) + 1)).epsilon(1e-14));
}

TEST_CASE("round trip parse(print(e))") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.2, 1.7);
  const char* sources[] = {
      "x^2 + y^2",     "-x^2 * (y - 3)",        "sin(x)*cos(y) + tan(0.3*x)",
      "exp(x)/ (1+y)", "sqrt(x^2 + y^2) ^ 3",   "atan2(x, y) - log(x + 2)",
      "2^x",           "x - y - 0.25*x*y",
  };
  for (const char* src : sources) {
    Expr e = Expr::parse(src);
    Expr round = Expr::parse(e.str());
    for (int k = 0; k < 10; ++k) {
      VarEnv env = {{"x", unit(rng)}, {"y", unit(rng)}};
      CHECK(e.eval(env) == round.eval(env));
    }
  }
}

TEST_CASE("purity: repeated evaluation is bit-identical") {
  Expr e = Expr::parse("sin(x)*exp(y) - x^3/(y+2)");
  VarEnv env = {{"x", 0.7312}, {"y", -0.25}};
  double first = e.eval(env);
  double d_first = e.diff("x", env);
  for (int k = 0; k < 5; ++k) {
    CHECK(e.eval(env) == first);
    CHECK(e.diff("x", env) == d_first);
  }
}

TEST_CASE("derivative linearity for literal coefficients") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  Expr e1 = Expr::parse("x^2*y");
  Expr e2 = Expr::parse("sin(x) + y");
  Expr combo = Expr::parse("3.5*(x^2*y) + (-1.25)*(sin(x) + y)");
  for (int k = 0; k < 20; ++k) {
    VarEnv env = {{"x", unit(rng)}, {"y", unit(rng)}};
    double lhs = combo.diff("x", env);
    double rhs = 3.5 * e1.diff("x", env) - 1.25 * e2.diff("x", env);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
  }
}

TEST_CASE("dual-number derivative matches central finite differences") {
  std::mt19937 rng(2024);
  Chart chart({"x", "y", "z"});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Expr e = Expr::parse(testutil::random_poly(rng, chart));
    VarEnv env = {{"x", unit(rng)}, {"y", unit(rng)}, {"z", unit(rng)}};
    for (const char* var : {"x", "y", "z"}) {
      double exact = e.diff(var, env);
      double fd = fd_diff(e, var, env);
      CHECK(std::abs(exact - fd) <= 1e-5 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("symbolic derivative expression agrees with dual numbers") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.3, 1.4);
  const char* sources[] = {"x^2*y + sin(x*y)", "sqrt(x^2 + y^2)", "exp(-x)*log(y + 1)",
                           "atan2(y, x)", "x/(y + 0.5) - y^3"};
  for (const char* src : sources) {
    Expr e = Expr::parse(src);
    Expr dx = e.derivative("x");
    for (int k = 0; k < 10; ++k) {
      VarEnv env = {{"x", unit(rng)}, {"y", unit(rng)}};
      CHECK(dx.eval(env) == doctest::Approx(e.diff("x", env)).epsilon(1e-13));
    }
  }
}

TEST_CASE("errors are typed, not NaN") {
  CHECK_THROWS_AS(Expr::parse("x +* y"), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(3)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("sin(1, 2)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("(x + y"), ParseError);
  CHECK_THROWS_AS(Expr::parse("x").eval({}), EvalError);
  CHECK_THROWS_AS(Expr::parse("log(x)").eval({{"x", 0.0}}), EvalError);
  CHECK_THROWS_AS(Expr::parse("log(x)").eval({{"x", -1.0}}), EvalError);
  CHECK_THROWS_AS(Expr::parse("sqrt(x)").eval({{"x", -4.0}}), EvalError);
  CHECK_THROWS_AS(Expr::parse("1/x").eval({{"x", 0.0}}), EvalError);
  CHECK_THROWS_AS(Expr::parse("x^0.5").eval({{"x", -1.0}}), EvalError);
  CHECK_THROWS_AS(Expr::parse("atan2(x, y)").eval({{"x", 0.0}, {"y", 0.0}}), EvalError);
  // parse errors report a position
  try {
    Expr::parse("x + ");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("negative bases with integer constant exponents are fine") {
  CHECK(Expr::parse("x^3").eval({{"x", -2}}) == -8.0);
  CHECK(Expr::parse("x^2").diff("x", {{"x", -3}}) == -6.0);
}

}  // TEST_SUITE
