#include <benchmark/benchmark.h>

#include <lagmech/constraints.hpp>
#include <lagmech/dynamics.hpp>
#include <lagmech/integrate.hpp>

using namespace lagmech;

namespace {

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

MetricField curved_metric() {
  Chart chart({"x", "y", "z"});
  return MetricField(chart, {{Expr::parse("1 + 0.2*x^2")},
                             {Expr::parse("0.1*x*y"), Expr::parse("1 + 0.2*y^2")},
                             {Expr::parse("0.05*z"), Expr::parse("0.1*y*z"),
                              Expr::parse("1 + 0.2*z^2")}});
}

void bm_expr_eval(benchmark::State& state) {
  Expr e = Expr::parse("sin(x)*exp(0.3*y) + sqrt(1 + x^2 + y^2) - x*y/(2 + cos(x))");
  VarEnv env = {{"x", 0.7}, {"y", -0.4}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.eval(env));
    env[0].second += 1e-9;  // defeat caching assumptions
  }
}
BENCHMARK(bm_expr_eval);

void bm_expr_diff(benchmark::State& state) {
  Expr e = Expr::parse("sin(x)*exp(0.3*y) + sqrt(1 + x^2 + y^2) - x*y/(2 + cos(x))");
  VarEnv env = {{"x", 0.7}, {"y", -0.4}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.diff("x", env));
    env[1].second += 1e-9;
  }
}
BENCHMARK(bm_expr_diff);

void bm_christoffel(benchmark::State& state) {
  MetricField g = curved_metric();
  VectorXd q = vec3(0.3, -0.5, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.christoffel(q));
    q[0] += 1e-9;
  }
}
BENCHMARK(bm_christoffel);

void bm_geodesic_accel(benchmark::State& state) {
  MetricField g = curved_metric();
  MechanicalSystem sys(g.chart(), g);
  SecondOrderField geo = geodesic_field(sys);
  TangentState s(vec3(0.3, -0.5, 0.8), vec3(1, 0.2, -0.4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(geo.accel(s));
    s.q[1] += 1e-9;
  }
}
BENCHMARK(bm_geodesic_accel);

void bm_constrained_accel(benchmark::State& state) {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  Expr r = Expr::parse("sqrt(x^2 + y^2 + z^2)");
  OneForm beta({r.derivative("x"), r.derivative("y"), r.derivative("z")});
  ConstraintSystem cs(chart, {Constraint{beta, r}});
  SecondOrderField D = constrained_field(sys, cs);
  TangentState s(vec3(1, 0, 0), vec3(0, 1, 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(D.accel(s));
    s.qdot[2] += 1e-9;
  }
}
BENCHMARK(bm_constrained_accel);

void bm_rk4_step(benchmark::State& state) {
  MetricField g = curved_metric();
  MechanicalSystem sys(g.chart(), g);
  SecondOrderField geo = geodesic_field(sys);
  TangentState s(vec3(0.3, -0.5, 0.8), vec3(1, 0.2, -0.4));
  for (auto _ : state) {
    s = rk4_step(geo, s, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_rk4_step);

}  // namespace

BENCHMARK_MAIN();
