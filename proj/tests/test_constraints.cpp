#include <doctest.h>

#include <cmath>
#include <random>

#include <lagmech/constraints.hpp>
#include <lagmech/errors.hpp>
#include <lagmech/integrate.hpp>

#include "helpers.hpp"

using namespace lagmech;
using testutil::vec2;
using testutil::vec3;

namespace {

// Unit-sphere constraint in Euclidean R^3, holonomic with B = |q|.
ConstraintSystem sphere_constraint(const Chart& chart) {
  Expr primitive = Expr::parse("sqrt(x^2 + y^2 + z^2)");
  OneForm beta({primitive.derivative("x"), primitive.derivative("y"), primitive.derivative("z")});
  return ConstraintSystem(chart, {Constraint{std::move(beta), primitive}});
}

// Project qdot onto the sphere tangent space and normalize |q| = 1.
TangentState sphere_state(std::mt19937& rng) {
  TangentState s = testutil::random_state(rng, 3);
  s.q += testutil::vec3(1.2, 0, 0);  // keep away from the origin
  s.q.normalize();
  s.qdot -= s.q.dot(s.qdot) * s.q;
  return s;
}

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("system validation") {
  Chart chart({"x", "y", "z"});
  // velocity-dependent components are rejected
  CHECK_THROWS_AS(ConstraintSystem(chart, {Constraint{OneForm({Expr::parse("x_dot"),
                                                               Expr::parse("0"),
                                                               Expr::parse("0")}),
                                           std::nullopt}}),
                  ConfigError);
  // rank must stay below the dimension
  std::vector<Constraint> too_many;
  for (int k = 0; k < 3; ++k)
    too_many.push_back(Constraint{OneForm::coordinate(3, k), std::nullopt});
  CHECK_THROWS_AS(ConstraintSystem(chart, std::move(too_many)), ConfigError);

  ConstraintSystem cs = sphere_constraint(chart);
  CHECK(cs.rank() == 1);
  CHECK(cs.holonomic());
  CHECK(!ConstraintSystem::empty().holonomic());
  CHECK(ConstraintSystem::empty().rank() == 0);
}

TEST_CASE("admissibility values are the pairings beta(qdot)") {
  Chart chart({"x", "y", "z"});
  ConstraintSystem cs = sphere_constraint(chart);
  TangentState tangential(vec3(1, 0, 0), vec3(0, 2, -1));
  CHECK(admissible(chart, cs, tangential)[0] == 0.0);
  TangentState radial(vec3(1, 0, 0), vec3(0.5, 0, 0));
  CHECK(admissible(chart, cs, radial)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sphere multiplier equals minus the squared speed") {
  // On the unit sphere with unit speed, lambda = -|qdot|^2 and the
  // constrained acceleration is -|qdot|^2 q (centripetal).
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  ConstraintSystem cs = sphere_constraint(chart);

  TangentState s(vec3(1, 0, 0), vec3(0, 1, 0));
  VectorXd lambda = solve_multipliers(sys, cs, s);
  CHECK(lambda.size() == 1);
  CHECK(lambda[0] == doctest::Approx(-1.0).epsilon(1e-12));

  SecondOrderField D = constrained_field(sys, cs);
  VectorXd a = D.accel(s);
  CHECK((a - vec3(-1, 0, 0)).lpNorm<Eigen::Infinity>() <= 1e-12);

  std::mt19937 rng(3);
  for (int k = 0; k < 10; ++k) {
    TangentState st = sphere_state(rng);
    double v2 = st.qdot.squaredNorm();
    VectorXd acc = D.accel(st);
    CHECK((acc + v2 * st.q).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("constrained field keeps beta_dot constant (tangency)") {
  std::mt19937 rng(8);
  Chart chart({"x", "y", "z"});
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    MechanicalSystem sys(chart, testutil::random_pd_metric(rng, chart),
                         testutil::random_form(rng, chart));
    // random linear constraint with constant coefficients
    std::uniform_real_distribution<double> unit(-1, 1);
    OneForm beta({Expr::constant(unit(rng) + 1.5), Expr::constant(unit(rng)),
                  Expr::constant(unit(rng))});
    ConstraintSystem cs(chart, {Constraint{beta, std::nullopt}});
    SecondOrderField D = constrained_field(sys, cs);

    TangentState s = testutil::random_state(rng, 3, 0.7);
    // derivative of beta_dot along the flow via one small RK4 step
    TangentState fwd = rk4_step(D, s, h);
    double rate = (admissible(chart, cs, fwd)[0] - admissible(chart, cs, s)[0]) / h;
    CHECK(std::abs(rate) <= 1e-8);
  }
}

TEST_CASE("gram system residual is tiny for random independent systems") {
  std::mt19937 rng(12);
  Chart chart({"x", "y", "z"});
  for (int trial = 0; trial < 10; ++trial) {
    MechanicalSystem sys(chart, testutil::random_pd_metric(rng, chart));
    std::uniform_real_distribution<double> unit(-1, 1);
    std::vector<Constraint> cons;
    cons.push_back(Constraint{OneForm({Expr::constant(1), Expr::constant(unit(rng)),
                                       Expr::constant(unit(rng))}),
                              std::nullopt});
    cons.push_back(Constraint{OneForm({Expr::constant(unit(rng)), Expr::constant(1),
                                       Expr::constant(unit(rng))}),
                              std::nullopt});
    ConstraintSystem cs(chart, std::move(cons));
    TangentState s = testutil::random_state(rng, 3, 0.7);

    VectorXd lambda = solve_multipliers(sys, cs, s);
    // rebuild the Gram system and check the residual directly
    MatrixXd ginv = sys.g.inverse_at(s.q);
    MatrixXd B(3, 2);
    for (int k = 0; k < 2; ++k) B.col(k) = cs.constraint(k).beta.at(chart, s);
    MatrixXd gram = B.transpose() * ginv * B;
    SecondOrderField Dfree = free_field(sys);
    VectorXd rhs(2);
    for (int k = 0; k < 2; ++k)
      rhs[k] = -pairing_dot_along(Dfree, chart, cs.constraint(k).beta, s);
    CHECK((gram * lambda - rhs).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("dependent constraints raise a singularity error") {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  std::vector<Constraint> cons;
  cons.push_back(Constraint{OneForm::coordinate(3, 0), std::nullopt});
  cons.push_back(Constraint{OneForm({Expr::constant(2), Expr::constant(0), Expr::constant(0)}),
                            std::nullopt});
  ConstraintSystem cs(chart, std::move(cons));
  TangentState s(vec3(0, 0, 0), vec3(0, 1, 0));
  CHECK_THROWS_AS(solve_multipliers(sys, cs, s), SingularityError);
}

TEST_CASE("covariant decomposition splits the sphere field") {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  ConstraintSystem cs = sphere_constraint(chart);
  SecondOrderField D = constrained_field(sys, cs);

  std::mt19937 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    TangentState s = sphere_state(rng);
    CovariantDecomposition dec = covariant_decomposition(sys, cs, s);
    // alpha = 0: tangential part vanishes, curvature part is all of D^nabla
    CHECK(dec.projection.lpNorm<Eigen::Infinity>() <= 1e-10);
    VectorXd total = covariant_value(D, sys, s);
    CHECK((dec.projection + dec.curvature - total).lpNorm<Eigen::Infinity>() <= 1e-10);
    // curvature part is normal: g(curvature, w) = 0 for tangential w
    VectorXd w = s.qdot;
    CHECK(std::abs(dec.curvature.dot(w)) <= 1e-10 * (1 + w.norm()));
  }
}

TEST_CASE("decomposition sums to the covariant value with forces present") {
  std::mt19937 rng(33);
  Chart chart({"x", "y", "z"});
  for (int trial = 0; trial < 10; ++trial) {
    MechanicalSystem sys(chart, testutil::random_pd_metric(rng, chart),
                         testutil::random_form(rng, chart));
    std::uniform_real_distribution<double> unit(-1, 1);
    OneForm beta({Expr::constant(1.0 + unit(rng) * 0.3), Expr::constant(unit(rng)),
                  Expr::constant(unit(rng))});
    ConstraintSystem cs(chart, {Constraint{beta, std::nullopt}});
    TangentState s = testutil::random_state(rng, 3, 0.6);
    s.qdot = project_velocity(sys, cs, s);  // make the state admissible
    SecondOrderField D = constrained_field(sys, cs);
    CovariantDecomposition dec = covariant_decomposition(sys, cs, s);
    VectorXd total = covariant_value(D, sys, s);
    CHECK((dec.projection + dec.curvature - total).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("decomposition requires an admissible state") {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  ConstraintSystem cs = sphere_constraint(chart);
  TangentState bad(vec3(1, 0, 0), vec3(1, 1, 0));  // radial component
  CHECK_THROWS_AS(covariant_decomposition(sys, cs, bad), PreconditionError);
}

TEST_CASE("velocity projection lands in the kernel and is idempotent") {
  std::mt19937 rng(44);
  Chart chart({"x", "y", "z"});
  for (int trial = 0; trial < 10; ++trial) {
    MechanicalSystem sys(chart, testutil::random_pd_metric(rng, chart));
    ConstraintSystem cs = sphere_constraint(chart);
    TangentState s = testutil::random_state(rng, 3, 0.5);
    s.q += vec3(1.3, 0, 0);
    VectorXd proj = project_velocity(sys, cs, s);
    TangentState after(s.q, proj);
    CHECK(std::abs(admissible(chart, cs, after)[0]) <= 1e-12);
    VectorXd twice = project_velocity(sys, cs, after);
    CHECK((twice - proj).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("constraint drift stays small over a full revolution") {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  ConstraintSystem cs = sphere_constraint(chart);
  SecondOrderField D = constrained_field(sys, cs);
  std::vector<Monitor> mons = {{"r", [](double, const TangentState& s) { return s.q.norm(); }}};
  Trajectory tr = integrate(D, TangentState(vec3(1, 0, 0), vec3(0, 1, 0)), 1e-3,
                            2 * M_PI, mons);
  CHECK(!tr.abort_reason.has_value());
  CHECK(tr.max_drift[0] <= 1e-6);
  CHECK((tr.final_state().q - vec3(1, 0, 0)).lpNorm<Eigen::Infinity>() <= 1e-5);
}

}  // TEST_SUITE
