#include <doctest.h>

#include <cmath>
#include <random>

#include <lagmech/errors.hpp>
#include <lagmech/integrate.hpp>
#include <lagmech/timeconstraint.hpp>

#include "helpers.hpp"

using namespace lagmech;
using testutil::vec2;
using testutil::vec3;

namespace {

// tau = dr on Euclidean R^3: the moving-sphere constraint rdot = 1.
TimeForm radius_time_form() {
  Expr r = Expr::parse("sqrt(x^2 + y^2 + z^2)");
  return TimeForm::exact(OneForm({r.derivative("x"), r.derivative("y"), r.derivative("z")}), r);
}

// Random state adjusted so that rdot = 1 (unit radial velocity component).
TangentState rdot_one_state(std::mt19937& rng) {
  TangentState s = testutil::random_state(rng, 3);
  s.q += testutil::vec3(1.4, 0, 0);
  VectorXd n = s.q.normalized();
  s.qdot += (1.0 - n.dot(s.qdot)) * n;
  return s;
}

}  // namespace

TEST_SUITE("timeconstraint") {

TEST_CASE("time form construction and zero rejection") {
  Chart chart({"t", "x"});
  TimeForm dt = TimeForm::exact(OneForm::coordinate(2, 0), Expr::parse("t"));
  CHECK(dt.at(chart, vec2(0.3, -2))[0] == 1.0);
  CHECK(dt.primitive().has_value());

  // x dx + y dy vanishes at the origin
  TimeForm xy = TimeForm::exact(OneForm({Expr::parse("x"), Expr::parse("y")}));
  Chart plane({"x", "y"});
  CHECK_THROWS_AS(xy.at(plane, vec2(0, 0)), SingularityError);
}

TEST_CASE("closedness verification accepts exact forms and rejects curl") {
  Chart chart({"t", "x", "y"});
  std::vector<VectorXd> samples;
  std::mt19937 rng(5);
  for (int k = 0; k < 8; ++k) samples.push_back(testutil::random_state(rng, 3).q);

  // dt + d(xy) is closed
  OneForm closed({Expr::parse("1"), Expr::parse("y"), Expr::parse("x")});
  CHECK_NOTHROW(TimeForm::verified(chart, closed, samples));

  // dt + x dy - y dx has curl 2
  OneForm twisted({Expr::parse("1"), Expr::parse("0 - y"), Expr::parse("x")});
  CHECK_THROWS_AS(TimeForm::verified(chart, twisted, samples), ConfigError);

  // velocity dependence is rejected outright
  OneForm vel({Expr::parse("x_dot"), Expr::parse("0"), Expr::parse("0")});
  CHECK_THROWS_AS(TimeForm::verified(chart, vel, samples), ConfigError);
}

TEST_CASE("modified field on the moving sphere r = r0 + t") {
  // Free particle in R^3 with tau = dr. On states with rdot = 1 and speed v
  // the modified acceleration is ((1 - v^2)/r^2) q; in general it is
  // ((rdot^2 - v^2)/r^2) q.
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  SecondOrderField D = modified_field(sys, radius_time_form());

  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    TangentState s = rdot_one_state(rng);
    double r2 = s.q.squaredNorm();
    double v2 = s.qdot.squaredNorm();
    VectorXd expect = ((1.0 - v2) / r2) * s.q;
    CHECK((D.accel(s) - expect).lpNorm<Eigen::Infinity>() <= 1e-8);
  }

  // arbitrary rdot: the field is tangent to every level set tau_dot = c
  for (int trial = 0; trial < 10; ++trial) {
    TangentState s = testutil::random_state(rng, 3);
    s.q += vec3(1.5, 0, 0);
    double rdot = s.q.normalized().dot(s.qdot);
    double v2 = s.qdot.squaredNorm();
    VectorXd expect = ((rdot * rdot - v2) / s.q.squaredNorm()) * s.q;
    CHECK((D.accel(s) - expect).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("modified field preserves tau_dot along the flow") {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  TimeForm tau = radius_time_form();
  SecondOrderField D = modified_field(sys, tau);
  std::mt19937 rng(7);
  TangentState s0 = rdot_one_state(rng);
  std::vector<Monitor> mons = {
      {"tau_dot", [&](double, const TangentState& s) { return pairing_dot(chart, tau.form(), s); }},
      {"r", [](double, const TangentState& s) { return s.q.norm(); }}};
  Trajectory tr = integrate(D, s0, 1e-3, 1.0, mons);
  CHECK(!tr.abort_reason.has_value());
  CHECK(tr.max_drift[0] <= 1e-8);  // tau_dot stays at 1
  // r grows linearly: r(t) = r0 + t
  double r0 = s0.q.norm();
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    CHECK(std::abs(tr.monitor_values[k][1] - (r0 + tr.times[k])) <= 1e-6);
}

TEST_CASE("isotropic gradient raises a singularity error") {
  // Indefinite metric dt^2 - dx^2 makes grad(dt + dx) isotropic.
  Chart chart({"t", "x"});
  MetricField g(chart, {{Expr::parse("1")}, {Expr::parse("0"), Expr::parse("-1")}});
  MechanicalSystem sys(chart, std::move(g));
  TimeForm tau = TimeForm::exact(OneForm({Expr::parse("1"), Expr::parse("1")}));
  SecondOrderField D = modified_field(sys, tau);
  CHECK_THROWS_AS(D.accel(TangentState(vec2(0, 0), vec2(1, 0))), SingularityError);
}

TEST_CASE("adapted equations residuals vanish for the modified field") {
  // Rotating-frame pullback metric on (t, x, y) with tau = dt.
  Chart chart({"t", "x", "y"});
  MetricField g(chart, {{Expr::parse("1 + x^2 + y^2")},
                        {Expr::parse("-y"), Expr::parse("1")},
                        {Expr::parse("x"), Expr::parse("0"), Expr::parse("1")}});
  MechanicalSystem sys(chart, std::move(g));
  TimeForm tau = TimeForm::exact(OneForm::coordinate(3, 0), Expr::parse("t"));

  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    TangentState s = testutil::random_state(rng, 3);
    double c = s.qdot[0];
    VectorXd res = adapted_equations_check(sys, tau, c, s);
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-8);
  }

  // tau must be a coordinate differential for the adapted form
  TimeForm not_dt = TimeForm::exact(OneForm({Expr::parse("1"), Expr::parse("y"), Expr::parse("x")}));
  CHECK_THROWS_AS(adapted_equations_check(sys, not_dt, 1.0, testutil::random_state(rng, 3)),
                  PreconditionError);
}

TEST_CASE("displacement classification against tau") {
  Chart chart({"t", "x", "y"});
  TimeForm tau = TimeForm::exact(OneForm::coordinate(3, 0), Expr::parse("t"));
  std::vector<VectorXd> samples;
  std::mt19937 rng(19);
  for (int k = 0; k < 6; ++k) samples.push_back(testutil::random_state(rng, 3).q);

  // spatial displacement: <tau, v> = 0 everywhere, admissible for the module
  auto spatial = admissible_displacement(chart, tau, {Expr::parse("0"), Expr::parse("y"),
                                                      Expr::parse("0 - x")},
                                         samples);
  CHECK(spatial.cls == DisplacementClass::ModuleAdmissible);
  for (double p : spatial.pairings) CHECK(p == 0.0);

  // constant time shift: <tau, v> = 1, merely tangent
  auto shift = admissible_displacement(chart, tau, {Expr::parse("1"), Expr::parse("0"),
                                                    Expr::parse("0")},
                                       samples);
  CHECK(shift.cls == DisplacementClass::Tangent);
  for (double p : shift.pairings) CHECK(p == 1.0);

  // position-dependent time component: <tau, v> = x varies, not tangent
  auto bad = admissible_displacement(chart, tau, {Expr::parse("x"), Expr::parse("0"),
                                                  Expr::parse("0")},
                                     samples);
  CHECK(bad.cls == DisplacementClass::NotTangent);
}

TEST_CASE("time-dependent constraints: moving wire x = t * y") {
  // Euclidean (t, x, y) with tau = dt and the holonomic constraint
  // B = x - t y. The field must keep tau_dot = 1 and B_dot = 0.
  Chart chart({"t", "x", "y"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  TimeForm tau = TimeForm::exact(OneForm::coordinate(3, 0), Expr::parse("t"));
  Expr B = Expr::parse("x - t*y");
  OneForm dB({B.derivative("t"), B.derivative("x"), B.derivative("y")});
  ConstraintSystem cs(chart, {Constraint{dB, B}});
  SecondOrderField D = time_dependent_field(sys, {tau, cs});

  std::mt19937 rng(23);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    // admissible state: tdot = 1, xdot = y + t ydot
    TangentState s = testutil::random_state(rng, 3);
    s.qdot[0] = 1.0;
    s.qdot[1] = s.q[2] + s.q[0] * s.qdot[2];
    TangentState fwd = rk4_step(D, s, h);
    double dtau = (pairing_dot(chart, tau.form(), fwd) - 1.0) / h;
    double dB_rate = (pairing_dot(chart, dB, fwd) - pairing_dot(chart, dB, s)) / h;
    CHECK(std::abs(dtau) <= 1e-8);
    CHECK(std::abs(dB_rate) <= 1e-8);
  }

  // the level sets B = const are preserved along trajectories
  TangentState s0(vec3(0, 0, 1), vec3(1, 1, 0.3));
  std::vector<Monitor> mons = {
      {"B", [&](double, const TangentState& s) {
         return s.q[1] - s.q[0] * s.q[2];
       }}};
  Trajectory tr = integrate(D, s0, 1e-3, 1.0, mons);
  CHECK(!tr.abort_reason.has_value());
  CHECK(tr.max_drift[0] <= 1e-6);
}

TEST_CASE("time-dependent field with no spatial constraints reduces to the modified field") {
  Chart chart({"x", "y", "z"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  TimeForm tau = radius_time_form();
  SecondOrderField full = time_dependent_field(sys, {tau, ConstraintSystem::empty()});
  SecondOrderField mod = modified_field(sys, tau);
  std::mt19937 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    TangentState s = testutil::random_state(rng, 3);
    s.q += vec3(1.5, 0, 0);
    CHECK((full.accel(s) - mod.accel(s)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("time-dependent field rejects tau inside the constraint span") {
  Chart chart({"t", "x", "y"});
  MechanicalSystem sys(chart, MetricField::euclidean(chart));
  TimeForm tau = TimeForm::exact(OneForm::coordinate(3, 0), Expr::parse("t"));
  ConstraintSystem cs(chart, {Constraint{OneForm::coordinate(3, 0), std::nullopt}});
  SecondOrderField D = time_dependent_field(sys, {tau, cs});
  CHECK_THROWS_AS(D.accel(TangentState(vec3(0, 0, 0), vec3(1, 0, 0))), SingularityError);
}

TEST_CASE("indefinite metric requires the explicit splitting assertion") {
  Chart chart({"t", "x"});
  MetricField g(chart, {{Expr::parse("1")}, {Expr::parse("0"), Expr::parse("-1")}});
  MechanicalSystem sys(chart, std::move(g));
  TimeForm tau = TimeForm::exact(OneForm::coordinate(2, 0), Expr::parse("t"));
  ConstraintSystem cs = ConstraintSystem::empty();
  SecondOrderField strict = time_dependent_field(sys, {tau, cs});
  CHECK_THROWS_AS(strict.accel(TangentState(vec2(0, 0), vec2(1, 0.2))), PreconditionError);
  SecondOrderField lenient = time_dependent_field(sys, {tau, cs}, true);
  CHECK_NOTHROW(lenient.accel(TangentState(vec2(0, 0), vec2(1, 0.2))));
}

}  // TEST_SUITE
