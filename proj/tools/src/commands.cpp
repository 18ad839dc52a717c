#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include <lagmech/errors.hpp>

namespace cli {

using namespace lagmech;

std::string format_g17(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

namespace {

std::string vec_str(const VectorXd& v) {
  std::string out = "(";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(v[i]);
  }
  return out + ")";
}

std::string mat_str(const MatrixXd& m, const char* indent = "  ") {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    out += indent;
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += "  ";
      out += format_g17(m(i, j));
    }
    out += "\n";
  }
  return out;
}

// Random tangent states in the config's sampling box (or a default box
// around the initial state).
class Sampler {
 public:
  Sampler(const Model& model, unsigned seed_offset = 0) : rng_(seed(model, seed_offset)) {
    int n = model.chart.dim();
    lo_ = VectorXd::Constant(n, -1.0);
    hi_ = VectorXd::Constant(n, 1.0);
    const auto& cfg = model.config;
    if (cfg.sampling && !cfg.sampling->lo.empty()) {
      int m = static_cast<int>(cfg.sampling->lo.size());
      if (static_cast<int>(cfg.sampling->hi.size()) != m)
        throw ConfigError("[sampling] lo and hi must have the same length");
      if (m == n) {
        for (int i = 0; i < n; ++i) {
          lo_[i] = cfg.sampling->lo[static_cast<std::size_t>(i)];
          hi_[i] = cfg.sampling->hi[static_cast<std::size_t>(i)];
        }
      } else if (model.frame && m == n - 1) {
        // spatial box; the group parameter t ranges over [-1, 1]
        for (int i = 0; i < n - 1; ++i) {
          lo_[i + 1] = cfg.sampling->lo[static_cast<std::size_t>(i)];
          hi_[i + 1] = cfg.sampling->hi[static_cast<std::size_t>(i)];
        }
      } else {
        throw ConfigError("[sampling] box length does not match the chart dimension");
      }
    } else if (cfg.integration && static_cast<int>(cfg.integration->q0.size()) == n) {
      for (int i = 0; i < n; ++i) {
        double c = cfg.integration->q0[static_cast<std::size_t>(i)];
        lo_[i] = c - 0.4;
        hi_[i] = c + 0.4;
      }
    }
  }

  TangentState state() {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    int n = static_cast<int>(lo_.size());
    VectorXd q(n), qdot(n);
    for (int i = 0; i < n; ++i) {
      q[i] = lo_[i] + 0.5 * (unit(rng_) + 1.0) * (hi_[i] - lo_[i]);
      qdot[i] = unit(rng_);
    }
    return TangentState(std::move(q), std::move(qdot));
  }

  std::mt19937& rng() { return rng_; }

 private:
  static unsigned seed(const Model& model, unsigned offset) {
    unsigned s = model.config.sampling ? model.config.sampling->seed : 20240915u;
    return s + offset;
  }
  std::mt19937 rng_;
  VectorXd lo_, hi_;
};

int sample_budget(const Model& model) {
  return model.config.sampling ? model.config.sampling->budget : 64;
}

SampleBox frame_box(const Model& model) {
  int m = model.chart.dim() - 1;
  SampleBox box;
  box.lo = VectorXd::Constant(m, -1.0);
  box.hi = VectorXd::Constant(m, 1.0);
  const auto& cfg = model.config;
  if (cfg.sampling) {
    int len = static_cast<int>(cfg.sampling->lo.size());
    int off = len == m ? 0 : len == m + 1 ? 1 : -1;
    if (off < 0) throw ConfigError("[sampling] box length does not match the spatial chart");
    for (int i = 0; i < m; ++i) {
      box.lo[i] = cfg.sampling->lo[static_cast<std::size_t>(i + off)];
      box.hi[i] = cfg.sampling->hi[static_cast<std::size_t>(i + off)];
    }
    box.budget = cfg.sampling->budget;
    box.seed = cfg.sampling->seed;
  }
  return box;
}

double potential_at(const Model& model, const VectorXd& q) {
  return model.potential.eval(base_env(model.chart, q));
}

// Monitors for simulate: energy, constraint values, time pairing, user exprs.
std::vector<Monitor> build_monitors(const Model& model) {
  std::vector<Monitor> monitors;
  const Model* m = &model;
  monitors.push_back({"energy", [m](double, const TangentState& s) {
                        double e = kinetic_energy(m->sys, s);
                        if (m->has_potential) e += potential_at(*m, s.q);
                        return e;
                      }});
  for (int k = 0; k < model.constraints.rank(); ++k) {
    monitors.push_back({"bdot_" + std::to_string(k + 1), [m, k](double, const TangentState& s) {
                          return pairing_dot(m->chart, m->constraints.constraint(k).beta, s);
                        }});
    if (model.constraints.constraint(k).primitive)
      monitors.push_back({"B_" + std::to_string(k + 1), [m, k](double, const TangentState& s) {
                            return m->constraints.constraint(k).primitive->eval(
                                base_env(m->chart, s.q));
                          }});
  }
  if (model.tau)
    monitors.push_back({"tau_dot", [m](double, const TangentState& s) {
                          return pairing_dot(m->chart, m->tau->form(), s);
                        }});
  if (model.config.integration)
    for (const auto& [name, text] : model.config.integration->monitors) {
      Expr e = Expr::parse(text);
      monitors.push_back({name, [m, e](double, const TangentState& s) {
                            return e.eval(tangent_env(m->chart, s));
                          }});
    }
  return monitors;
}

TangentState initial_state(const Model& model) {
  if (!model.config.integration) throw ConfigError("missing [integration] section");
  const auto& g = *model.config.integration;
  int n = model.chart.dim();
  if (static_cast<int>(g.q0.size()) != n || static_cast<int>(g.qdot0.size()) != n)
    throw ConfigError("[integration] q0/qdot0 must match the chart dimension");
  if (!(g.h > 0.0) || !(g.t_end > 0.0))
    throw ConfigError("[integration] needs positive h and t_end");
  VectorXd q(n), qdot(n);
  for (int i = 0; i < n; ++i) {
    q[i] = g.q0[static_cast<std::size_t>(i)];
    qdot[i] = g.qdot0[static_cast<std::size_t>(i)];
  }
  return TangentState(std::move(q), std::move(qdot));
}

}  // namespace

int cmd_derive(const SystemConfig& cfg, const std::string& state_text, std::ostream& out) {
  Model model = build_model(cfg);
  TangentState state = parse_state(state_text, model.chart.dim());
  const Chart& chart = model.chart;
  int n = chart.dim();

  out << "chart:";
  for (int i = 0; i < n; ++i) out << ' ' << chart.coord(i);
  out << "\nstate: q = " << vec_str(state.q) << "  qdot = " << vec_str(state.qdot) << "\n";

  MatrixXd g = model.g.at(state.q);
  out << "metric g:\n" << mat_str(g);
  out << "inverse metric:\n" << mat_str(model.g.inverse_at(state.q));

  Christoffel gamma = model.g.christoffel(state.q);
  out << "nonzero Christoffel symbols (second kind):\n";
  bool any = false;
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (std::abs(gamma.second[static_cast<std::size_t>(l)](i, j)) > 1e-14) {
          out << "  Gamma^" << chart.coord(l) << "_(" << chart.coord(i) << "," << chart.coord(j)
              << ") = " << format_g17(gamma.second[static_cast<std::size_t>(l)](i, j)) << "\n";
          any = true;
        }
  if (!any) out << "  (all zero)\n";

  out << "kinetic energy: " << format_g17(kinetic_energy(model.sys, state)) << "\n";

  SecondOrderField free = free_field(model.sys);
  out << "free field accel: " << vec_str(free.accel(state)) << "\n";

  if (model.constraints.rank() > 0 && !model.tau) {
    VectorXd lambda = solve_multipliers(model.sys, model.constraints, state);
    out << "multipliers: " << vec_str(lambda) << "\n";
    out << "constrained field accel: " << vec_str(model.main_field.accel(state)) << "\n";
  }
  if (model.tau && model.constraints.rank() == 0)
    out << "time-constrained field accel: " << vec_str(model.main_field.accel(state)) << "\n";
  if (model.tau && model.constraints.rank() > 0)
    out << "time-dependent constrained field accel: " << vec_str(model.main_field.accel(state))
        << "\n";
  if (model.frame) {
    out << "transported field accel: " << vec_str(model.main_field.accel(state)) << "\n";
    VectorXd force = inertial_force(model.frame->frame(), model.g, model.g, state);
    out << "inertial force: " << vec_str(force) << "\n";
  }

  out << "covariant value (main field): "
      << vec_str(covariant_value(model.main_field, model.sys, state)) << "\n";
  out << "work form of main field: " << vec_str(work_form_of(model.main_field, model.sys, state))
      << "\n";
  return 0;
}

int cmd_simulate(const SystemConfig& cfg, std::ostream& out) {
  Model model = build_model(cfg);
  TangentState s0 = initial_state(model);
  std::vector<Monitor> monitors = build_monitors(model);

  IntegrateOptions options;
  if (model.config.integration->project_velocity && model.constraints.rank() > 0) {
    const Model* m = &model;
    options.velocity_projection = [m](const TangentState& s) {
      return project_velocity(m->sys, m->constraints, s);
    };
  }

  Trajectory traj = integrate(model.main_field, s0, model.config.integration->h,
                              model.config.integration->t_end, monitors, options);

  int n = model.chart.dim();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",q" << i;
  for (int i = 1; i <= n; ++i) out << ",q" << i << "_dot";
  for (const auto& m : monitors) out << ',' << m.name;
  out << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_g17(traj.times[k]);
    for (int i = 0; i < n; ++i) out << ',' << format_g17(traj.states[k].q[i]);
    for (int i = 0; i < n; ++i) out << ',' << format_g17(traj.states[k].qdot[i]);
    for (double v : traj.monitor_values[k]) out << ',' << format_g17(v);
    out << "\n";
  }
  if (traj.abort_reason) throw EvalError("integration aborted: " + *traj.abort_reason);
  return 0;
}

namespace {

struct Check {
  std::string name;
  double tolerance;
  std::function<double()> residual;
};

// Random polynomial variation components c0 + sum c_i q^i + c q^1 q^last.
std::vector<Expr> random_variation(const Chart& chart, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Expr> comps;
  for (int i = 0; i < chart.dim(); ++i) {
    std::ostringstream os;
    os << unit(rng);
    for (int j = 0; j < chart.dim(); ++j) os << " + " << unit(rng) << "*" << chart.coord(j);
    os << " + " << unit(rng) << "*" << chart.coord(0) << "*"
       << chart.coord(chart.dim() - 1);
    comps.push_back(Expr::parse(os.str()));
  }
  return comps;
}

}  // namespace

int cmd_verify(const SystemConfig& cfg, std::ostream& out) {
  Model model = build_model(cfg);
  const Chart& chart = model.chart;
  int n = chart.dim();
  int budget = std::min(sample_budget(model), 32);

  std::vector<Check> checks;
  auto max_over_samples = [&](unsigned seed_offset, auto&& fn) {
    Sampler sampler(model, seed_offset);
    double worst = 0.0;
    for (int s = 0; s < budget; ++s) worst = std::max(worst, fn(sampler.state(), sampler.rng()));
    return worst;
  };

  checks.push_back({"metric_inverse", 1e-12, [&] {
                      return max_over_samples(1, [&](const TangentState& st, std::mt19937&) {
                        MatrixXd g = model.g.at(st.q);
                        MatrixXd prod = g * model.g.inverse_at(st.q);
                        return (prod - MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>() /
                               std::max(1.0, g.lpNorm<Eigen::Infinity>());
                      });
                    }});
  checks.push_back({"christoffel_symmetry", 1e-13, [&] {
                      return max_over_samples(2, [&](const TangentState& st, std::mt19937&) {
                        Christoffel gamma = model.g.christoffel(st.q);
                        double worst = 0.0;
                        for (int l = 0; l < n; ++l)
                          worst = std::max(worst,
                                           (gamma.second[static_cast<std::size_t>(l)] -
                                            gamma.second[static_cast<std::size_t>(l)].transpose())
                                               .lpNorm<Eigen::Infinity>());
                        return worst;
                      });
                    }});
  checks.push_back({"metric_compatibility", 1e-8, [&] {
                      return max_over_samples(3, [&](const TangentState& st, std::mt19937&) {
                        Christoffel gamma = model.g.christoffel(st.q);
                        double worst = 0.0;
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j)
                            for (int k = 0; k < n; ++k) {
                              double lhs = model.g.partial(i, j, k, st.q);
                              double rhs = gamma.first[static_cast<std::size_t>(j)](k, i) +
                                           gamma.first[static_cast<std::size_t>(i)](k, j);
                              worst = std::max(worst, std::abs(lhs - rhs));
                            }
                        return worst;
                      });
                    }});
  checks.push_back({"work_form_roundtrip", 1e-10, [&] {
                      SecondOrderField free = free_field(model.sys);
                      return max_over_samples(4, [&](const TangentState& st, std::mt19937&) {
                        VectorXd rec = work_form_of(free, model.sys, st);
                        return (rec - model.sys.alpha_at(st)).lpNorm<Eigen::Infinity>();
                      });
                    }});
  checks.push_back({"zentral_identity", 1e-8, [&] {
                      SecondOrderField free = free_field(model.sys);
                      return max_over_samples(5, [&](const TangentState& st, std::mt19937& rng) {
                        Variation delta = prolong(random_variation(chart, rng));
                        return std::abs(zentral_residual(free, model.sys, delta, st));
                      });
                    }});
  // transported fields obey Newton's law for the pullback metric, not g
  if (!model.tau && !model.frame)
    checks.push_back({"energy_conservation", 1e-10, [&] {
                        return max_over_samples(6, [&](const TangentState& st, std::mt19937&) {
                          TangentState s = st;
                          if (model.constraints.rank() > 0)
                            s.qdot = project_velocity(model.sys, model.constraints, s);
                          return std::abs(energy_residual(model.main_field, model.sys, s));
                        });
                      }});
  if (model.constraints.rank() > 0) {
    checks.push_back({"multiplier_gram_residual", 1e-10, [&] {
                        if (model.tau) return 0.0;  // augmented solve checked via tangency
                        SecondOrderField free = free_field(model.sys);
                        return max_over_samples(7, [&](const TangentState& st, std::mt19937&) {
                          VectorXd lambda = solve_multipliers(model.sys, model.constraints, st);
                          int r = model.constraints.rank();
                          MatrixXd b(n, r);
                          for (int k = 0; k < r; ++k)
                            b.col(k) = model.constraints.constraint(k).beta.at(chart, st);
                          MatrixXd gram = b.transpose() * model.g.inverse_at(st.q) * b;
                          VectorXd rhs(r);
                          for (int l = 0; l < r; ++l)
                            rhs[l] = -pairing_dot_along(free, chart,
                                                        model.constraints.constraint(l).beta, st);
                          return (gram * lambda - rhs).lpNorm<Eigen::Infinity>() /
                                 std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
                        });
                      }});
    checks.push_back({"constraint_tangency", 1e-8, [&] {
                        return max_over_samples(8, [&](const TangentState& st, std::mt19937&) {
                          double worst = 0.0;
                          for (int k = 0; k < model.constraints.rank(); ++k)
                            worst = std::max(
                                worst, std::abs(pairing_dot_along(
                                           model.main_field, chart,
                                           model.constraints.constraint(k).beta, st)));
                          return worst;
                        });
                      }});
  }
  if (model.tau)
    checks.push_back({"time_level_tangency", 1e-9, [&] {
                        return max_over_samples(9, [&](const TangentState& st, std::mt19937&) {
                          return std::abs(
                              pairing_dot_along(model.main_field, chart, model.tau->form(), st));
                        });
                      }});
  if (model.frame) {
    checks.push_back({"pullback_consistency", 1e-9, [&] {
                        return max_over_samples(10, [&](const TangentState& st, std::mt19937&) {
                          MatrixXd closed =
                              group_pullback_closed_form(*model.frame, *model.spatial_g, st.q);
                          MatrixXd jac = pullback_metric_at(model.frame->frame(), model.g, st.q);
                          return (closed - jac).lpNorm<Eigen::Infinity>();
                        });
                      }});
    checks.push_back({"frame_inverse", 1e-8, [&] {
                        return max_over_samples(11, [&](const TangentState& st, std::mt19937&) {
                          const Frame& f = model.frame->frame();
                          return (f.inverse_map(f.map(st.q)) - st.q).lpNorm<Eigen::Infinity>();
                        });
                      }});
  }
  if (model.config.integration) {
    if (model.constraints.holonomic() && model.constraints.rank() > 0)
      checks.push_back({"holonomic_leaf_drift", 1e-6, [&] {
                          TangentState s0 = initial_state(model);
                          std::vector<Monitor> ms;
                          for (int k = 0; k < model.constraints.rank(); ++k) {
                            const Expr& b = *model.constraints.constraint(k).primitive;
                            ms.push_back({"B", [&, b](double, const TangentState& s) {
                                            return b.eval(base_env(chart, s.q));
                                          }});
                          }
                          Trajectory traj =
                              integrate(model.main_field, s0, model.config.integration->h,
                                        std::min(1.0, model.config.integration->t_end), ms);
                          if (traj.abort_reason) throw EvalError(*traj.abort_reason);
                          return *std::max_element(traj.max_drift.begin(), traj.max_drift.end());
                        }});
    if (model.tau)
      checks.push_back({"time_pairing_drift", 1e-6, [&] {
                          TangentState s0 = initial_state(model);
                          std::vector<Monitor> ms = {
                              {"tau_dot", [&](double, const TangentState& s) {
                                 return pairing_dot(chart, model.tau->form(), s);
                               }}};
                          Trajectory traj =
                              integrate(model.main_field, s0, model.config.integration->h,
                                        std::min(1.0, model.config.integration->t_end), ms);
                          if (traj.abort_reason) throw EvalError(*traj.abort_reason);
                          return traj.max_drift[0];
                        }});
    if (!model.tau && !model.frame && model.has_potential)
      checks.push_back({"energy_drift", 1e-6, [&] {
                          TangentState s0 = initial_state(model);
                          std::vector<Monitor> ms = {
                              {"energy", [&](double, const TangentState& s) {
                                 return kinetic_energy(model.sys, s) + potential_at(model, s.q);
                               }}};
                          Trajectory traj =
                              integrate(model.main_field, s0, model.config.integration->h,
                                        model.config.integration->t_end, ms);
                          if (traj.abort_reason) throw EvalError(*traj.abort_reason);
                          return traj.max_drift[0];
                        }});
  }

  bool all_pass = true;
  for (const auto& check : checks) {
    double residual = 0.0;
    std::string note;
    bool pass;
    try {
      residual = check.residual();
      pass = residual <= check.tolerance;
    } catch (const Error& e) {
      residual = std::numeric_limits<double>::infinity();
      note = std::string("  (") + e.what() + ")";
      pass = false;
    }
    all_pass = all_pass && pass;
    out << check.name << "  max_residual=" << format_g17(residual)
        << "  tolerance=" << format_g17(check.tolerance) << "  " << (pass ? "PASS" : "FAIL")
        << note << "\n";
  }
  out << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all_pass ? 0 : 3;
}

int cmd_frame(const SystemConfig& cfg, std::ostream& out) {
  Model model = build_model(cfg);
  if (!model.frame) throw ConfigError("missing [frame] section");
  const GroupFrame& frame = *model.frame;

  Sampler sampler(model, 12);
  out << "pullback of the product metric dt^2 (+) T2 at sample points:\n";
  for (int s = 0; s < 3; ++s) {
    TangentState st = sampler.state();
    out << "  q = " << vec_str(st.q) << "\n"
        << mat_str(group_pullback_closed_form(frame, *model.spatial_g, st.q), "    ");
  }

  out << "inertial force at sample states (tdot = 1):\n";
  double max_force = 0.0;
  for (int s = 0; s < 5; ++s) {
    TangentState st = sampler.state();
    st.qdot[0] = 1.0;
    VectorXd f = inertial_force(frame.frame(), model.g, model.g, st);
    max_force = std::max(max_force, f.lpNorm<Eigen::Infinity>());
    out << "  state q = " << vec_str(st.q) << " qdot = " << vec_str(st.qdot)
        << " -> " << vec_str(f) << "\n";
  }

  FrameClassification c = classify_frame(frame, *model.spatial_g, frame_box(model));
  auto yn = [](bool b) { return b ? "true" : "false"; };
  out << "classification over " << c.samples << " samples:\n";
  out << "  inertial: " << yn(c.inertial)
      << "  (max inertial force " << format_g17(c.max_inertial_force) << ")\n";
  out << "  isometry_group: " << yn(c.isometry_group)
      << "  (max pullback defect " << format_g17(c.max_isometry_defect) << ")\n";
  out << "  preserves_equations: " << yn(c.preserves_equations)
      << "  (max congruence residual " << format_g17(c.max_congruence_residual) << ")\n";
  out << "  cross-check (preserves == inertial and isometry): "
      << (c.theorem_consistent ? "consistent" : "INCONSISTENT") << "\n";
  return 0;
}

}  // namespace cli
