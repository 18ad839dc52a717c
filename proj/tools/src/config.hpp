#ifndef TOOLS_CONFIG_HPP
#define TOOLS_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <lagmech/frames.hpp>
#include <lagmech/integrate.hpp>
#include <lagmech/timeconstraint.hpp>

namespace cli {

using lagmech::VectorXd;

struct ConstraintSpec {
  std::vector<std::string> comps;  // empty when derived from the primitive
  std::string primitive;           // empty => nonholonomic
};

struct FrameSpec {
  std::string builtin;  // translation | rotation | dilatation | "" (explicit map)
  std::vector<double> direction;
  double rate = 1.0;
  std::vector<std::string> map_exprs, inverse_exprs;
};

struct IntegrationSpec {
  double h = 0.0;
  double t_end = 0.0;
  std::vector<double> q0, qdot0;
  bool project_velocity = false;
  std::vector<std::pair<std::string, std::string>> monitors;  // (name, expression)
};

struct SamplingSpec {
  std::vector<double> lo, hi;
  int budget = 64;
  unsigned seed = 20240915;
};

// Parsed form of the sectioned key=value config format. Unknown sections or
// keys are rejected with the offending line number.
struct SystemConfig {
  std::vector<std::string> coords;
  bool metric_euclidean = false;
  std::map<std::pair<int, int>, std::string> metric_entries;  // 0-based, j <= i
  std::string potential;
  std::vector<std::string> alpha_comps;
  std::vector<std::string> force_comps;
  std::vector<ConstraintSpec> constraints;
  std::string time_exact_coord;  // set by `exact = "d<coord>"`
  std::vector<std::string> tau_comps;
  std::string tau_primitive;
  std::optional<FrameSpec> frame;
  std::optional<IntegrationSpec> integration;
  std::optional<SamplingSpec> sampling;

  bool has_time() const { return !time_exact_coord.empty() || !tau_comps.empty(); }

  static SystemConfig parse(const std::string& text);
  std::string dump() const;
};

// Everything instantiated from a config: evaluators plus the selected field.
struct Model {
  lagmech::Chart chart;            // full chart as listed in the config
  lagmech::MetricField g;          // metric on the full chart (product when framed)
  std::optional<lagmech::MetricField> spatial_g;  // metric on M when framed
  lagmech::MechanicalSystem sys;
  lagmech::ConstraintSystem constraints;
  std::optional<lagmech::TimeForm> tau;
  std::optional<lagmech::GroupFrame> frame;
  lagmech::SecondOrderField main_field;
  bool has_potential = false;
  lagmech::Expr potential;  // valid only when has_potential

  const SystemConfig config;
};

Model build_model(const SystemConfig& cfg);

// Resolve --config: an existing file path, else a bundled gallery name.
std::string load_config_text(const std::string& name_or_path);

// q then qdot, separated by whitespace, commas, or an optional ';'.
lagmech::TangentState parse_state(const std::string& text, int dim);

}  // namespace cli

#endif
