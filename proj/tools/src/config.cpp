#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <lagmech/errors.hpp>

#include "gallery.hpp"

namespace cli {

using namespace lagmech;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_number(const std::string& s, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(line, "expected a number, got '" + s + "'");
  return v;
}

std::vector<double> to_numbers(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& tok : split_ws(s)) out.push_back(to_number(tok, line));
  return out;
}

bool to_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  fail(line, "expected true/false, got '" + s + "'");
}

// `g_i_j`, `b_i`, `tau_i`, ... -> 1-based indices after the prefix.
bool indexed_key(const std::string& key, const std::string& prefix, std::vector<int>& idx) {
  if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return false;
  idx.clear();
  std::size_t pos = prefix.size();
  while (pos < key.size()) {
    if (key[pos] != '_') return false;
    ++pos;
    std::size_t start = pos;
    while (pos < key.size() && std::isdigit(static_cast<unsigned char>(key[pos]))) ++pos;
    if (pos == start) return false;
    idx.push_back(std::stoi(key.substr(start, pos - start)));
  }
  return !idx.empty();
}

struct Line {
  std::string key, value;
  bool quoted = false;
  int number = 0;
};

}  // namespace

SystemConfig SystemConfig::parse(const std::string& text) {
  SystemConfig cfg;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  std::string section;
  ConstraintSpec* current_constraint = nullptr;

  auto ensure = [&](bool ok, const std::string& msg) {
    if (!ok) fail(lineno, msg);
  };

  while (std::getline(is, raw)) {
    ++lineno;
    // comments start with '#' outside quotes
    std::string line;
    bool in_quote = false;
    for (char c : raw) {
      if (c == '"') in_quote = !in_quote;
      if (c == '#' && !in_quote) break;
      line += c;
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      ensure(line.back() == ']', "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "constraint") {
        cfg.constraints.emplace_back();
        current_constraint = &cfg.constraints.back();
      } else if (section == "chart" || section == "metric" || section == "force" ||
                 section == "time" || section == "frame" || section == "integration" ||
                 section == "sampling") {
        if (section == "frame" && !cfg.frame) cfg.frame.emplace();
        if (section == "integration" && !cfg.integration) cfg.integration.emplace();
        if (section == "sampling" && !cfg.sampling) cfg.sampling.emplace();
      } else {
        fail(lineno, "unknown section [" + section + "]");
      }
      continue;
    }

    std::size_t eq = line.find('=');
    ensure(eq != std::string::npos, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    ensure(!key.empty() && !value.empty(), "empty key or value");
    if (value.front() == '"') {
      ensure(value.size() >= 2 && value.back() == '"', "unterminated quoted value");
      value = value.substr(1, value.size() - 2);
    }

    std::vector<int> idx;
    auto expr_slot = [&](std::vector<std::string>& v, int i) -> std::string& {
      ensure(i >= 1, "indices are 1-based");
      if (static_cast<int>(v.size()) < i) v.resize(i);
      return v[static_cast<std::size_t>(i - 1)];
    };

    if (section == "chart") {
      if (key == "coords") cfg.coords = split_ws(value);
      else fail(lineno, "unknown key '" + key + "' in [chart]");
    } else if (section == "metric") {
      if (key == "euclidean") cfg.metric_euclidean = to_bool(value, lineno);
      else if (indexed_key(key, "g", idx) && idx.size() == 2) {
        ensure(idx[1] <= idx[0], "metric entries are lower-triangular: use g_i_j with j <= i");
        cfg.metric_entries[{idx[0] - 1, idx[1] - 1}] = value;
      } else fail(lineno, "unknown key '" + key + "' in [metric]");
    } else if (section == "force") {
      if (key == "potential") cfg.potential = value;
      else if (indexed_key(key, "alpha", idx) && idx.size() == 1)
        expr_slot(cfg.alpha_comps, idx[0]) = value;
      else if (indexed_key(key, "force", idx) && idx.size() == 1)
        expr_slot(cfg.force_comps, idx[0]) = value;
      else fail(lineno, "unknown key '" + key + "' in [force]");
    } else if (section == "constraint") {
      ensure(current_constraint != nullptr, "key outside a [constraint] section");
      if (key == "primitive") current_constraint->primitive = value;
      else if (indexed_key(key, "b", idx) && idx.size() == 1)
        expr_slot(current_constraint->comps, idx[0]) = value;
      else fail(lineno, "unknown key '" + key + "' in [constraint]");
    } else if (section == "time") {
      if (key == "exact") {
        ensure(value.size() > 1 && value[0] == 'd', "exact time form must be 'd<coord>'");
        cfg.time_exact_coord = value.substr(1);
      } else if (key == "primitive") cfg.tau_primitive = value;
      else if (indexed_key(key, "tau", idx) && idx.size() == 1)
        expr_slot(cfg.tau_comps, idx[0]) = value;
      else fail(lineno, "unknown key '" + key + "' in [time]");
    } else if (section == "frame") {
      FrameSpec& f = *cfg.frame;
      if (key == "builtin") f.builtin = value;
      else if (key == "rate") f.rate = to_number(value, lineno);
      else if (key == "direction") f.direction = to_numbers(value, lineno);
      else if (indexed_key(key, "map", idx) && idx.size() == 1)
        expr_slot(f.map_exprs, idx[0]) = value;
      else if (indexed_key(key, "inverse", idx) && idx.size() == 1)
        expr_slot(f.inverse_exprs, idx[0]) = value;
      else fail(lineno, "unknown key '" + key + "' in [frame]");
    } else if (section == "integration") {
      IntegrationSpec& g = *cfg.integration;
      if (key == "h") g.h = to_number(value, lineno);
      else if (key == "t_end") g.t_end = to_number(value, lineno);
      else if (key == "q0") g.q0 = to_numbers(value, lineno);
      else if (key == "qdot0") g.qdot0 = to_numbers(value, lineno);
      else if (key == "project_velocity") g.project_velocity = to_bool(value, lineno);
      else if (key.rfind("monitor_", 0) == 0 && key.size() > 8)
        g.monitors.emplace_back(key.substr(8), value);
      else fail(lineno, "unknown key '" + key + "' in [integration]");
    } else if (section == "sampling") {
      SamplingSpec& s = *cfg.sampling;
      if (key == "lo") s.lo = to_numbers(value, lineno);
      else if (key == "hi") s.hi = to_numbers(value, lineno);
      else if (key == "budget") s.budget = static_cast<int>(to_number(value, lineno));
      else if (key == "seed") s.seed = static_cast<unsigned>(to_number(value, lineno));
      else fail(lineno, "unknown key '" + key + "' in [sampling]");
    } else {
      fail(lineno, "key before any section header");
    }
  }

  if (cfg.coords.empty()) throw ConfigError("missing [chart] coords");
  return cfg;
}

std::string SystemConfig::dump() const {
  std::ostringstream os;
  os << "[chart]\ncoords =";
  for (const auto& c : coords) os << ' ' << c;
  os << "\n\n[metric]\n";
  if (metric_euclidean) os << "euclidean = true\n";
  for (const auto& [ij, e] : metric_entries)
    os << "g_" << ij.first + 1 << '_' << ij.second + 1 << " = \"" << e << "\"\n";
  if (!potential.empty() || !alpha_comps.empty() || !force_comps.empty()) {
    os << "\n[force]\n";
    if (!potential.empty()) os << "potential = \"" << potential << "\"\n";
    for (std::size_t i = 0; i < alpha_comps.size(); ++i)
      if (!alpha_comps[i].empty()) os << "alpha_" << i + 1 << " = \"" << alpha_comps[i] << "\"\n";
    for (std::size_t i = 0; i < force_comps.size(); ++i)
      if (!force_comps[i].empty()) os << "force_" << i + 1 << " = \"" << force_comps[i] << "\"\n";
  }
  for (const auto& c : constraints) {
    os << "\n[constraint]\n";
    for (std::size_t i = 0; i < c.comps.size(); ++i)
      if (!c.comps[i].empty()) os << "b_" << i + 1 << " = \"" << c.comps[i] << "\"\n";
    if (!c.primitive.empty()) os << "primitive = \"" << c.primitive << "\"\n";
  }
  if (has_time()) {
    os << "\n[time]\n";
    if (!time_exact_coord.empty()) os << "exact = \"d" << time_exact_coord << "\"\n";
    for (std::size_t i = 0; i < tau_comps.size(); ++i)
      if (!tau_comps[i].empty()) os << "tau_" << i + 1 << " = \"" << tau_comps[i] << "\"\n";
    if (!tau_primitive.empty()) os << "primitive = \"" << tau_primitive << "\"\n";
  }
  if (frame) {
    os << "\n[frame]\n";
    if (!frame->builtin.empty()) os << "builtin = " << frame->builtin << "\n";
    if (!frame->direction.empty()) {
      os << "direction =";
      for (double d : frame->direction) os << ' ' << d;
      os << "\n";
    }
    if (frame->builtin == "rotation" || frame->builtin == "dilatation")
      os << "rate = " << frame->rate << "\n";
    for (std::size_t i = 0; i < frame->map_exprs.size(); ++i)
      if (!frame->map_exprs[i].empty()) os << "map_" << i + 1 << " = \"" << frame->map_exprs[i] << "\"\n";
    for (std::size_t i = 0; i < frame->inverse_exprs.size(); ++i)
      if (!frame->inverse_exprs[i].empty())
        os << "inverse_" << i + 1 << " = \"" << frame->inverse_exprs[i] << "\"\n";
  }
  if (integration) {
    os << "\n[integration]\nh = " << integration->h << "\nt_end = " << integration->t_end << "\n";
    os << "q0 =";
    for (double v : integration->q0) os << ' ' << v;
    os << "\nqdot0 =";
    for (double v : integration->qdot0) os << ' ' << v;
    os << "\n";
    if (integration->project_velocity) os << "project_velocity = true\n";
    for (const auto& [name, e] : integration->monitors)
      os << "monitor_" << name << " = \"" << e << "\"\n";
  }
  if (sampling) {
    os << "\n[sampling]\nlo =";
    for (double v : sampling->lo) os << ' ' << v;
    os << "\nhi =";
    for (double v : sampling->hi) os << ' ' << v;
    os << "\nbudget = " << sampling->budget << "\nseed = " << sampling->seed << "\n";
  }
  return os.str();
}

namespace {

MetricField build_metric(const SystemConfig& cfg, const Chart& chart) {
  if (cfg.metric_euclidean) {
    if (!cfg.metric_entries.empty())
      throw ConfigError("[metric] gives both euclidean = true and explicit entries");
    return MetricField::euclidean(chart);
  }
  int n = chart.dim();
  std::vector<std::vector<Expr>> lower(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    lower[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i) + 1,
                                              Expr::constant(0.0));
  for (const auto& [ij, text] : cfg.metric_entries) {
    auto [i, j] = ij;
    if (i >= n || j > i) throw ConfigError("metric entry g_" + std::to_string(i + 1) + "_" +
                                           std::to_string(j + 1) + " out of range");
    lower[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Expr::parse(text);
  }
  if (cfg.metric_entries.empty()) throw ConfigError("[metric] section is empty");
  return MetricField(chart, std::move(lower));
}

OneForm build_alpha(const SystemConfig& cfg, const Chart& chart, bool& has_potential,
                    Expr& potential) {
  int given = (!cfg.potential.empty()) + (!cfg.alpha_comps.empty()) + (!cfg.force_comps.empty());
  if (given > 1) throw ConfigError("[force] accepts exactly one of potential / alpha_i / force_i");
  if (given == 0) return {};
  int n = chart.dim();
  std::vector<Expr> comps;
  comps.reserve(static_cast<std::size_t>(n));
  if (!cfg.potential.empty()) {
    has_potential = true;
    potential = Expr::parse(cfg.potential);
    for (int i = 0; i < n; ++i) comps.push_back(potential.derivative(chart.coord(i)));
  } else {
    const auto& src = cfg.alpha_comps.empty() ? cfg.force_comps : cfg.alpha_comps;
    bool negate = cfg.alpha_comps.empty();  // classical force is -alpha
    if (static_cast<int>(src.size()) > n) throw ConfigError("[force] has more components than coordinates");
    for (int i = 0; i < n; ++i) {
      std::string text = i < static_cast<int>(src.size()) && !src[static_cast<std::size_t>(i)].empty()
                             ? src[static_cast<std::size_t>(i)]
                             : "0";
      comps.push_back(Expr::parse(negate ? "-(" + text + ")" : text));
    }
  }
  return OneForm(std::move(comps));
}

std::vector<VectorXd> closedness_samples(const SystemConfig& cfg, int n) {
  std::vector<VectorXd> out;
  VectorXd center = VectorXd::Constant(n, 0.5);
  if (cfg.integration && static_cast<int>(cfg.integration->q0.size()) == n)
    for (int i = 0; i < n; ++i) center[i] = cfg.integration->q0[static_cast<std::size_t>(i)];
  out.push_back(center);
  for (int i = 0; i < n; ++i) {
    VectorXd p = center;
    p[i] += 0.25 + 0.05 * i;
    out.push_back(p);
    p[i] -= 0.6;
    out.push_back(p);
  }
  return out;
}

GroupFrame build_frame(const SystemConfig& cfg, const Chart& chart) {
  const FrameSpec& f = *cfg.frame;
  if (chart.coord(0) != "t")
    throw ConfigError("[frame] configs need 't' as the first chart coordinate");
  int m = chart.dim() - 1;
  if (f.builtin == "translation") {
    if (static_cast<int>(f.direction.size()) != m)
      throw ConfigError("translation direction must have one entry per spatial coordinate");
    VectorXd dir(m);
    for (int i = 0; i < m; ++i) dir[i] = f.direction[static_cast<std::size_t>(i)];
    return translation_group(dir);
  }
  if (f.builtin == "rotation" || f.builtin == "dilatation") {
    if (m != 2 || chart.coord(1) != "x" || chart.coord(2) != "y")
      throw ConfigError("builtin " + f.builtin + " frames act on the chart (t, x, y)");
    return f.builtin == "rotation" ? rotation_group(f.rate) : dilatation_group(f.rate);
  }
  if (!f.builtin.empty())
    throw ConfigError("unknown builtin frame '" + f.builtin + "'");
  if (static_cast<int>(f.map_exprs.size()) != chart.dim() ||
      static_cast<int>(f.inverse_exprs.size()) != chart.dim())
    throw ConfigError("[frame] needs map_i and inverse_i for every coordinate");
  std::vector<Expr> fwd, inv;
  for (const auto& s : f.map_exprs) fwd.push_back(Expr::parse(s));
  for (const auto& s : f.inverse_exprs) inv.push_back(Expr::parse(s));
  return GroupFrame(Frame(chart, chart, std::move(fwd), std::move(inv)));
}

}  // namespace

Model build_model(const SystemConfig& cfg) {
  Chart chart(cfg.coords);
  int n = chart.dim();

  std::optional<GroupFrame> frame;
  std::optional<MetricField> spatial_g;
  std::optional<MetricField> g;
  if (cfg.frame) {
    frame = build_frame(cfg, chart);
    std::vector<std::string> spatial(cfg.coords.begin() + 1, cfg.coords.end());
    spatial_g = build_metric(cfg, Chart(spatial));
    g = product_metric(chart, *spatial_g);
  } else {
    g = build_metric(cfg, chart);
  }

  bool has_potential = false;
  Expr potential;
  OneForm alpha = build_alpha(cfg, chart, has_potential, potential);
  MechanicalSystem sys(chart, *g, alpha);

  std::vector<Constraint> constraint_list;
  for (const auto& spec : cfg.constraints) {
    Constraint c;
    if (!spec.primitive.empty()) c.primitive = Expr::parse(spec.primitive);
    if (!spec.comps.empty()) {
      if (static_cast<int>(spec.comps.size()) > n)
        throw ConfigError("[constraint] has more components than coordinates");
      std::vector<Expr> comps;
      for (int i = 0; i < n; ++i)
        comps.push_back(Expr::parse(
            i < static_cast<int>(spec.comps.size()) && !spec.comps[static_cast<std::size_t>(i)].empty()
                ? spec.comps[static_cast<std::size_t>(i)]
                : "0"));
      c.beta = OneForm(std::move(comps));
    } else if (c.primitive) {
      std::vector<Expr> comps;
      for (int i = 0; i < n; ++i) comps.push_back(c.primitive->derivative(chart.coord(i)));
      c.beta = OneForm(std::move(comps));
    } else {
      throw ConfigError("[constraint] needs components b_i or a primitive");
    }
    constraint_list.push_back(std::move(c));
  }
  ConstraintSystem constraints = constraint_list.empty()
                                     ? ConstraintSystem::empty()
                                     : ConstraintSystem(chart, std::move(constraint_list));

  std::optional<TimeForm> tau;
  if (cfg.has_time()) {
    if (!cfg.time_exact_coord.empty()) {
      int i = chart.index(cfg.time_exact_coord);
      if (i < 0) throw ConfigError("time form d" + cfg.time_exact_coord + ": no such coordinate");
      tau = TimeForm::exact(OneForm::coordinate(n, i), Expr::parse(cfg.time_exact_coord));
    } else {
      std::vector<Expr> comps;
      if (static_cast<int>(cfg.tau_comps.size()) > n)
        throw ConfigError("[time] has more components than coordinates");
      for (int i = 0; i < n; ++i)
        comps.push_back(Expr::parse(
            i < static_cast<int>(cfg.tau_comps.size()) && !cfg.tau_comps[static_cast<std::size_t>(i)].empty()
                ? cfg.tau_comps[static_cast<std::size_t>(i)]
                : "0"));
      OneForm form(std::move(comps));
      if (!cfg.tau_primitive.empty())
        tau = TimeForm::exact(std::move(form), Expr::parse(cfg.tau_primitive));
      else {
        auto samples = closedness_samples(cfg, n);
        tau = TimeForm::verified(chart, std::move(form), samples);
      }
    }
  }

  SecondOrderField field;
  if (frame) {
    auto map = std::make_shared<Frame>(frame->frame());
    field = transported_field(map, free_field(sys));
  } else if (tau && constraints.rank() > 0) {
    field = time_dependent_field(sys, TimeDependentConstraints{*tau, constraints});
  } else if (constraints.rank() > 0) {
    field = constrained_field(sys, constraints);
  } else if (tau) {
    field = modified_field(sys, *tau);
  } else {
    field = free_field(sys);
  }

  return Model{std::move(chart), std::move(*g),    std::move(spatial_g), std::move(sys),
               std::move(constraints), std::move(tau), std::move(frame), std::move(field),
               has_potential,          potential,       cfg};
}

std::string load_config_text(const std::string& name_or_path) {
  std::ifstream in(name_or_path);
  if (in) {
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  if (const char* text = gallery_config(name_or_path)) return text;
  throw ConfigError("config '" + name_or_path + "' is neither a readable file nor a bundled name");
}

TangentState parse_state(const std::string& text, int dim) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',' || c == ';') c = ' ';
  std::vector<double> vals;
  for (const auto& tok : split_ws(cleaned)) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ConfigError("state: expected a number, got '" + tok + "'");
    vals.push_back(v);
  }
  if (static_cast<int>(vals.size()) != 2 * dim)
    throw ConfigError("state needs " + std::to_string(2 * dim) + " numbers (q then qdot), got " +
                      std::to_string(vals.size()));
  VectorXd q(dim), qdot(dim);
  for (int i = 0; i < dim; ++i) {
    q[i] = vals[static_cast<std::size_t>(i)];
    qdot[i] = vals[static_cast<std::size_t>(dim + i)];
  }
  return TangentState(std::move(q), std::move(qdot));
}

}  // namespace cli
