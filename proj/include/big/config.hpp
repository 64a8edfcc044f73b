#pragma once

// Flat INI run configuration. Every problem found while reading or
// cross-validating is collected; parse_config throws one ValidationError
// listing all of them.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "big/controller.hpp"
#include "big/errors.hpp"
#include "big/marcher.hpp"
#include "big/model_core.hpp"
#include "big/piston.hpp"

namespace big {

struct GridConfig {
  int n_r = 33;
  int n_theta = 64;
};

struct ScenarioConfig {
  InitialKind kind = InitialKind::displaced_rest;
  InitialOptions options;
};

struct OutputConfig {
  std::string trajectory = "trajectory.csv";
  long snapshot_every = 0;  // 0 disables snapshots
};

struct ConvergenceConfig {
  int base_n_r = 17;
  int base_n_theta = 32;
  int levels = 3;
  double dt_base = 0.04;
  double T_final = 0.2;
};

struct RunConfig {
  PhysicalParams physical;
  Geometry geometry;
  ControllerParams controller;
  GridConfig grid;
  MarchConfig march;
  ScenarioConfig scenario;
  OutputConfig output;
  PistonParams piston;
  ConvergenceConfig convergence;

  Grid make_grid() const { return Grid(grid.n_r, grid.n_theta, geometry.container_radius); }

  /// Cross-validation of all sections.
  std::vector<std::string> violations() const {
    std::vector<std::string> v = physical.violations();
    auto add = [&](const std::vector<std::string>& more) { v.insert(v.end(), more.begin(), more.end()); };
    add(geometry.violations());
    add(validate(controller).violations);
    add(march.violations());
    add(piston.violations());
    if (grid.n_r < 17) v.push_back("[grid] n_r must be at least 17 (got " + std::to_string(grid.n_r) + ")");
    if (grid.n_theta < 32) v.push_back("[grid] n_theta must be at least 32 (got " + std::to_string(grid.n_theta) + ")");
    if (output.snapshot_every < 0) v.push_back("[output] snapshot_every must be non-negative");
    if (output.trajectory.empty()) v.push_back("[output] trajectory file name must not be empty");
    if (convergence.base_n_r < 17 || convergence.base_n_theta < 32)
      v.push_back("[convergence] base grid must be at least 17 x 32");
    if (convergence.levels < 2) v.push_back("[convergence] levels must be at least 2");
    if (!(convergence.dt_base > 0.0)) v.push_back("[convergence] dt_base must be positive");
    if (!(convergence.T_final > 0.0)) v.push_back("[convergence] T_final must be positive");
    if (scenario.options.epsilon < 0.0 || scenario.options.epsilon >= 1.0)
      v.push_back("[scenario] epsilon must lie in [0, 1)");
    return v;
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(const boost::property_tree::ptree& t) : tree_(t) {}

  template <class T>
  void get(const std::string& key, T& out, bool required) {
    seen_.insert(key);
    const auto node = tree_.get_optional<std::string>(key);
    if (!node) {
      if (required) errors_.push_back("missing key '" + key + "'");
      return;
    }
    std::string s = *node;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    if constexpr (std::is_same_v<T, std::string>) {
      out = s;
    } else {
      T value{};
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        errors_.push_back("key '" + key + "': cannot read '" + s + "' as " +
                          (std::is_integral_v<T> ? "an integer" : "a number"));
      else
        out = value;
    }
  }

  void unknown_keys() {
    for (const auto& [section, body] : tree_) {
      if (body.empty()) {
        errors_.push_back("key '" + section + "' outside any section");
        continue;
      }
      for (const auto& [key, _] : body)
        if (!seen_.count(section + "." + key)) errors_.push_back("unknown key '" + section + "." + key + "'");
    }
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  const boost::property_tree::ptree& tree_;
  std::set<std::string> seen_;
  std::vector<std::string> errors_;
};

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError({std::string("malformed config: ") + e.what()});
  }

  RunConfig c;
  detail::Reader r(tree);
  constexpr bool req = true, opt = false;

  r.get("physical.a", c.physical.a, req);
  r.get("physical.gamma", c.physical.gamma, req);
  r.get("physical.mu", c.physical.mu, req);
  r.get("physical.lambda", c.physical.lambda, req);
  r.get("physical.rho_bar", c.physical.rho_bar, req);
  r.get("physical.rho_body", c.physical.rho_body, req);
  r.get("physical.dim", c.physical.dim, opt);

  r.get("geometry.container_radius", c.geometry.container_radius, req);
  r.get("geometry.h1_x", c.geometry.h1.x, req);
  r.get("geometry.h1_y", c.geometry.h1.y, req);
  r.get("geometry.eta", c.geometry.eta, opt);
  c.march.eta = c.geometry.eta;

  r.get("controller.k_d", c.controller.k_d, req);
  r.get("controller.T_I", c.controller.T_I, req);
  std::string ramp = to_string(c.controller.ramp);
  r.get("controller.ramp", ramp, opt);
  try {
    c.controller.ramp = parse_ramp(ramp);
  } catch (const std::exception& e) {
    r.errors().push_back(std::string("controller.ramp: ") + e.what());
  }

  r.get("grid.n_r", c.grid.n_r, req);
  r.get("grid.n_theta", c.grid.n_theta, req);

  r.get("march.dt", c.march.dt, req);
  r.get("march.T_final", c.march.T_final, req);
  r.get("march.picard_tol", c.march.picard_tol, opt);
  r.get("march.picard_max", c.march.picard_max, opt);
  r.get("march.map_distortion_max", c.march.map_distortion_max, opt);
  r.get("march.compat_tol", c.march.compat_tol, opt);
  std::string scheme = "implicit-euler";
  r.get("march.scheme", scheme, opt);
  if (scheme == "implicit-euler")
    c.march.scheme = TimeScheme::implicit_euler;
  else if (scheme == "crank-nicolson")
    c.march.scheme = TimeScheme::crank_nicolson;
  else
    r.errors().push_back("march.scheme: expected implicit-euler or crank-nicolson, got '" + scheme + "'");

  std::string kind = to_string(c.scenario.kind);
  r.get("scenario.kind", kind, opt);
  try {
    c.scenario.kind = parse_initial_kind(kind);
  } catch (const std::exception& e) {
    r.errors().push_back(std::string("scenario.kind: ") + e.what());
  }
  r.get("scenario.epsilon", c.scenario.options.epsilon, opt);
  r.get("scenario.omega0", c.scenario.options.omega0, opt);

  r.get("output.trajectory", c.output.trajectory, opt);
  r.get("output.snapshot_every", c.output.snapshot_every, opt);

  r.get("piston.length", c.piston.length, opt);
  r.get("piston.h1", c.piston.h1, opt);
  r.get("piston.h0", c.piston.h0, opt);
  r.get("piston.mass", c.piston.piston_mass, opt);
  r.get("piston.cells", c.piston.cells, opt);
  r.get("piston.dt", c.piston.dt, opt);
  r.get("piston.T_final", c.piston.T_final, opt);
  r.get("piston.spring_scale", c.piston.spring_scale, opt);

  r.get("convergence.base_n_r", c.convergence.base_n_r, opt);
  r.get("convergence.base_n_theta", c.convergence.base_n_theta, opt);
  r.get("convergence.levels", c.convergence.levels, opt);
  r.get("convergence.dt_base", c.convergence.dt_base, opt);
  r.get("convergence.T_final", c.convergence.T_final, opt);

  r.unknown_keys();
  std::vector<std::string> all = r.errors();
  for (auto& v : c.violations()) all.push_back(v);
  if (!all.empty()) throw ValidationError(all);
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace big
