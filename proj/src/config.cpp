#include "cantilever/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cantilever {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(name() + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback) {
    if (!has(key)) return required(key, fallback);
    const json& v = child(key);
    if (!v.is_number()) throw ConfigError(qualified(key) + ": expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, std::optional<int> fallback) {
    if (!has(key)) return static_cast<int>(required(key, fallback));
    const json& v = child(key);
    if (!v.is_number_integer()) throw ConfigError(qualified(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = child(key);
    if (!v.is_boolean()) throw ConfigError(qualified(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = child(key);
    if (!v.is_string()) throw ConfigError(qualified(key) + ": expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.contains(item.key()))
        throw ConfigError(qualified(item.key()) + ": unrecognized key");
    }
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <typename T>
  double required(const std::string& key, std::optional<T> fallback) {
    if (!fallback) throw ConfigError(qualified(key) + ": required key is missing");
    return static_cast<double>(*fallback);
  }
  std::string name() const { return path_.empty() ? "config" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

void validate(const SimulationConfig& cfg) {
  validate(cfg.beam, cfg.allow_undamped_inertia);
  validate(cfg.integrator);
  if (cfg.n_modes < 1 || cfg.n_modes > kMaxModes)
    throw ConfigError("n_modes: must lie in [1, " + std::to_string(kMaxModes) + "]");
  if (cfg.panels < 1) throw ConfigError("quadrature.panels: must be >= 1");
  if (cfg.points_per_panel < 2 || cfg.points_per_panel > 16)
    throw ConfigError("quadrature.points_per_panel: must lie in [2, 16]");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final))
    throw ConfigError("run.t_final: must be a finite time >= 0");
  if (cfg.record_every < 1) throw ConfigError("run.record_every: must be >= 1");
  if (cfg.snapshot_every < 0) throw ConfigError("run.snapshot_every: must be >= 0");
  if (cfg.snapshot_points < 2) throw ConfigError("run.snapshot_points: must be >= 2");
  for (std::size_t k = 0; k < cfg.initial.size(); ++k) {
    const auto& e = cfg.initial[k];
    if (e.mode < 1 || e.mode > cfg.n_modes) {
      throw ConfigError("initial." + std::to_string(k) + ".mode: mode index " +
                        std::to_string(e.mode) + " outside 1.." + std::to_string(cfg.n_modes));
    }
    if (!std::isfinite(e.q0) || !std::isfinite(e.v0))
      throw ConfigError("initial." + std::to_string(k) + ": values must be finite");
  }
  for (std::size_t k = 0; k < cfg.forcing.profile.size(); ++k) {
    const int mode = cfg.forcing.profile[k].mode;
    if (mode < 1 || mode > cfg.n_modes)
      throw ConfigError("forcing.profile." + std::to_string(k) + ".mode: mode index out of range");
  }
  if (cfg.forcing.kind == ForcingSpec::Kind::harmonic && !(cfg.forcing.omega > 0.0))
    throw ConfigError("forcing.omega: harmonic forcing needs omega > 0");
}

SimulationConfig parse_config(const json& doc) {
  SimulationConfig cfg;
  Section root(doc, "");

  if (!root.has("beam")) throw ConfigError("beam: required key is missing");
  {
    Section beam(root.child("beam"), "beam");
    cfg.beam.D = beam.number("D", 1.0);
    cfg.beam.L = beam.number("L", 1.0);
    cfg.beam.k2 = beam.number("k2", 0.0);
    cfg.beam.sigma = beam.integer("sigma", 1);
    cfg.beam.iota = beam.integer("iota", 0);
    beam.finish();
  }
  cfg.n_modes = root.integer("n_modes", std::nullopt);

  if (root.has("quadrature")) {
    Section quad(root.child("quadrature"), "quadrature");
    cfg.panels = quad.integer("panels", kDefaultPanels);
    cfg.points_per_panel = quad.integer("points_per_panel", kDefaultPointsPerPanel);
    quad.finish();
  }

  if (!root.has("integrator")) throw ConfigError("integrator.dt: required key is missing");
  {
    Section integ(root.child("integrator"), "integrator");
    try {
      cfg.integrator.scheme = scheme_from_string(integ.string("scheme", "implicit-midpoint"));
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    cfg.integrator.dt = integ.number("dt", std::nullopt);
    cfg.integrator.newton_tol = integ.number("newton_tol", 1e-10);
    cfg.integrator.newton_max_iter = integ.integer("newton_max_iter", 25);
    integ.finish();
  }

  if (root.has("initial")) {
    const json& list = root.child("initial");
    if (!list.is_array()) throw ConfigError("initial: expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      Section entry(list[k], "initial." + std::to_string(k));
      InitialEntry e;
      e.mode = entry.integer("mode", std::nullopt);
      e.q0 = entry.number("q0", 0.0);
      e.v0 = entry.number("v0", 0.0);
      entry.finish();
      cfg.initial.push_back(e);
    }
  }

  if (root.has("forcing")) {
    Section forcing(root.child("forcing"), "forcing");
    try {
      cfg.forcing.kind = forcing_kind_from_string(forcing.string("preset", "zero"));
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    cfg.forcing.p0 = forcing.number("p0", 0.0);
    cfg.forcing.omega = forcing.number("omega", 0.0);
    if (forcing.has("profile")) {
      const json& list = forcing.child("profile");
      if (!list.is_array()) throw ConfigError("forcing.profile: expected an array");
      for (std::size_t k = 0; k < list.size(); ++k) {
        Section entry(list[k], "forcing.profile." + std::to_string(k));
        ForcingSpec::ModalEntry e;
        e.mode = entry.integer("mode", std::nullopt);
        e.amplitude = entry.number("amplitude", std::nullopt);
        entry.finish();
        cfg.forcing.profile.push_back(e);
      }
    }
    forcing.finish();
  }

  if (!root.has("run")) throw ConfigError("run.t_final: required key is missing");
  {
    Section run(root.child("run"), "run");
    cfg.t_final = run.number("t_final", std::nullopt);
    cfg.record_every = run.integer("record_every", 1);
    cfg.integrator.blowup_threshold = run.number("blowup_threshold", 1e8);
    cfg.snapshot_every = run.integer("snapshot_every", 0);
    cfg.snapshot_points = run.integer("snapshot_points", 201);
    run.finish();
  }

  if (root.has("seed")) {
    const json& v = root.child("seed");
    if (!v.is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.allow_undamped_inertia = root.boolean("allow_undamped_inertia", false);
  root.finish();

  try {
    validate(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimulationConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

json read_config_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": config parse error: " + e.what());
  }
}

SimulationConfig load_config(const std::filesystem::path& path) {
  const json doc = read_config_json(path);
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const SimulationConfig& cfg) {
  json doc;
  doc["beam"] = {{"D", cfg.beam.D},
                 {"L", cfg.beam.L},
                 {"k2", cfg.beam.k2},
                 {"sigma", cfg.beam.sigma},
                 {"iota", cfg.beam.iota}};
  doc["n_modes"] = cfg.n_modes;
  doc["quadrature"] = {{"panels", cfg.panels}, {"points_per_panel", cfg.points_per_panel}};
  doc["integrator"] = {{"scheme", to_string(cfg.integrator.scheme)},
                       {"dt", cfg.integrator.dt},
                       {"newton_tol", cfg.integrator.newton_tol},
                       {"newton_max_iter", cfg.integrator.newton_max_iter}};
  doc["initial"] = json::array();
  for (const auto& e : cfg.initial)
    doc["initial"].push_back({{"mode", e.mode}, {"q0", e.q0}, {"v0", e.v0}});
  json profile = json::array();
  for (const auto& e : cfg.forcing.profile)
    profile.push_back({{"mode", e.mode}, {"amplitude", e.amplitude}});
  doc["forcing"] = {{"preset", to_string(cfg.forcing.kind)},
                    {"p0", cfg.forcing.p0},
                    {"omega", cfg.forcing.omega},
                    {"profile", profile}};
  doc["run"] = {{"t_final", cfg.t_final},
                {"record_every", cfg.record_every},
                {"blowup_threshold", cfg.integrator.blowup_threshold},
                {"snapshot_every", cfg.snapshot_every},
                {"snapshot_points", cfg.snapshot_points}};
  doc["seed"] = cfg.seed;
  doc["allow_undamped_inertia"] = cfg.allow_undamped_inertia;
  return doc;
}

void set_scalar(json& doc, const std::string& path, double value) {
  json* node = &doc;
  std::stringstream parts(path);
  std::string part;
  std::string leaf;
  while (std::getline(parts, part, '.')) {
    leaf = part;
    if (node->is_object()) {
      if (!node->contains(part)) throw ConfigError(path + ": no such configuration key");
      node = &(*node)[part];
    } else if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw ConfigError(path + ": expected an array index at '" + part + "'");
      }
      if (idx >= node->size()) throw ConfigError(path + ": array index out of range");
      node = &(*node)[idx];
    } else {
      throw ConfigError(path + ": does not address a scalar");
    }
  }
  // The schema decides integer-ness: "q0": 5 in a base document still sweeps over reals.
  static const std::set<std::string> integer_keys = {
      "sigma", "iota", "n_modes", "panels", "points_per_panel", "newton_max_iter",
      "mode", "record_every", "snapshot_every", "snapshot_points"};
  if (!node->is_number()) throw ConfigError(path + ": does not address a numeric scalar");
  if (integer_keys.count(leaf)) {
    if (value != std::floor(value)) throw ConfigError(path + ": expects an integer value");
    *node = static_cast<std::int64_t>(value);
  } else {
    *node = value;
  }
}

}  // namespace cantilever
