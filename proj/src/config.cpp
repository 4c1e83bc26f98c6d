#include "cutwave/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cutwave/io.hpp"

namespace cutwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

/// Strips a trailing comment outside of quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

double parse_number(const std::string& s, int line) {
  std::string clean;
  for (char c : s)
    if (c != '_') clean += c;
  if (clean.empty()) fail(line, "missing value");
  char* end = nullptr;
  const double v = std::strtod(clean.c_str(), &end);
  if (end != clean.c_str() + clean.size() || !std::isfinite(v)) fail(line, "invalid number '" + s + "'");
  return v;
}

TomlValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char c = s[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += s[i];
      }
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    std::vector<double> values;
    std::stringstream items(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      if (trim(item).empty()) continue;
      values.push_back(parse_number(trim(item), line));
    }
    return values;
  }
  return parse_number(s, line);
}

struct Reader {
  const std::map<std::string, TomlValue>& table;
  std::string section;

  const TomlValue* find(const std::string& key) const {
    const auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
  }
  std::string where(const std::string& key) const { return "[" + section + "] " + key; }

  template <class T>
  const T& as(const std::string& key, const char* type) const {
    const T* v = std::get_if<T>(find(key));
    if (!v) throw ConfigError(where(key) + ": expected " + type);
    return *v;
  }
  void number(const std::string& key, double& out) const {
    if (find(key)) out = as<double>(key, "a number");
  }
  void number(const std::string& key, std::optional<double>& out) const {
    if (find(key)) out = as<double>(key, "a number");
  }
  template <class I>
  void integer(const std::string& key, I& out) const {
    if (!find(key)) return;
    const double v = as<double>(key, "an integer");
    if (v != std::floor(v) || v < 0 || v > 9.0e15) throw ConfigError(where(key) + ": expected a non-negative integer");
    out = static_cast<I>(v);
  }
  void string(const std::string& key, std::string& out) const {
    if (find(key)) out = as<std::string>(key, "a string");
  }
  void boolean(const std::string& key, bool& out) const {
    if (find(key)) out = as<bool>(key, "a boolean");
  }
  void array(const std::string& key, std::vector<double>& out) const {
    if (find(key)) out = as<std::vector<double>>(key, "an array of numbers");
  }
};

void check_keys(const std::string& section, const std::map<std::string, TomlValue>& table,
                std::initializer_list<const char*> known) {
  for (const auto& [key, value] : table) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key [" + section + "] " + key);
  }
}

template <class F>
auto rethrow_as_config(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

PulseKind parse_pulse(const std::string& s) {
  if (s == "auto") return PulseKind::Auto;
  if (s == "radial") return PulseKind::Radial;
  if (s == "plane") return PulseKind::Plane;
  throw std::invalid_argument("unknown pulse '" + s + "'");
}

std::string to_string(PulseKind p) {
  switch (p) {
    case PulseKind::Auto: return "auto";
    case PulseKind::Radial: return "radial";
    case PulseKind::Plane: return "plane";
  }
  return "?";
}

AveragingWeights parse_weights(const std::string& s) {
  if (s == "single-owner") return AveragingWeights::SingleOwner;
  if (s == "uniform") return AveragingWeights::Uniform;
  throw std::invalid_argument("unknown weights '" + s + "'");
}

std::string to_string(AveragingWeights w) { return w == AveragingWeights::Uniform ? "uniform" : "single-owner"; }

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable out;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (out.count(section)) fail(line, "duplicate section [" + section + "]");
      out[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) fail(line, "empty key");
    auto& table = out[section];
    if (table.count(key)) fail(line, "duplicate key '" + key + "'");
    table[key] = parse_value(s.substr(eq + 1), line);
  }
  return out;
}

TomlTable parse_toml_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_toml(text.str());
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Converge: return "converge";
    case Experiment::Simulate: return "simulate";
    case Experiment::Poisson: return "poisson";
    case Experiment::Verify: return "verify";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::Converge, Experiment::Simulate, Experiment::Poisson, Experiment::Verify})
    if (to_string(e) == s) return e;
  throw ConfigError("unknown experiment '" + s + "'");
}

DiscretizationParams RunConfig::discretization() const {
  DiscretizationParams p;
  p.gamma = gamma;
  p.c_large = c_large;
  p.weights = weights;
  return p;
}

ImplicitDomain RunConfig::make_domain() const {
  ImplicitDomain d = rethrow_as_config("[domain] name", [&] { return domain_catalog(domain, domain_params); });
  for (const auto& [portion, type] : bc) d.bc_tags[portion] = type;
  return d;
}

RunConfig apply_toml(const TomlTable& table, RunConfig c) {
  for (const auto& [section, values] : table) {
    if (section != "run" && section != "domain" && section != "bc" && section != "output")
      throw ConfigError("unknown section [" + section + "]");
  }
  const std::map<std::string, TomlValue> empty;
  const auto section = [&](const std::string& name) {
    const auto it = table.find(name);
    return Reader{it == table.end() ? empty : it->second, name};
  };

  const Reader run = section("run");
  check_keys("run", run.table,
             {"experiment", "h", "k", "alpha", "T", "gamma", "c_large", "safety", "omega", "levels", "init",
              "weights", "pulse", "pulse_width", "pulse_center", "pulse_amplitude", "snapshot_times", "log_every",
              "samples", "energy_steps", "probe_steps", "seed"});
  std::string text;
  if (run.find("experiment")) {
    run.string("experiment", text);
    c.experiment = parse_experiment(text);
  }
  run.number("h", c.h);
  run.number("k", c.k);
  run.number("alpha", c.alpha);
  run.number("T", c.final_time);
  run.number("gamma", c.gamma);
  run.number("c_large", c.c_large);
  run.number("safety", c.safety);
  run.number("omega", c.omega);
  run.integer("levels", c.levels);
  if (run.find("init")) {
    run.string("init", text);
    c.mode = rethrow_as_config("[run] init", [&] { return parse_initial_mode(text); });
  }
  if (run.find("weights")) {
    run.string("weights", text);
    c.weights = rethrow_as_config("[run] weights", [&] { return parse_weights(text); });
  }
  if (run.find("pulse")) {
    run.string("pulse", text);
    c.pulse = rethrow_as_config("[run] pulse", [&] { return parse_pulse(text); });
  }
  run.number("pulse_width", c.pulse_width);
  run.number("pulse_center", c.pulse_center);
  run.number("pulse_amplitude", c.pulse_amplitude);
  run.array("snapshot_times", c.snapshot_times);
  run.integer("log_every", c.log_every);
  run.integer("samples", c.samples);
  run.integer("energy_steps", c.energy_steps);
  run.integer("probe_steps", c.probe_steps);
  run.integer("seed", c.seed);

  const Reader dom = section("domain");
  check_keys("domain", dom.table, {"name", "radius", "cut_x", "boundary"});
  dom.string("name", c.domain);
  dom.number("radius", c.domain_params.radius);
  dom.number("cut_x", c.domain_params.cut_x);
  if (dom.find("boundary")) {
    dom.string("boundary", text);
    c.domain_params.boundary = rethrow_as_config("[domain] boundary", [&] { return parse_bc_type(text); });
  }

  const Reader bc = section("bc");
  for (const auto& [key, value] : bc.table) {
    const BoundaryPortion portion = rethrow_as_config("[bc] " + key, [&] { return parse_boundary_portion(key); });
    const std::string type = bc.as<std::string>(key, "a string");
    c.bc[portion] = rethrow_as_config("[bc] " + key, [&] { return parse_bc_type(type); });
  }

  const Reader out = section("output");
  check_keys("output", out.table, {"dir", "vtk", "matrices"});
  if (out.find("dir")) {
    out.string("dir", text);
    c.out = text;
  }
  out.boolean("vtk", c.write_vtk);
  out.boolean("matrices", c.write_matrices);
  return c;
}

void validate(const RunConfig& c) {
  const auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  if (c.h) positive("h", *c.h);
  if (c.k) positive("k", *c.k);
  if (c.alpha) positive("alpha", *c.alpha);
  if (c.final_time) positive("T", *c.final_time);
  positive("gamma", c.gamma);
  positive("c_large", c.c_large);
  if (c.c_large >= 0.25) throw ConfigError("c_large must be below 0.25");
  positive("safety", c.safety);
  if (c.omega < 0.0) throw ConfigError("omega must be non-negative");
  if (c.levels < 1) throw ConfigError("levels must be at least 1");
  if (c.levels > 8) throw ConfigError("levels must be at most 8");
  positive("pulse_width", c.pulse_width);
  if (c.samples < 1) throw ConfigError("samples must be at least 1");
  if (c.energy_steps < 1 || c.probe_steps < 1) throw ConfigError("step counts must be at least 1");
  positive("domain radius", c.domain_params.radius);
  for (double t : c.snapshot_times)
    if (t < 0.0) throw ConfigError("snapshot times must be non-negative");
  if (c.final_time)
    for (double t : c.snapshot_times)
      if (t > *c.final_time + 1e-12) throw ConfigError("snapshot time beyond T");
  if (c.out.empty()) throw ConfigError("output directory must not be empty");
  const ImplicitDomain d = c.make_domain();
  const BackgroundMesh coarse = build_structured_mesh(d.box, 0.1 * std::min(d.box.width(), d.box.height()));
  rethrow_as_config("[bc]", [&] {
    validate_domain(d, coarse);
    return 0;
  });
}

std::map<std::string, std::string> echo(const RunConfig& c) {
  std::map<std::string, std::string> m;
  const auto opt = [](const std::optional<double>& v) { return v ? io::format_exact(*v) : std::string("default"); };
  m["experiment"] = to_string(c.experiment);
  m["domain"] = c.domain;
  m["domain.radius"] = io::format_exact(c.domain_params.radius);
  m["domain.cut_x"] = io::format_exact(c.domain_params.cut_x);
  m["domain.boundary"] = to_string(c.domain_params.boundary);
  for (const auto& [portion, type] : c.bc) m["bc." + to_string(portion)] = to_string(type);
  m["h"] = opt(c.h);
  m["k"] = opt(c.k);
  m["alpha"] = opt(c.alpha);
  m["T"] = opt(c.final_time);
  m["gamma"] = io::format_exact(c.gamma);
  m["c_large"] = io::format_exact(c.c_large);
  m["safety"] = io::format_exact(c.safety);
  m["omega"] = io::format_exact(c.omega);
  m["levels"] = std::to_string(c.levels);
  m["init"] = c.mode ? to_string(*c.mode) : "default";
  m["weights"] = to_string(c.weights);
  m["pulse"] = to_string(c.pulse);
  m["pulse_width"] = io::format_exact(c.pulse_width);
  m["pulse_center"] = io::format_exact(c.pulse_center);
  m["pulse_amplitude"] = io::format_exact(c.pulse_amplitude);
  std::string times;
  for (double t : c.snapshot_times) times += (times.empty() ? "" : ",") + io::format_exact(t);
  m["snapshot_times"] = times;
  m["log_every"] = std::to_string(c.log_every);
  m["samples"] = std::to_string(c.samples);
  m["energy_steps"] = std::to_string(c.energy_steps);
  m["probe_steps"] = std::to_string(c.probe_steps);
  m["out"] = c.out.generic_string();
  m["vtk"] = c.write_vtk ? "true" : "false";
  m["matrices"] = c.write_matrices ? "true" : "false";
  m["seed"] = std::to_string(c.seed);
  return m;
}

}  // namespace cutwave
