#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cutwave/assembly.hpp"
#include "cutwave/geometry.hpp"
#include "cutwave/solver.hpp"

namespace cutwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Subset of TOML: [section] headers, key = value with quoted strings,
/// numbers, booleans and flat arrays of numbers, # comments.
using TomlValue = std::variant<std::string, double, bool, std::vector<double>>;
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::filesystem::path& path);

enum class Experiment { Converge, Simulate, Poisson, Verify };
std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

enum class PulseKind { Auto, Radial, Plane };

struct RunConfig {
  Experiment experiment = Experiment::Converge;

  std::string domain = "disc";
  DomainParams domain_params;
  std::map<BoundaryPortion, BcType> bc;

  std::optional<double> h;
  std::optional<double> k;
  /// k = alpha h when k is not given.
  std::optional<double> alpha;
  std::optional<double> final_time;
  double gamma = 10.0;
  double c_large = 0.1;
  double safety = 0.9;
  double omega = 0.0;  // 0 selects 2 pi
  int levels = 4;
  std::optional<InitialMode> mode;
  AveragingWeights weights = AveragingWeights::SingleOwner;

  PulseKind pulse = PulseKind::Auto;
  double pulse_width = 0.2;
  double pulse_center = -0.01;
  double pulse_amplitude = 1.0;

  std::vector<double> snapshot_times;
  int log_every = 0;
  int samples = 100;
  int energy_steps = 1000;
  int probe_steps = 500;

  std::filesystem::path out = "out";
  bool write_vtk = true;
  bool write_matrices = false;
  std::uint64_t seed = 20191001;

  DiscretizationParams discretization() const;
  /// Catalog domain with the [bc] overrides applied.
  ImplicitDomain make_domain() const;
};

/// Applies the sections of `table` on top of `base`. Throws ConfigError for
/// unknown keys, wrong types or values.
RunConfig apply_toml(const TomlTable& table, RunConfig base = {});

/// Throws ConfigError unless numeric fields are in range.
void validate(const RunConfig& c);

/// Flat key/value echo for the run manifest.
std::map<std::string, std::string> echo(const RunConfig& c);

}  // namespace cutwave
