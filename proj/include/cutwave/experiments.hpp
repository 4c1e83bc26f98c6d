#pragma once

#include <iosfwd>

#include "cutwave/config.hpp"

namespace cutwave {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitAcceptance = 1, kExitConfig = 2, kExitBlowUp = 3 };

/// Each command writes its tables, snapshots and manifest.json under
/// config.out and a human-readable summary to `log`. Returns kExitOk or
/// kExitAcceptance; configuration problems throw ConfigError and blow-up
/// throws BlowUpError.
int cmd_converge(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_poisson(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);

int run_experiment(const RunConfig& config, std::ostream& log);

/// Pass thresholds of the refinement studies.
inline constexpr double kWaveMinEocL2 = 1.8;
inline constexpr double kWaveMinEocH1 = 0.85;
inline constexpr double kPoissonMinEocL2 = 1.8;
inline constexpr double kPoissonMinEocH1 = 0.9;
inline constexpr double kMaxGrowthPerLevel = 1.5;
inline constexpr double kMaxLumpingGrowth = 1.5;
inline constexpr double kMaxRowSum = 1e-12;
inline constexpr double kMaxEnergyDrift = 1e-9;
inline constexpr double kMaxReversalError = 1e-9;
inline constexpr double kMaxAffineError = 1e-13;
inline constexpr double kMaxOnesError = 1e-14;

/// Simulate defaults of the pulse experiments for a catalog domain.
struct PulseDefaults {
  double h;
  double k;
  double final_time;
  std::vector<double> snapshot_times;
};
PulseDefaults pulse_defaults(const std::string& domain, double pulse_width);

}  // namespace cutwave
