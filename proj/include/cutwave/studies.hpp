#pragma once

// Refinement studies and invariant checks shared by the CLI and the
// acceptance suite. Functions measure; callers compare against thresholds.

#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "cutwave/analysis.hpp"
#include "cutwave/solver.hpp"

namespace cutwave {

/// Initial disc resolution and step of the manufactured-solution runs.
inline constexpr double kDiscInitialH = 2.69e-2;
inline constexpr double kDiscInitialK = std::numbers::pi / 2000.0;
/// Default k / h coupling.
inline constexpr double kStepCoupling = kDiscInitialK / kDiscInitialH;

struct Level {
  std::shared_ptr<const BackgroundMesh> mesh;
  std::shared_ptr<Discretization> disc;
  SystemMatrices system;
};

Level make_level(const ImplicitDomain& domain, double target_h, const DiscretizationParams& params = {});

struct WaveStudyParams {
  double h0 = kDiscInitialH;
  double k0 = kDiscInitialK;
  double final_time = 1.0;
  double omega = 2.0 * std::numbers::pi;
  int levels = 4;
  InitialMode mode = InitialMode::InterpolateExact;
  DiscretizationParams disc;
  double safety = 0.9;
};

struct WaveStudy {
  ErrorReport report;
  std::vector<CflEstimate> cfl;
  std::vector<int> steps;
};

/// Disc manufactured solution with weak Dirichlet conditions; level l uses
/// h0 / 2^l and N_0 2^l steps with N_0 = round(T / k0).
WaveStudy wave_convergence_study(const WaveStudyParams& p);

struct PoissonStudy {
  ErrorReport poisson;
  ErrorReport ritz;
  std::vector<int> cg_iterations;
};

PoissonStudy poisson_convergence_study(double h0 = kDiscInitialH, int levels = 4, const DiscretizationParams& p = {});

struct EnergyCheck {
  double k = 0.0;
  double k_max = 0.0;
  double max_drift = 0.0;
  double reversal_error = 0.0;  // ||recovered u^0 - u^0|| / ||u^0||
  int steps = 0;
};

/// f = 0, random data, k = factor * k_max.
EnergyCheck energy_conservation_check(const Discretization& d, const SystemMatrices& s, int steps = 1000,
                                      double factor = 0.9, std::uint64_t seed = 20191001);

struct CflProbe {
  double k_max = 0.0;
  double c = 0.0;
  double growth_unstable = 0.0;  // max ||u^n|| / ||u^0||
  double growth_stable = 0.0;
  bool unstable_detected = false;  // growth >= 10 or non-finite
  int detected_at = -1;
};

CflProbe cfl_probe(const Discretization& d, const SystemMatrices& s, int steps = 500, double unstable_factor = 1.05,
                   double stable_factor = 0.9, std::uint64_t seed = 20191001);

struct ExtensionCheck {
  double affine_error = 0.0;  // max over active nodes
  double ones_error = 0.0;    // max |E 1 - 1|
  int exterior_rows_not_three = 0;
};

ExtensionCheck extension_correctness(const Discretization& d);

}  // namespace cutwave
