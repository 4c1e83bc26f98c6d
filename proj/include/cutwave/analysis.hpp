#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cutwave/assembly.hpp"

namespace cutwave {

/// ||E u_h - u(t)|| over Omega_h; u_h given by interior coefficients.
double l2_error(const Discretization& d, const Vector& interior_coeffs, const ScalarField& exact, double t);
/// ||grad(E u_h) - grad u(t)|| over Omega_h.
double h1_error(const Discretization& d, const Vector& interior_coeffs, const GradientField& exact_grad, double t);

/// L2 and gradient norms of a full-space P1 field over Omega_h.
double l2_norm_full(const Discretization& d, const Vector& full_coeffs);
double h1_seminorm_full(const Discretization& d, const Vector& full_coeffs);

/// log(e[i-1] / e[i]) / log(h[i-1] / h[i]); +infinity where e[i] == 0.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

struct ErrorRow {
  double h = 0.0;
  double k = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  std::optional<double> eoc_l2;
  std::optional<double> eoc_h1;
  std::optional<double> velocity_l2;
  std::optional<double> energy_drift;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  void add(double h, double k, double l2, double h1);
  /// Header h,k,l2,h1,eoc_l2,eoc_h1 (plus velocity_l2 and energy_drift when
  /// with_extras is set).
  std::string to_csv(bool with_extras = false) const;
};

struct LumpingStudyResult {
  double max_ratio = 0.0;
  double h = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;
};

/// max over random interior pairs of |v^T B w| / (h^2 ||grad E v|| ||grad E w||).
LumpingStudyResult lumping_error_study(const Discretization& d, const SystemMatrices& s, int n_samples,
                                       std::uint64_t seed = 20191001);

struct GraphLaplacianReport {
  double max_row_sum = 0.0;        // relative to max |B_ij|
  double max_asymmetry = 0.0;      // max |B_ij - B_ji|
  int negative_mass_entries = 0;   // off-diagonal M_I entries < 0
  double min_off_diagonal_mass = 0.0;
  double min_lumped_mass = 0.0;
  std::optional<double> min_eigenvalue;  // dense eigensolve, small systems only
  bool passed = false;
};

/// Hard checks: relative row sums <= 1e-12 and exact symmetry.
GraphLaplacianReport graph_laplacian_check(const LumpedMass& lumped, const SparseMatrix& reduced_mass,
                                           int dense_limit = 2500);

struct ExtensionStabilityRow {
  double h = 0.0;
  double max_ratio_l2 = 0.0;
  double max_ratio_h1 = 0.0;
};

/// ||E v||_{T_h} / ||v||_{T_h,I} and the gradient analogue over random
/// interior vectors, norms over whole elements.
ExtensionStabilityRow extension_stability(const Discretization& d, int n_samples, std::uint64_t seed = 20191001);
std::vector<ExtensionStabilityRow> extension_stability_study(const std::vector<const Discretization*>& levels,
                                                             int n_samples, std::uint64_t seed = 20191001);

enum class Region {
  Cut,          // T cap Omega_h over active elements
  WholeActive,  // whole active elements
  WholeLarge,   // whole Large elements
};

/// Gram matrices of the full-space P1 basis over a region.
SparseMatrix region_mass_matrix(const Discretization& d, Region region);
SparseMatrix region_gradient_matrix(const Discretization& d, Region region);

/// Smallest eigenvalue of a symmetric matrix via dense solve.
double dense_min_eigenvalue(const SparseMatrix& m);
double dense_max_eigenvalue(const SparseMatrix& m);

}  // namespace cutwave
