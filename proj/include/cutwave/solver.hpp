#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cutwave/analysis.hpp"
#include "cutwave/assembly.hpp"
#include "cutwave/kernels.hpp"

namespace cutwave {

/// NaN/Inf or unbounded growth in the explicit update.
class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(int step)
      : std::runtime_error("blow-up (CFL violated?) at step " + std::to_string(step)), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// [0, T] split into N steps of length k = T / N.
struct TimeGrid {
  double final_time = 1.0;
  int steps = 2;

  TimeGrid(double final_time, int steps);
  double k() const { return final_time / steps; }
  double time(int n) const { return n * k(); }
  /// Smallest N with T / N <= k_target.
  static TimeGrid with_max_step(double final_time, double k_target);
  /// N = round(T / k_target).
  static TimeGrid nearest_step(double final_time, double k_target);
};

/// Levels n-1 and n of the interior coefficient vectors.
struct WaveState {
  Vector prev;
  Vector curr;
  int n = 1;
  double k = 0.0;

  double t() const { return n * k; }
};

/// Everything one explicit update needs: A_I in CSR form, 1 / m_L, and the
/// strong Dirichlet constraints.
class LeapfrogOperator {
 public:
  LeapfrogOperator(const SparseMatrix& stiffness, const Vector& lumped_mass, std::vector<int> constrained = {});

  int size() const { return static_cast<int>(inv_mass_.size()); }
  const CsrView& csr() const { return csr_; }
  const Vector& inv_mass() const { return inv_mass_; }
  const Vector& mass() const { return mass_; }
  const std::vector<int>& constrained() const { return constrained_; }
  const SparseMatrix& stiffness() const { return *stiffness_; }

  /// a_h(v, w) = v^T A_I w.
  double energy_form(const Vector& v, const Vector& w) const;
  /// ||v||_L^2.
  double lumped_norm2(const Vector& v) const;
  void apply_constraints(Vector& v, const Vector* values) const;

 private:
  const SparseMatrix* stiffness_;
  CsrView csr_;
  Vector mass_;
  Vector inv_mass_;
  std::vector<int> constrained_;
};

/// u^{n+1} = 2u^n - u^{n-1} - k^2 M_L^{-1} (A_I u^n) + k^2 f^n, then
/// constrained entries set to `boundary_values` (zero when null). Throws
/// BlowUpError on a non-finite result.
void leapfrog_step(WaveState& state, const LeapfrogOperator& op, const Vector* forcing = nullptr,
                   const Vector* boundary_values = nullptr);

/// Runs the recursion backwards by one level.
void leapfrog_reverse_step(WaveState& state, const LeapfrogOperator& op, const Vector* forcing = nullptr);

/// ||(u^{n} - u^{n-1}) / k||_L^2 + a_h(u^{n-1}, u^{n}): the conserved quantity
/// for f = 0 at level n - 1.
double discrete_energy(const WaveState& state, const LeapfrogOperator& op);

struct CflEstimate {
  double lambda_max = 0.0;  // of M_L^{-1} A_I
  double k_max = 0.0;       // 2 / sqrt(lambda_max)
  double c = 0.0;           // k_max / h
  int iterations = 0;
};

/// Largest eigenvalue of M_L^{-1} A_I (restricted to unconstrained entries)
/// by Lanczos on the symmetrized operator. Throws ConvergenceError with the
/// best estimate as residual() if the iteration cap is reached.
CflEstimate cfl_estimate(const SparseMatrix& stiffness, const Vector& lumped_mass, double h,
                         const std::vector<int>& constrained = {}, double tol = 1e-8, int max_iters = 3000);

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Constrained entries are held at
/// their values in x0 (zero when x0 is null). Throws ConvergenceError.
CgResult cg_solve(const SparseMatrix& a, const Vector& rhs, double tol = 1e-10, int max_iters = 100000,
                  const std::vector<int>& constrained = {}, const Vector* x0 = nullptr);

/// Right-hand side r_i = a_h(v, E_h phi_i) by cut quadrature with the exact
/// v and grad v at time t.
Vector ritz_rhs(const Discretization& d, const ScalarField& v, const GradientField& grad_v, double t);

/// R_h v(t).
CgResult ritz_project(const Discretization& d, const SystemMatrices& s, const ScalarField& v,
                      const GradientField& grad_v, double t = 0.0, double tol = 1e-10);

/// Poisson problem -Lap u = f with the boundary conditions of the domain
/// (homogeneous data); load (f, E_h phi_i).
CgResult poisson_solve(const Discretization& d, const SystemMatrices& s, const ScalarField& f, double tol = 1e-10);

enum class InitialMode { InterpolateExact, Taylor, Ritz };

std::string to_string(InitialMode m);
InitialMode parse_initial_mode(const std::string& s);

struct InitialData {
  /// u(x, t); interpolate-exact samples it at t0 and t1, taylor and ritz use t0.
  ScalarField u;
  GradientField grad_u;
  ScalarField velocity;
  ScalarField forcing;
};

std::pair<Vector, Vector> initialize(const InitialData& data, InitialMode mode, const TimeGrid& grid,
                                     const Discretization& d, const SystemMatrices& s);

struct SimulationConfig {
  TimeGrid grid{1.0, 2};
  InitialMode mode = InitialMode::Taylor;
  InitialData data;
  /// For error norms; optional.
  ScalarField exact;
  GradientField exact_grad;
  /// k <= safety * k_max is required; safety <= 0 skips the check.
  double safety = 0.9;
  std::vector<double> snapshot_times;
  /// Energy (and error, if exact is set) logged every this many steps; 0 = never.
  int log_every = 0;
  /// Stop with BlowUpError if ||u^n|| exceeds growth_limit * max(||u^0||, ||u^1||).
  std::optional<double> growth_limit;
};

struct LogRow {
  int n = 0;
  double t = 0.0;
  double energy = 0.0;
  std::optional<double> l2;
  std::optional<double> h1;
};

struct SimulationResult {
  WaveState state;
  CflEstimate cfl;
  std::vector<LogRow> log;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_relative_energy_drift = 0.0;
  std::optional<double> l2_error;
  std::optional<double> h1_error;
  std::optional<double> velocity_l2_error;
  int snapshots_written = 0;
};

using SnapshotCallback = std::function<void(int n, double t, const Vector& interior_values)>;

/// Steps n = 1 .. N-1. Snapshots are taken at the level nearest each
/// requested time.
SimulationResult run_simulation(const Discretization& d, const SystemMatrices& s, const SimulationConfig& config,
                                const SnapshotCallback& on_snapshot = {});

}  // namespace cutwave
