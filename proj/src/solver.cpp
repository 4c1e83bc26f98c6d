#include "cutwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace cutwave {

TimeGrid::TimeGrid(double T, int N) : final_time(T), steps(N) {
  if (!(T > 0.0)) throw std::invalid_argument("final time must be positive");
  if (N < 2) throw std::invalid_argument("time grid needs at least 2 steps");
}

TimeGrid TimeGrid::with_max_step(double T, double k_target) {
  if (!(k_target > 0.0)) throw std::invalid_argument("time step must be positive");
  return TimeGrid(T, std::max(2, static_cast<int>(std::ceil(T / k_target - 1e-9))));
}

TimeGrid TimeGrid::nearest_step(double T, double k_target) {
  if (!(k_target > 0.0)) throw std::invalid_argument("time step must be positive");
  return TimeGrid(T, std::max(2, static_cast<int>(std::lround(T / k_target))));
}

LeapfrogOperator::LeapfrogOperator(const SparseMatrix& stiffness, const Vector& lumped_mass,
                                   std::vector<int> constrained)
    : stiffness_(&stiffness), csr_(csr_view(stiffness)), mass_(lumped_mass), constrained_(std::move(constrained)) {
  if (stiffness.rows() != lumped_mass.size() || stiffness.cols() != lumped_mass.size())
    throw std::invalid_argument("leapfrog: dimension mismatch");
  if ((lumped_mass.array() <= 0.0).any()) throw std::invalid_argument("leapfrog: lumped mass must be positive");
  inv_mass_ = lumped_mass.cwiseInverse();
}

double LeapfrogOperator::energy_form(const Vector& v, const Vector& w) const {
  Vector aw(w.size());
  spmv(csr_, as_span(w), as_span(aw));
  return dot(as_span(v), as_span(aw));
}

double LeapfrogOperator::lumped_norm2(const Vector& v) const {
  const Vector mv = mass_.cwiseProduct(v);
  return dot(as_span(v), as_span(mv));
}

void LeapfrogOperator::apply_constraints(Vector& v, const Vector* values) const {
  for (int i : constrained_) v[i] = values ? (*values)[i] : 0.0;
}

namespace {

void check_finite(const Vector& v, int step) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw BlowUpError(step);
}

std::span<const double> forcing_span(const Vector* forcing) {
  return forcing ? as_span(*forcing) : std::span<const double>{};
}

}  // namespace

void leapfrog_step(WaveState& state, const LeapfrogOperator& op, const Vector* forcing, const Vector* boundary_values) {
  Vector next(op.size());
  leapfrog_update(op.csr(), as_span(op.inv_mass()), state.k * state.k, as_span(state.prev), as_span(state.curr),
                  forcing_span(forcing), as_span(next));
  op.apply_constraints(next, boundary_values);
  check_finite(next, state.n + 1);
  state.prev = std::move(state.curr);
  state.curr = std::move(next);
  ++state.n;
}

void leapfrog_reverse_step(WaveState& state, const LeapfrogOperator& op, const Vector* forcing) {
  // u^{n-2} = 2 u^{n-1} - u^n - k^2 M_L^{-1} A u^{n-1} + k^2 f^{n-1}
  Vector earlier(op.size());
  leapfrog_update(op.csr(), as_span(op.inv_mass()), state.k * state.k, as_span(state.curr), as_span(state.prev),
                  forcing_span(forcing), as_span(earlier));
  op.apply_constraints(earlier, nullptr);
  check_finite(earlier, state.n - 2);
  state.curr = std::move(state.prev);
  state.prev = std::move(earlier);
  --state.n;
}

double discrete_energy(const WaveState& state, const LeapfrogOperator& op) {
  const Vector dv = (state.curr - state.prev) / state.k;
  return op.lumped_norm2(dv) + op.energy_form(state.prev, state.curr);
}

CflEstimate cfl_estimate(const SparseMatrix& stiffness, const Vector& lumped_mass, double h,
                         const std::vector<int>& constrained, double tol, int max_iters) {
  const auto n = static_cast<int>(lumped_mass.size());
  if (stiffness.rows() != n || stiffness.cols() != n) throw std::invalid_argument("cfl_estimate: dimension mismatch");
  const Vector scale = lumped_mass.cwiseSqrt().cwiseInverse();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int i : constrained) fixed[static_cast<std::size_t>(i)] = 1;
  const CsrView a = csr_view(stiffness);

  const auto apply = [&](const Vector& x, Vector& y) {
    Vector sx = scale.cwiseProduct(x);
    for (int i : constrained) sx[i] = 0.0;
    spmv(a, as_span(sx), as_span(y));
    y = scale.cwiseProduct(y);
    for (int i : constrained) y[i] = 0.0;
  };

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector q(n);
  for (int i = 0; i < n; ++i) q[i] = fixed[static_cast<std::size_t>(i)] ? 0.0 : dist(rng);
  q /= q.norm();
  Vector q_prev = Vector::Zero(n);
  Vector w(n);
  std::vector<double> alpha, beta;
  double beta_prev = 0.0;
  double best = 0.0;
  const int cap = std::min(max_iters, n);
  for (int j = 0; j < cap; ++j) {
    apply(q, w);
    w -= beta_prev * q_prev;
    const double aj = q.dot(w);
    w -= aj * q;
    const double bj = w.norm();
    alpha.push_back(aj);

    const bool check = (j + 1) % 10 == 0 || bj == 0.0 || j + 1 == cap;
    if (check) {
      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd(0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()[m - 1];
      const double residual = bj * std::abs(tri.eigenvectors()(m - 1, m - 1));
      best = theta;
      if (residual <= tol * std::abs(theta) || bj == 0.0 || m == n) {
        CflEstimate est;
        est.lambda_max = theta;
        est.k_max = 2.0 / std::sqrt(theta);
        est.c = est.k_max / h;
        est.iterations = j + 1;
        return est;
      }
    }
    beta.push_back(bj);
    q_prev = q;
    q = w / bj;
    beta_prev = bj;
  }
  throw ConvergenceError("cfl_estimate: Lanczos did not converge (best lambda_max estimate " + std::to_string(best) +
                             ")",
                         best);
}

CgResult cg_solve(const SparseMatrix& a, const Vector& rhs, double tol, int max_iters,
                  const std::vector<int>& constrained, const Vector* x0) {
  const auto n = rhs.size();
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument("cg_solve: dimension mismatch");
  const CsrView csr = csr_view(a);
  CgResult result;
  result.x = x0 ? *x0 : Vector::Zero(n);
  const auto mask = [&](Vector& v) {
    for (int i : constrained) v[i] = 0.0;
  };
  Vector inv_diag = a.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) inv_diag[i] = inv_diag[i] > 0.0 ? 1.0 / inv_diag[i] : 1.0;

  Vector ax(n);
  spmv(csr, as_span(result.x), as_span(ax));
  Vector r = rhs - ax;
  mask(r);
  const double r0 = r.norm();
  Vector b_free = rhs;
  mask(b_free);
  const double ref = std::max(b_free.norm(), r0);
  if (ref == 0.0) return result;

  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  Vector ap(n);
  double rz = dot(as_span(r), as_span(z));
  for (int it = 1; it <= max_iters; ++it) {
    spmv(csr, as_span(p), as_span(ap));
    mask(ap);
    const double pap = dot(as_span(p), as_span(ap));
    if (!(pap > 0.0)) throw ConvergenceError("cg_solve: operator is not positive definite", r.norm() / ref);
    const double step = rz / pap;
    result.x += step * p;
    r -= step * ap;
    const double rel = r.norm() / ref;
    result.iterations = it;
    result.relative_residual = rel;
    if (rel <= tol) return result;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = dot(as_span(r), as_span(z));
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw ConvergenceError("cg_solve: no convergence after " + std::to_string(max_iters) +
                             " iterations (relative residual " + std::to_string(result.relative_residual) + ")",
                         result.relative_residual);
}

Vector ritz_rhs(const Discretization& d, const ScalarField& v, const GradientField& grad_v, double t) {
  constexpr int degree = 5;
  const double penalty = d.params.gamma / d.h();
  Vector full = Vector::Zero(d.num_full());
  for (int e : d.cls.active) {
    const P1Element fe(d.mesh->element_coords(e));
    const auto dofs = d.element_dofs(e);
    const auto vol = d.volume_rule(e, degree);
    for (std::size_t q = 0; q < vol.size(); ++q) {
      const Point2 g = grad_v(vol.points[q], t);
      for (std::size_t a = 0; a < 3; ++a) full[dofs[a]] += vol.weights[q] * dot(g, fe.grads[a]);
    }
    const auto bdry = d.nitsche_rule(e, degree);
    for (std::size_t q = 0; q < bdry.size(); ++q) {
      const Point2 n = bdry.normals[q];
      const double vq = v(bdry.points[q], t);
      const double dnv = dot(grad_v(bdry.points[q], t), n);
      const auto phi = fe.values(bdry.points[q]);
      for (std::size_t a = 0; a < 3; ++a)
        full[dofs[a]] += bdry.weights[q] * (-dnv * phi[a] - vq * dot(fe.grads[a], n) + penalty * vq * phi[a]);
    }
  }
  return reduce(d.ext, full);
}

CgResult ritz_project(const Discretization& d, const SystemMatrices& s, const ScalarField& v,
                      const GradientField& grad_v, double t, double tol) {
  const Vector rhs = ritz_rhs(d, v, grad_v, t);
  return cg_solve(s.stiffness, rhs, tol, 100000, d.strong_dirichlet);
}

CgResult poisson_solve(const Discretization& d, const SystemMatrices& s, const ScalarField& f, double tol) {
  const Vector rhs = reduce(d.ext, assemble_load(d, f, 0.0));
  return cg_solve(s.stiffness, rhs, tol, 100000, d.strong_dirichlet);
}

std::string to_string(InitialMode m) {
  switch (m) {
    case InitialMode::InterpolateExact: return "interpolate-exact";
    case InitialMode::Taylor: return "taylor";
    case InitialMode::Ritz: return "ritz";
  }
  return "?";
}

InitialMode parse_initial_mode(const std::string& s) {
  for (auto m : {InitialMode::InterpolateExact, InitialMode::Taylor, InitialMode::Ritz})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown initial-data mode '" + s + "'");
}

std::pair<Vector, Vector> initialize(const InitialData& data, InitialMode mode, const TimeGrid& grid,
                                     const Discretization& d, const SystemMatrices& s) {
  if (!data.u) throw std::invalid_argument("initial data: u is required");
  const double k = grid.k();
  Vector u0, u1;
  switch (mode) {
    case InitialMode::InterpolateExact:
      u0 = interior_nodal_values(d, data.u, 0.0);
      u1 = interior_nodal_values(d, data.u, k);
      break;
    case InitialMode::Taylor: {
      u0 = interior_nodal_values(d, data.u, 0.0);
      Vector accel = -(s.stiffness * u0).cwiseQuotient(s.lumped.diagonal);
      if (data.forcing) accel += interior_nodal_values(d, data.forcing, 0.0);
      u1 = u0 + 0.5 * k * k * accel;
      if (data.velocity) u1 += k * interior_nodal_values(d, data.velocity, 0.0);
      break;
    }
    case InitialMode::Ritz:
      if (!data.grad_u) throw std::invalid_argument("initial data: ritz mode needs grad u");
      u0 = ritz_project(d, s, data.u, data.grad_u, 0.0).x;
      u1 = ritz_project(d, s, data.u, data.grad_u, k).x;
      break;
  }
  for (int i : d.strong_dirichlet) u0[i] = u1[i] = 0.0;
  return {std::move(u0), std::move(u1)};
}

SimulationResult run_simulation(const Discretization& d, const SystemMatrices& s, const SimulationConfig& config,
                                const SnapshotCallback& on_snapshot) {
  const TimeGrid& grid = config.grid;
  const double k = grid.k();
  const LeapfrogOperator op(s.stiffness, s.lumped.diagonal, d.strong_dirichlet);

  SimulationResult result;
  result.cfl = cfl_estimate(s.stiffness, s.lumped.diagonal, d.h(), d.strong_dirichlet);
  if (config.safety > 0.0 && k > config.safety * result.cfl.k_max)
    throw std::invalid_argument("time step " + std::to_string(k) + " exceeds " + std::to_string(config.safety) +
                                " * k_max = " + std::to_string(config.safety * result.cfl.k_max));

  std::vector<int> snapshot_levels;
  for (double t : config.snapshot_times) {
    if (t < 0.0 || t > grid.final_time * (1.0 + 1e-12))
      throw std::invalid_argument("snapshot time outside [0, T]");
    snapshot_levels.push_back(std::clamp(static_cast<int>(std::lround(t / k)), 0, grid.steps));
  }
  const auto snapshot = [&](int n, const Vector& u) {
    if (!on_snapshot) return;
    const auto count = std::count(snapshot_levels.begin(), snapshot_levels.end(), n);
    if (count == 0) return;
    on_snapshot(n, grid.time(n), u);
    ++result.snapshots_written;
  };

  auto [u0, u1] = initialize(config.data, config.mode, grid, d, s);
  WaveState& state = result.state;
  state.prev = std::move(u0);
  state.curr = std::move(u1);
  state.n = 1;
  state.k = k;
  snapshot(0, state.prev);
  snapshot(1, state.curr);

  const double initial_norm = std::max(state.prev.norm(), state.curr.norm());
  const bool track_energy = config.log_every > 0;
  if (track_energy) {
    result.initial_energy = discrete_energy(state, op);
    result.log.push_back({0, 0.0, result.initial_energy, std::nullopt, std::nullopt});
  }

  Vector forcing;
  for (int n = 1; n < grid.steps; ++n) {
    const Vector* f = nullptr;
    if (config.data.forcing) {
      forcing = interior_nodal_values(d, config.data.forcing, grid.time(n));
      f = &forcing;
    }
    leapfrog_step(state, op, f);
    if (config.growth_limit && state.curr.norm() > *config.growth_limit * initial_norm) throw BlowUpError(state.n);
    snapshot(state.n, state.curr);
    if (track_energy && n % config.log_every == 0) {
      // Energy of level n: uses u^n and u^{n+1}.
      LogRow row{n, grid.time(n), discrete_energy(state, op), std::nullopt, std::nullopt};
      if (config.exact) row.l2 = l2_error(d, state.prev, config.exact, grid.time(n));
      if (config.exact_grad) row.h1 = h1_error(d, state.prev, config.exact_grad, grid.time(n));
      const double drift =
          std::abs(row.energy - result.initial_energy) / std::max(std::abs(result.initial_energy), 1e-300);
      result.max_relative_energy_drift = std::max(result.max_relative_energy_drift, drift);
      result.log.push_back(row);
    }
  }
  if (track_energy) result.final_energy = discrete_energy(state, op);

  const double T = grid.time(grid.steps);
  if (config.exact) {
    result.l2_error = l2_error(d, state.curr, config.exact, T);
    const Vector velocity = (state.curr - state.prev) / k;
    const double t_prev = grid.time(grid.steps - 1);
    const ScalarField& u = config.exact;
    result.velocity_l2_error = l2_error(
        d, velocity, [&u, k, t_prev](Point2 x, double) { return (u(x, t_prev + k) - u(x, t_prev)) / k; }, T);
  }
  if (config.exact_grad) result.h1_error = h1_error(d, state.curr, config.exact_grad, T);
  return result;
}

}  // namespace cutwave
