#include "cutwave/studies.hpp"

#include <cmath>
#include <random>

#include "cutwave/problems.hpp"

namespace cutwave {

Level make_level(const ImplicitDomain& domain, double target_h, const DiscretizationParams& params) {
  Level level;
  level.mesh = std::make_shared<const BackgroundMesh>(build_structured_mesh(domain.box, target_h));
  level.disc = make_discretization(level.mesh, domain, params);
  level.system = assemble_system(*level.disc);
  return level;
}

WaveStudy wave_convergence_study(const WaveStudyParams& p) {
  WaveStudy study;
  const auto solution = problems::disc_wave(p.omega);
  const int n0 = TimeGrid::nearest_step(p.final_time, p.k0).steps;
  const ImplicitDomain domain = domain_catalog("disc", {0.5, 0.79, BcType::WeakDirichlet});
  for (int l = 0; l < p.levels; ++l) {
    const Level level = make_level(domain, p.h0 / std::ldexp(1.0, l), p.disc);
    SimulationConfig config;
    config.grid = TimeGrid(p.final_time, n0 << l);
    config.mode = p.mode;
    config.data.u = solution.u;
    config.data.grad_u = solution.grad_u;
    config.data.forcing = solution.f;
    config.exact = solution.u;
    config.exact_grad = solution.grad_u;
    config.safety = p.safety;
    const SimulationResult r = run_simulation(*level.disc, level.system, config);
    study.report.add(level.disc->h(), config.grid.k(), *r.l2_error, *r.h1_error);
    study.report.rows.back().velocity_l2 = r.velocity_l2_error;
    study.cfl.push_back(r.cfl);
    study.steps.push_back(config.grid.steps);
  }
  return study;
}

PoissonStudy poisson_convergence_study(double h0, int levels, const DiscretizationParams& p) {
  PoissonStudy study;
  const auto solution = problems::disc_poisson();
  const ImplicitDomain domain = domain_catalog("disc", {0.5, 0.79, BcType::WeakDirichlet});
  for (int l = 0; l < levels; ++l) {
    const Level level = make_level(domain, h0 / std::ldexp(1.0, l), p);
    const Discretization& d = *level.disc;
    const CgResult poisson = poisson_solve(d, level.system, solution.f, 1e-11);
    study.poisson.add(d.h(), 0.0, l2_error(d, poisson.x, solution.u, 0.0), h1_error(d, poisson.x, solution.grad_u, 0.0));
    const CgResult ritz = ritz_project(d, level.system, solution.u, solution.grad_u, 0.0, 1e-11);
    study.ritz.add(d.h(), 0.0, l2_error(d, ritz.x, solution.u, 0.0), h1_error(d, ritz.x, solution.grad_u, 0.0));
    study.cg_iterations.push_back(poisson.iterations);
  }
  return study;
}

namespace {

Vector random_interior(const Discretization& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(d.num_interior());
  for (int i = 0; i < d.num_interior(); ++i) v[i] = dist(rng);
  for (int i : d.strong_dirichlet) v[i] = 0.0;
  return v;
}

}  // namespace

EnergyCheck energy_conservation_check(const Discretization& d, const SystemMatrices& s, int steps, double factor,
                                      std::uint64_t seed) {
  const LeapfrogOperator op(s.stiffness, s.lumped.diagonal, d.strong_dirichlet);
  const CflEstimate cfl = cfl_estimate(s.stiffness, s.lumped.diagonal, d.h(), d.strong_dirichlet);
  std::mt19937_64 rng(seed);
  EnergyCheck check;
  check.k_max = cfl.k_max;
  check.k = factor * cfl.k_max;
  check.steps = steps;

  WaveState state{random_interior(d, rng), random_interior(d, rng), 1, check.k};
  const Vector u0 = state.prev;
  const double e0 = discrete_energy(state, op);
  for (int n = 0; n < steps; ++n) {
    leapfrog_step(state, op);
    check.max_drift = std::max(check.max_drift, std::abs(discrete_energy(state, op) - e0) / std::abs(e0));
  }
  for (int n = 0; n < steps; ++n) leapfrog_reverse_step(state, op);
  check.reversal_error = (state.prev - u0).norm() / u0.norm();
  return check;
}

CflProbe cfl_probe(const Discretization& d, const SystemMatrices& s, int steps, double unstable_factor,
                   double stable_factor, std::uint64_t seed) {
  const LeapfrogOperator op(s.stiffness, s.lumped.diagonal, d.strong_dirichlet);
  const CflEstimate cfl = cfl_estimate(s.stiffness, s.lumped.diagonal, d.h(), d.strong_dirichlet);
  CflProbe probe;
  probe.k_max = cfl.k_max;
  probe.c = cfl.c;
  std::mt19937_64 rng(seed);
  const Vector u0 = random_interior(d, rng);

  const auto run = [&](double factor, bool stop_on_detect, int* detected) {
    WaveState state{u0, u0, 1, factor * cfl.k_max};
    const double ref = u0.norm();
    double growth = 1.0;
    for (int n = 0; n < steps; ++n) {
      try {
        leapfrog_step(state, op);
      } catch (const BlowUpError&) {
        if (detected) *detected = state.n + 1;
        return std::numeric_limits<double>::infinity();
      }
      growth = std::max(growth, state.curr.norm() / ref);
      if (growth >= 10.0 && detected && *detected < 0) {
        *detected = state.n;
        if (stop_on_detect) break;
      }
    }
    return growth;
  };
  probe.growth_unstable = run(unstable_factor, true, &probe.detected_at);
  probe.unstable_detected = probe.detected_at >= 0;
  probe.growth_stable = run(stable_factor, false, nullptr);
  return probe;
}

ExtensionCheck extension_correctness(const Discretization& d) {
  ExtensionCheck check;
  const auto affine = [](Point2 p) { return 0.3 - 1.7 * p.x + 2.9 * p.y; };
  Vector interior(d.num_interior());
  for (int i = 0; i < d.num_interior(); ++i) interior[i] = affine(d.interior_node(i));
  const Vector full = d.ext.apply(interior);
  const Vector ones = d.ext.apply(Vector::Ones(d.num_interior()));
  for (int i = 0; i < d.num_full(); ++i) {
    check.affine_error = std::max(check.affine_error, std::abs(full[i] - affine(d.full_node(i))));
    check.ones_error = std::max(check.ones_error, std::abs(ones[i] - 1.0));
    const int nnz = d.ext.matrix.outerIndexPtr()[i + 1] - d.ext.matrix.outerIndexPtr()[i];
    if (!d.ext.nodes.is_interior(i) && nnz != 3) ++check.exterior_rows_not_three;
  }
  return check;
}

}  // namespace cutwave
