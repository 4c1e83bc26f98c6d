#include "cutwave/experiments.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <ostream>

#include "cutwave/io.hpp"
#include "cutwave/kernels.hpp"
#include "cutwave/problems.hpp"
#include "cutwave/studies.hpp"

#ifndef CUTWAVE_VERSION
#define CUTWAVE_VERSION "unknown"
#endif

namespace cutwave {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

class Manifest {
 public:
  explicit Manifest(const RunConfig& c) : config_(c), start_(Clock::now()) {}

  void time(const std::string& name, double seconds) { timings_[name] = seconds; }
  void output(const fs::path& p) { outputs_.push_back(fs::relative(p, config_.out).generic_string()); }
  Json& results() { return results_; }

  template <class F>
  auto timed(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      time(name, seconds_since(t0));
    } else {
      auto r = f();
      time(name, seconds_since(t0));
      return r;
    }
  }

  void write(int exit_code) {
    time("total", seconds_since(start_));
    Json j;
    j["program"] = "cutwave";
    j["experiment"] = to_string(config_.experiment);
    j["config"] = echo(config_);
    j["versions"] = {{"cutwave", CUTWAVE_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__},
                     {"cxx", static_cast<long>(__cplusplus)},
#ifdef _OPENMP
                     {"openmp", _OPENMP},
#endif
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    j["threads"] = max_threads();
    j["parallel_kernels"] = parallel_kernels_enabled();
    j["timings"] = timings_;
    j["outputs"] = outputs_;
    j["results"] = results_;
    j["exit_code"] = exit_code;
    io::write_text(config_.out / "manifest.json", j.dump(2) + "\n");
  }

 private:
  using Clock = std::chrono::steady_clock;
  static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  const RunConfig& config_;
  Clock::time_point start_;
  std::map<std::string, double> timings_;
  std::vector<std::string> outputs_;
  Json results_ = Json::object();
};

void write_table(Manifest& m, const fs::path& path, const std::string& csv) {
  io::write_text(path, csv);
  m.output(path);
}

void dump_matrices(Manifest& m, const RunConfig& c, const Level& level) {
  if (!c.write_matrices) return;
  const fs::path dir = c.out / "matrices";
  const std::pair<const char*, const SparseMatrix*> items[] = {
      {"mass_full", &level.system.mass_full},    {"stiffness_full", &level.system.stiffness_full},
      {"mass", &level.system.mass},              {"stiffness", &level.system.stiffness},
      {"lumping_defect", &level.system.lumped.defect}, {"extension", &level.disc->ext.matrix}};
  for (const auto& [name, matrix] : items) {
    const fs::path p = dir / (std::string(name) + ".mtx");
    io::write_matrix_market(p, *matrix);
    m.output(p);
  }
}

void require_unit_disc(const RunConfig& c, const char* command) {
  const bool weak = c.domain_params.boundary == BcType::WeakDirichlet &&
                    (!c.bc.count(BoundaryPortion::LevelSet) || c.bc.at(BoundaryPortion::LevelSet) == BcType::WeakDirichlet);
  if (c.domain != "disc" || c.domain_params.radius != 0.5 || !weak || c.bc.size() > 1)
    throw ConfigError(std::string(command) + " needs the weak Dirichlet disc of radius 0.5");
}

bool strictly_decreasing(const ErrorReport& r, double ErrorRow::*field) {
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (!(r.rows[i].*field < r.rows[i - 1].*field)) return false;
  return true;
}

/// Final-level orders against the thresholds; a single level has no order
/// and always passes.
bool rates_pass(const ErrorReport& r, double min_l2, double min_h1, bool require_decrease) {
  if (r.rows.size() < 2) return true;
  const ErrorRow& last = r.rows.back();
  bool ok = last.eoc_l2 && *last.eoc_l2 >= min_l2 && last.eoc_h1 && *last.eoc_h1 >= min_h1;
  if (require_decrease) ok = ok && strictly_decreasing(r, &ErrorRow::l2) && strictly_decreasing(r, &ErrorRow::h1);
  return ok;
}

Json report_json(const ErrorReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j = {{"h", row.h}, {"k", row.k}, {"l2", row.l2}, {"h1", row.h1}};
    if (row.eoc_l2) j["eoc_l2"] = *row.eoc_l2;
    if (row.eoc_h1) j["eoc_h1"] = *row.eoc_h1;
    if (row.velocity_l2) j["velocity_l2"] = *row.velocity_l2;
    rows.push_back(j);
  }
  return rows;
}

void print_report(std::ostream& log, const std::string& title, const ErrorReport& r) {
  log << title << '\n';
  log << "        h            k           l2           h1   eoc_l2   eoc_h1\n";
  for (const auto& row : r.rows) {
    log << fmt("%10.4e", row.h) << ' ' << fmt("%12.4e", row.k) << ' ' << fmt("%12.4e", row.l2) << ' '
        << fmt("%12.4e", row.h1) << ' ' << (row.eoc_l2 ? fmt("%8.3f", *row.eoc_l2) : std::string(8, ' ')) << ' '
        << (row.eoc_h1 ? fmt("%8.3f", *row.eoc_h1) : std::string(8, ' ')) << '\n';
  }
}

double initial_h(const RunConfig& c) { return c.h.value_or(kDiscInitialH); }

double initial_k(const RunConfig& c, double h) {
  if (c.k) return *c.k;
  if (c.alpha) return *c.alpha * h;
  return c.h ? kStepCoupling * h : kDiscInitialK;
}

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

}  // namespace

PulseDefaults pulse_defaults(const std::string& domain, double pulse_width) {
  if (domain == "disc") return {7e-3, 3.93e-4, 0.4, {0.35, 0.4}};
  if (domain == "box-with-cut-side") {
    if (std::abs(pulse_width - 0.1) < 1e-12) return {8.9e-3, 3.93e-4, 1.2, {0.0, 0.7, 0.85, 1.2}};
    if (std::abs(pulse_width - 0.05) < 1e-12) return {8.9e-3, 3.93e-4, 1.2, {0.0, 0.74, 0.84, 1.2}};
    return {8.9e-3, 3.93e-4, 1.2, {0.0, 0.65, 0.9, 1.2}};
  }
  throw ConfigError("no pulse defaults for domain '" + domain + "'");
}

int cmd_converge(const RunConfig& c, std::ostream& log) {
  require_unit_disc(c, "converge");
  Manifest manifest(c);
  WaveStudyParams p;
  p.h0 = initial_h(c);
  p.k0 = initial_k(c, p.h0);
  p.final_time = c.final_time.value_or(1.0);
  if (c.omega > 0.0) p.omega = c.omega;
  p.levels = c.levels;
  p.mode = c.mode.value_or(InitialMode::InterpolateExact);
  p.disc = c.discretization();
  p.safety = c.safety;
  if (c.write_matrices) dump_matrices(manifest, c, make_level(c.make_domain(), p.h0, p.disc));

  const WaveStudy study = manifest.timed("study", [&] { return wave_convergence_study(p); });
  write_table(manifest, c.out / "converge.csv", study.report.to_csv(true));
  print_report(log, "wave convergence at T = " + fmt("%g", p.final_time), study.report);

  const bool ok = rates_pass(study.report, kWaveMinEocL2, kWaveMinEocH1, true);
  Json cfl = Json::array();
  for (std::size_t l = 0; l < study.cfl.size(); ++l)
    cfl.push_back({{"k_max", study.cfl[l].k_max}, {"c", study.cfl[l].c}, {"steps", study.steps[l]}});
  manifest.results() = {{"rows", report_json(study.report)}, {"cfl", cfl}, {"pass", ok}};
  log << (ok ? "PASS" : "FAIL") << " orders (l2 >= " << kWaveMinEocL2 << ", h1 >= " << kWaveMinEocH1 << ")\n";
  const int code = ok ? kExitOk : kExitAcceptance;
  manifest.write(code);
  return code;
}

int cmd_poisson(const RunConfig& c, std::ostream& log) {
  require_unit_disc(c, "poisson");
  Manifest manifest(c);
  const double h0 = initial_h(c);
  if (c.write_matrices) dump_matrices(manifest, c, make_level(c.make_domain(), h0, c.discretization()));
  const PoissonStudy study =
      manifest.timed("study", [&] { return poisson_convergence_study(h0, c.levels, c.discretization()); });
  write_table(manifest, c.out / "poisson.csv", study.poisson.to_csv());
  write_table(manifest, c.out / "ritz.csv", study.ritz.to_csv());
  print_report(log, "poisson", study.poisson);
  print_report(log, "ritz projection", study.ritz);

  const bool ok = rates_pass(study.poisson, kPoissonMinEocL2, kPoissonMinEocH1, false) &&
                  rates_pass(study.ritz, kPoissonMinEocL2, kPoissonMinEocH1, false);
  manifest.results() = {{"poisson", report_json(study.poisson)},
                        {"ritz", report_json(study.ritz)},
                        {"cg_iterations", study.cg_iterations},
                        {"pass", ok}};
  log << (ok ? "PASS" : "FAIL") << " orders (l2 >= " << kPoissonMinEocL2 << ", h1 >= " << kPoissonMinEocH1 << ")\n";
  const int code = ok ? kExitOk : kExitAcceptance;
  manifest.write(code);
  return code;
}

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  Manifest manifest(c);
  const ImplicitDomain domain = c.make_domain();
  const PulseDefaults defaults = pulse_defaults(c.domain, c.pulse_width);
  const double h = c.h.value_or(defaults.h);
  const double k = c.k ? *c.k : c.alpha ? *c.alpha * h : c.h ? kStepCoupling * h : defaults.k;
  const double T = c.final_time.value_or(defaults.final_time);
  std::vector<double> times = c.snapshot_times;
  for (double t : times)
    if (t > T + 1e-12) throw ConfigError("snapshot time " + fmt("%g", t) + " beyond T = " + fmt("%g", T));
  if (times.empty())
    for (double t : defaults.snapshot_times)
      if (t <= T + 1e-12) times.push_back(t);

  PulseKind kind = c.pulse;
  if (kind == PulseKind::Auto) kind = c.domain == "disc" ? PulseKind::Radial : PulseKind::Plane;
  const ScalarField shape = kind == PulseKind::Radial ? problems::radial_pulse(c.pulse_width)
                                                      : problems::plane_pulse(c.pulse_width, c.pulse_center);
  const double amplitude = c.pulse_amplitude;

  const Level level = manifest.timed("assembly", [&] { return make_level(domain, h, c.discretization()); });
  dump_matrices(manifest, c, level);
  const Discretization& d = *level.disc;

  SimulationConfig sim;
  sim.grid = TimeGrid::with_max_step(T, k);
  sim.mode = c.mode.value_or(InitialMode::Taylor);
  sim.data.u = [shape, amplitude](Point2 p, double t) { return amplitude * shape(p, t); };
  sim.data.velocity = [](Point2, double) { return 0.0; };
  sim.safety = c.safety;
  sim.snapshot_times = times;
  sim.log_every = c.log_every > 0 ? c.log_every : 10;
  sim.growth_limit = 1e3;

  int index = 0;
  const auto on_snapshot = [&](int n, double t, const Vector& u) {
    if (!c.write_vtk) return;
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%02d_n%06d.vtk", index++, n);
    const fs::path p = c.out / name;
    io::write_field_vtk(p, d, u, "u", t);
    manifest.output(p);
  };
  const SimulationResult r = manifest.timed("time_stepping", [&] { return run_simulation(d, level.system, sim, on_snapshot); });
  write_table(manifest, c.out / "energy.csv", io::log_to_csv(r.log));

  manifest.results() = {{"h", d.h()},
                        {"k", sim.grid.k()},
                        {"steps", sim.grid.steps},
                        {"k_max", r.cfl.k_max},
                        {"cfl_c", r.cfl.c},
                        {"active_nodes", d.num_full()},
                        {"interior_nodes", d.num_interior()},
                        {"initial_energy", r.initial_energy},
                        {"final_energy", r.final_energy},
                        {"max_relative_energy_drift", r.max_relative_energy_drift},
                        {"snapshots", r.snapshots_written}};
  log << "simulate " << c.domain << ": h = " << fmt("%.4e", d.h()) << ", k = " << fmt("%.4e", sim.grid.k())
      << ", N = " << sim.grid.steps << ", k_max = " << fmt("%.4e", r.cfl.k_max) << '\n';
  log << "energy " << fmt("%.10e", r.initial_energy) << " -> " << fmt("%.10e", r.final_energy)
      << " (max relative drift " << fmt("%.3e", r.max_relative_energy_drift) << ")\n";
  log << r.snapshots_written << " snapshots at levels nearest the requested times\n";
  manifest.write(kExitOk);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  Manifest manifest(c);
  const ImplicitDomain domain = c.make_domain();
  const double h0 = c.h.value_or(kDiscInitialH);
  const DiscretizationParams params = c.discretization();
  std::vector<Check> checks;
  const auto add = [&](std::string name, double value, double threshold, bool pass) {
    checks.push_back({std::move(name), value, threshold, pass});
  };

  std::vector<Level> levels;
  manifest.timed("assembly", [&] {
    for (int l = 0; l < std::max(c.levels, 3); ++l) levels.push_back(make_level(domain, h0 / std::ldexp(1.0, l), params));
  });
  dump_matrices(manifest, c, levels.front());

  manifest.timed("structure", [&] {
    double row_sum = 0.0, asym = 0.0, min_mass = std::numeric_limits<double>::infinity();
    for (const auto& level : levels) {
      const auto g = graph_laplacian_check(level.system.lumped, level.system.mass, 0);
      row_sum = std::max(row_sum, g.max_row_sum);
      asym = std::max(asym, g.max_asymmetry);
      min_mass = std::min(min_mass, g.min_lumped_mass);
    }
    add("lumping defect row sums", row_sum, kMaxRowSum, row_sum <= kMaxRowSum);
    add("lumping defect asymmetry", asym, 0.0, asym == 0.0);
    add("min lumped mass", min_mass, 0.0, min_mass > 0.0);

    const ExtensionCheck e = extension_correctness(*levels.front().disc);
    add("extension affine error", e.affine_error, kMaxAffineError, e.affine_error <= kMaxAffineError);
    add("extension E1 - 1", e.ones_error, kMaxOnesError, e.ones_error <= kMaxOnesError);
  });

  manifest.timed("lumping_study", [&] {
    std::vector<double> ratios;
    for (int l = 0; l < 3; ++l)
      ratios.push_back(lumping_error_study(*levels[l].disc, levels[l].system, c.samples, c.seed).max_ratio);
    const double growth = ratios.back() / ratios.front();
    add("lumping ratio growth over two halvings", growth, kMaxLumpingGrowth, growth <= kMaxLumpingGrowth);
  });

  manifest.timed("extension_study", [&] {
    std::vector<const Discretization*> ds;
    for (int l = 0; l < c.levels; ++l) ds.push_back(levels[l].disc.get());
    const auto rows = extension_stability_study(ds, c.samples, c.seed);
    double g0 = 0.0, g1 = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      g0 = std::max(g0, rows[i].max_ratio_l2 / rows[i - 1].max_ratio_l2);
      g1 = std::max(g1, rows[i].max_ratio_h1 / rows[i - 1].max_ratio_h1);
    }
    add("extension stability growth (m = 0)", g0, kMaxGrowthPerLevel, g0 <= kMaxGrowthPerLevel);
    add("extension stability growth (m = 1)", g1, kMaxGrowthPerLevel, g1 <= kMaxGrowthPerLevel);
  });

  manifest.timed("energy", [&] {
    const EnergyCheck e =
        energy_conservation_check(*levels.front().disc, levels.front().system, c.energy_steps, c.safety, c.seed);
    add("energy drift", e.max_drift, kMaxEnergyDrift, e.max_drift <= kMaxEnergyDrift);
    add("time reversal error", e.reversal_error, kMaxReversalError, e.reversal_error <= kMaxReversalError);
  });

  manifest.timed("cfl_probe", [&] {
    const CflProbe p = cfl_probe(*levels.front().disc, levels.front().system, c.probe_steps, 1.05, c.safety, c.seed);
    add("blow-up detected above k_max", p.detected_at, c.probe_steps, p.unstable_detected);
    add("bounded below k_max", p.growth_stable, 10.0, p.growth_stable < 10.0);
  });

  std::string csv = "check,value,threshold,pass\n";
  Json items = Json::array();
  bool all = true;
  for (const auto& ch : checks) {
    log << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << fmt("%.6e", ch.value) << " (threshold "
        << fmt("%g", ch.threshold) << ")\n";
    csv += ch.name + "," + fmt("%.10e", ch.value) + "," + fmt("%.10e", ch.threshold) + "," +
           (ch.pass ? "1" : "0") + "\n";
    items.push_back({{"name", ch.name}, {"value", ch.value}, {"threshold", ch.threshold}, {"pass", ch.pass}});
    all = all && ch.pass;
  }
  write_table(manifest, c.out / "verify.csv", csv);
  manifest.results() = {{"checks", items}, {"pass", all}};
  const int code = all ? kExitOk : kExitAcceptance;
  manifest.write(code);
  return code;
}

int run_experiment(const RunConfig& c, std::ostream& log) {
  validate(c);
  fs::create_directories(c.out);
  switch (c.experiment) {
    case Experiment::Converge: return cmd_converge(c, log);
    case Experiment::Simulate: return cmd_simulate(c, log);
    case Experiment::Poisson: return cmd_poisson(c, log);
    case Experiment::Verify: return cmd_verify(c, log);
  }
  return kExitConfig;
}

}  // namespace cutwave
