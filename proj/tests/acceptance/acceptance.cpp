// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cutwave/experiments.hpp"
#include "cutwave/kernels.hpp"
#include "cutwave/studies.hpp"

using namespace cutwave;
namespace fs = std::filesystem;

namespace {

std::string f(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [failed]");
  }
};

Level disc_level(double h, BcType bc = BcType::WeakDirichlet) {
  return make_level(domain_catalog("disc", {0.5, 0.79, bc}), h);
}

bool decreasing(const ErrorReport& r) {
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (!(r.rows[i].l2 < r.rows[i - 1].l2 && r.rows[i].h1 < r.rows[i - 1].h1)) return false;
  return true;
}

Outcome convergence() {
  Outcome o;
  const WaveStudy s = wave_convergence_study({});
  std::printf("%s", s.report.to_csv(true).c_str());
  const ErrorRow& last = s.report.rows.back();
  o.require(s.report.rows.size() == 4, std::to_string(s.report.rows.size()) + " levels");
  o.require(*last.eoc_l2 >= kWaveMinEocL2, "eoc_l2 " + f("%.3f", *last.eoc_l2) + " >= 1.8");
  o.require(*last.eoc_h1 >= kWaveMinEocH1, "eoc_h1 " + f("%.3f", *last.eoc_h1) + " >= 0.85");
  o.require(decreasing(s.report), "errors strictly decreasing");
  return o;
}

Outcome poisson() {
  Outcome o;
  const PoissonStudy s = poisson_convergence_study();
  for (const auto* r : {&s.poisson, &s.ritz}) {
    const char* name = r == &s.poisson ? "poisson" : "ritz";
    std::printf("%s\n%s", name, r->to_csv().c_str());
    const ErrorRow& last = r->rows.back();
    o.require(*last.eoc_l2 >= kPoissonMinEocL2, std::string(name) + " eoc_l2 " + f("%.3f", *last.eoc_l2) + " >= 1.8");
    o.require(*last.eoc_h1 >= kPoissonMinEocH1, std::string(name) + " eoc_h1 " + f("%.3f", *last.eoc_h1) + " >= 0.9");
  }
  return o;
}

Outcome lumping(const std::vector<Level>& levels) {
  Outcome o;
  std::vector<double> ratios;
  for (int l = 0; l < 3; ++l) ratios.push_back(lumping_error_study(*levels[l].disc, levels[l].system, 100).max_ratio);
  std::printf("lumping ratios %.6e %.6e %.6e\n", ratios[0], ratios[1], ratios[2]);
  o.require(ratios[2] <= kMaxLumpingGrowth * ratios[0], "growth over two halvings " + f("%.3f", ratios[2] / ratios[0]) + " <= 1.5");
  return o;
}

Outcome graph_laplacian(const std::vector<const Level*>& meshes) {
  Outcome o;
  double row_sum = 0.0, asym = 0.0, min_mass = 1e300;
  for (const Level* l : meshes) {
    const auto g = graph_laplacian_check(l->system.lumped, l->system.mass, 0);
    row_sum = std::max(row_sum, g.max_row_sum);
    asym = std::max(asym, g.max_asymmetry);
    min_mass = std::min(min_mass, g.min_lumped_mass);
  }
  o.require(row_sum <= kMaxRowSum, "relative row sums " + f("%.3e", row_sum) + " <= 1e-12");
  o.require(asym == 0.0, "asymmetry " + f("%.1e", asym));
  o.require(min_mass > 0.0, "min lumped mass " + f("%.3e", min_mass) + " > 0");
  o.detail += " on " + std::to_string(meshes.size()) + " meshes";
  return o;
}

Outcome extension_stability(const std::vector<Level>& levels) {
  Outcome o;
  std::vector<const Discretization*> ds;
  for (const auto& l : levels) ds.push_back(l.disc.get());
  const auto rows = extension_stability_study(ds, 100);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("stability h=%.4e m0=%.6f m1=%.6f\n", rows[i].h, rows[i].max_ratio_l2, rows[i].max_ratio_h1);
    if (i == 0) continue;
    const double g0 = rows[i].max_ratio_l2 / rows[i - 1].max_ratio_l2;
    const double g1 = rows[i].max_ratio_h1 / rows[i - 1].max_ratio_h1;
    o.require(g0 <= kMaxGrowthPerLevel && g1 <= kMaxGrowthPerLevel,
              "level " + std::to_string(i) + " growth " + f("%.3f", g0) + "/" + f("%.3f", g1) + " <= 1.5");
  }
  return o;
}

Outcome energy(const Level& neumann) {
  Outcome o;
  const EnergyCheck e = energy_conservation_check(*neumann.disc, neumann.system, 1000, 0.9);
  o.require(e.max_drift <= kMaxEnergyDrift, "drift " + f("%.3e", e.max_drift) + " <= 1e-9 over 1000 steps");
  o.require(e.reversal_error <= kMaxReversalError, "reversal " + f("%.3e", e.reversal_error) + " <= 1e-9");
  return o;
}

Outcome cfl(const std::vector<const Level*>& meshes) {
  Outcome o;
  for (const Level* l : meshes) {
    const CflProbe p = cfl_probe(*l->disc, l->system, 500, 1.05, 0.9);
    o.require(p.unstable_detected, "1.05 k_max blow-up at step " + std::to_string(p.detected_at));
    o.require(p.growth_stable < 10.0, "0.9 k_max growth " + f("%.3f", p.growth_stable));
  }
  return o;
}

Outcome extension_correctness(const std::vector<const Level*>& meshes) {
  Outcome o;
  double affine = 0.0, ones = 0.0;
  int bad_rows = 0;
  for (const Level* l : meshes) {
    const ExtensionCheck e = cutwave::extension_correctness(*l->disc);
    affine = std::max(affine, e.affine_error);
    ones = std::max(ones, e.ones_error);
    bad_rows += e.exterior_rows_not_three;
  }
  o.require(affine <= kMaxAffineError, "affine error " + f("%.3e", affine) + " <= 1e-13");
  o.require(ones <= kMaxOnesError, "|E 1 - 1| " + f("%.3e", ones) + " <= 1e-14");
  o.require(bad_rows == 0, "exterior rows with three entries");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome pulses(const fs::path& root) {
  Outcome o;
  struct Run {
    std::string name;
    std::string domain;
    std::optional<BcType> levelset;
    double width;
  };
  const Run runs[] = {{"dirichlet", "disc", BcType::WeakDirichlet, 0.2},
                      {"neumann", "disc", BcType::Neumann, 0.2},
                      {"d0=0.2", "box-with-cut-side", std::nullopt, 0.2},
                      {"d0=0.1", "box-with-cut-side", std::nullopt, 0.1},
                      {"d0=0.05", "box-with-cut-side", std::nullopt, 0.05}};
  for (const Run& r : runs) {
    RunConfig c;
    c.experiment = Experiment::Simulate;
    c.domain = r.domain;
    if (r.levelset) c.bc[BoundaryPortion::LevelSet] = *r.levelset;
    c.pulse_width = r.width;
    c.out = root / r.name;
    fs::remove_all(c.out);
    std::ostringstream log;
    int code = -1;
    try {
      code = run_experiment(c, log);
    } catch (const std::exception& e) {
      o.require(false, r.name + ": " + e.what());
      continue;
    }
    const auto m = nlohmann::json::parse(slurp(c.out / "manifest.json"));
    const std::size_t expected = pulse_defaults(r.domain, r.width).snapshot_times.size();
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(c.out)) files += entry.path().extension() == ".vtk";
    const double drift = m["results"]["max_relative_energy_drift"];
    o.require(code == kExitOk && files == expected && drift <= kMaxEnergyDrift,
              r.name + " " + std::to_string(files) + " snapshots, drift " + f("%.1e", drift));
  }
  return o;
}

}  // namespace

int main() {
  configure_threads_from_env();
  const fs::path root = fs::temp_directory_path() / "cutwave_acceptance";

  std::vector<Level> disc;
  for (int l = 0; l < 4; ++l) disc.push_back(disc_level(kDiscInitialH / (1 << l)));
  const Level neumann = disc_level(kDiscInitialH, BcType::Neumann);
  const Level box = make_level(domain_catalog("box-with-cut-side"), 2 * 8.9e-3);
  std::vector<const Level*> all;
  for (const auto& l : disc) all.push_back(&l);
  all.push_back(&neumann);
  all.push_back(&box);

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"wave convergence", convergence},
      {"poisson and ritz convergence", poisson},
      {"lumping error", [&] { return lumping(disc); }},
      {"graph laplacian", [&] { return graph_laplacian(all); }},
      {"extension stability", [&] { return extension_stability(disc); }},
      {"energy conservation", [&] { return energy(neumann); }},
      {"cfl sharpness", [&] { return cfl({&neumann, &disc[0], &box}); }},
      {"extension correctness", [&] { return extension_correctness(all); }},
      {"pulse experiments", [&] { return pulses(root); }},
  };

  std::vector<std::string> summary;
  bool all_pass = true;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all_pass = all_pass && o.pass;
    char line[1024];
    std::snprintf(line, sizeof(line), "%s %d %s: %s", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    std::printf("%s\n", line);
    std::fflush(stdout);
    summary.push_back(line);
  }
  std::printf("\n");
  for (const auto& s : summary) std::printf("%s\n", s.c_str());
  return all_pass ? 0 : 1;
}
