#include <CLI11.hpp>
#include <iostream>

#include "cutwave/experiments.hpp"
#include "cutwave/kernels.hpp"
#include "cutwave/solver.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<double> h, k, T, gamma;
  std::optional<std::string> domain, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> levels;
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->set_help_flag("--help", "print this help message and exit");
  sub->add_option("--config", o.config, "TOML configuration file")->check(CLI::ExistingFile);
  sub->add_option("--h", o.h, "mesh size (initial size for refinement studies)");
  sub->add_option("--k", o.k, "time step");
  sub->add_option("--T", o.T, "final time");
  sub->add_option("--gamma", o.gamma, "Nitsche penalty");
  sub->add_option("--domain", o.domain, "catalog domain: disc, box-with-cut-side");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--levels", o.levels, "number of refinement levels");
}

cutwave::RunConfig build_config(cutwave::Experiment experiment, const Overrides& o) {
  cutwave::RunConfig c;
  if (!o.config.empty()) c = cutwave::apply_toml(cutwave::parse_toml_file(o.config));
  c.experiment = experiment;
  if (o.h) c.h = *o.h;
  if (o.k) c.k = *o.k;
  if (o.T) c.final_time = *o.T;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.domain) c.domain = *o.domain;
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.levels) c.levels = *o.levels;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CutFEM wave equation solver with a discrete extension operator"};
  app.require_subcommand(1);
  Overrides overrides;
  const std::pair<const char*, cutwave::Experiment> commands[] = {
      {"converge", cutwave::Experiment::Converge},
      {"simulate", cutwave::Experiment::Simulate},
      {"poisson", cutwave::Experiment::Poisson},
      {"verify", cutwave::Experiment::Verify},
  };
  const char* help[] = {"manufactured-solution refinement study for the wave equation",
                        "pulse simulation with VTK snapshots", "Poisson and Ritz projection refinement study",
                        "structural and stability checks"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 4; ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_flags(subs.back(), overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cutwave::kExitConfig;
  }

  try {
    cutwave::configure_threads_from_env();
    for (int i = 0; i < 4; ++i) {
      if (!subs[i]->parsed()) continue;
      return cutwave::run_experiment(build_config(commands[i].second, overrides), std::cout);
    }
  } catch (const cutwave::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return cutwave::kExitConfig;
  } catch (const cutwave::BlowUpError& e) {
    std::cerr << e.what() << '\n';
    return cutwave::kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return cutwave::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cutwave::kExitAcceptance;
  }
  return cutwave::kExitConfig;
}
