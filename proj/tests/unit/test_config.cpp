#include <doctest.h>

#include <stdexcept>

#include "cutwave/config.hpp"

using namespace cutwave;

TEST_CASE("TOML subset") {
  const TomlTable t = parse_toml(R"(# experiment record
[run]
experiment = "simulate"   # trailing comment
h = 7e-3
levels = 3
snapshot_times = [0.35, 0.4,]
flag = true

[output]
dir = "out/#1"
)");
  REQUIRE(t.count("run"));
  CHECK(std::get<std::string>(t.at("run").at("experiment")) == "simulate");
  CHECK(std::get<double>(t.at("run").at("h")) == 7e-3);
  CHECK(std::get<std::vector<double>>(t.at("run").at("snapshot_times")) == std::vector<double>{0.35, 0.4});
  CHECK(std::get<bool>(t.at("run").at("flag")));
  CHECK(std::get<std::string>(t.at("output").at("dir")) == "out/#1");
}

TEST_CASE("TOML syntax errors") {
  CHECK_THROWS_AS(parse_toml("[run\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[run]\nh 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[run]\nh = 1\nh = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[run]\nh = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[run]\nname = \"open\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_file("/nonexistent/cutwave.toml"), ConfigError);
}

TEST_CASE("config sections") {
  const RunConfig c = apply_toml(parse_toml(R"(
[run]
experiment = "verify"
h = 0.02
k = 1e-3
T = 0.5
gamma = 20
init = "ritz"
seed = 42
levels = 3
[domain]
name = "box-with-cut-side"
cut_x = 0.7
[bc]
ymin = "strong-dirichlet"
[output]
dir = "results"
matrices = true
)"));
  CHECK(c.experiment == Experiment::Verify);
  CHECK(*c.h == 0.02);
  CHECK(*c.k == 1e-3);
  CHECK(*c.final_time == 0.5);
  CHECK(c.gamma == 20.0);
  CHECK(*c.mode == InitialMode::Ritz);
  CHECK(c.seed == 42);
  CHECK(c.levels == 3);
  CHECK(c.domain == "box-with-cut-side");
  CHECK(c.domain_params.cut_x == 0.7);
  CHECK(c.out == "results");
  CHECK(c.write_matrices);
  CHECK_NOTHROW(validate(c));
  const ImplicitDomain d = c.make_domain();
  CHECK(d.tag(BoundaryPortion::YMin) == BcType::StrongDirichlet);
  CHECK(d.tag(BoundaryPortion::XMin) == BcType::StrongDirichlet);
  CHECK(c.discretization().gamma == 20.0);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(apply_toml(parse_toml("[run]\nunknown = 1\n")), ConfigError);
  CHECK_THROWS_AS(apply_toml(parse_toml("[extra]\n")), ConfigError);
  CHECK_THROWS_AS(apply_toml(parse_toml("[run]\nh = \"small\"\n")), ConfigError);
  CHECK_THROWS_AS(apply_toml(parse_toml("[run]\nlevels = 2.5\n")), ConfigError);
  CHECK_THROWS_AS(apply_toml(parse_toml("[run]\nexperiment = \"plot\"\n")), ConfigError);
  CHECK_THROWS_AS(apply_toml(parse_toml("[bc]\ntop = \"neumann\"\n")), ConfigError);
  CHECK_THROWS_AS(apply_toml(parse_toml("[bc]\nlevelset = \"robin\"\n")), ConfigError);

  RunConfig c;
  c.h = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.c_large = 0.3;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.domain = "torus";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.final_time = 1.0;
  c.snapshot_times = {1.5};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.bc[BoundaryPortion::LevelSet] = BcType::StrongDirichlet;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("config echo") {
  RunConfig c;
  c.h = 0.5;
  const auto e = echo(c);
  CHECK(e.at("h") == "0.5");
  CHECK(e.at("k") == "default");
  CHECK(e.at("experiment") == "converge");
  CHECK(e.at("seed") == "20191001");
}
