#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "cutwave/analysis.hpp"
#include "cutwave/studies.hpp"

using namespace cutwave;

TEST_CASE("observed order of convergence") {
  const auto r = eoc({1.0, 0.25, 0.0625}, {1.0, 0.5, 0.25});
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(2.0));
  CHECK(r[1] == doctest::Approx(2.0));
  CHECK(eoc({1.0, 0.5}, {0.1, 0.05})[0] == doctest::Approx(1.0));
  CHECK(std::isinf(eoc({1.0, 0.0}, {0.1, 0.05})[0]));
  CHECK_THROWS_AS(eoc({1.0}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({1.0, 0.5}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({-1.0, 0.5}, {0.1, 0.05}), std::invalid_argument);
}

TEST_CASE("error report table") {
  ErrorReport r;
  r.add(0.1, 0.01, 4e-2, 2e-1);
  r.add(0.05, 0.005, 1e-2, 1e-1);
  r.add(0.025, 0.0025, 2.5e-3, 5e-2);
  CHECK_FALSE(r.rows[0].eoc_l2.has_value());
  CHECK(*r.rows[1].eoc_l2 == doctest::Approx(2.0));
  CHECK(*r.rows[2].eoc_h1 == doctest::Approx(1.0));
  const std::string csv = r.to_csv();
  CHECK(csv.substr(0, csv.find('\n')) == "h,k,l2,h1,eoc_l2,eoc_h1");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const std::string first = csv.substr(csv.find('\n') + 1);
  CHECK(first.substr(0, first.find('\n')).back() == ',');
  const std::string extra = r.to_csv(true);
  CHECK(extra.substr(0, extra.find('\n')) == "h,k,l2,h1,eoc_l2,eoc_h1,velocity_l2,energy_drift");
}

TEST_CASE("error norms") {
  const Level l = make_level(domain_catalog("disc"), 0.04);
  const Discretization& d = *l.disc;
  const auto affine = [](Point2 p, double) { return 0.5 + p.x - 3.0 * p.y; };
  const Vector u = interior_nodal_values(d, affine, 0.0);
  CHECK(l2_error(d, u, affine, 0.0) < 1e-13);
  CHECK(h1_error(d, u, [](Point2, double) { return Point2{1.0, -3.0}; }, 0.0) < 1e-12);

  const Vector zero = Vector::Zero(d.num_interior());
  const double area = std::pow(l2_error(d, zero, [](Point2, double) { return 1.0; }, 0.0), 2);
  CHECK(std::abs(area - std::numbers::pi / 4) < d.h() * d.h());
  CHECK(l2_norm_full(d, Vector::Ones(d.num_full())) == doctest::Approx(std::sqrt(area)).epsilon(1e-12));
  CHECK(h1_seminorm_full(d, Vector::Ones(d.num_full())) < 1e-6);
}

TEST_CASE("graph Laplacian check") {
  const Level l = make_level(domain_catalog("disc"), 0.08);
  const GraphLaplacianReport g = graph_laplacian_check(l.system.lumped, l.system.mass);
  CHECK(g.passed);
  CHECK(g.max_row_sum <= 1e-12);
  CHECK(g.max_asymmetry == 0.0);
  CHECK(g.min_lumped_mass > 0.0);
  REQUIRE(g.min_eigenvalue.has_value());
  if (g.negative_mass_entries == 0) CHECK(*g.min_eigenvalue >= -1e-12 * l.system.lumped.diagonal.maxCoeff());

  LumpedMass broken = l.system.lumped;
  broken.defect.coeffRef(0, 0) += 1.0;
  CHECK_FALSE(graph_laplacian_check(broken, l.system.mass).passed);
}

TEST_CASE("dense eigenvalues") {
  SparseMatrix m(3, 3);
  m.insert(0, 0) = 3.0;
  m.insert(1, 1) = 1.0;
  m.insert(2, 2) = 2.0;
  m.makeCompressed();
  CHECK(dense_min_eigenvalue(m) == doctest::Approx(1.0));
  CHECK(dense_max_eigenvalue(m) == doctest::Approx(3.0));
}

TEST_CASE("lumping and extension studies are seeded") {
  const Level l = make_level(domain_catalog("disc"), 0.05);
  const auto a = lumping_error_study(*l.disc, l.system, 20, 11);
  const auto b = lumping_error_study(*l.disc, l.system, 20, 11);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(a.max_ratio > 0.0);
  CHECK(a.samples == 20);
  const auto e = extension_stability(*l.disc, 20, 11);
  CHECK(e.max_ratio_l2 >= 1.0);
  CHECK(e.max_ratio_h1 > 0.0);
  CHECK(e.max_ratio_l2 == extension_stability(*l.disc, 20, 11).max_ratio_l2);
}
