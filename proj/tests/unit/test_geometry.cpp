#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "cutwave/geometry.hpp"

using namespace cutwave;

namespace {

const Triangle kUnit = {Point2{0, 0}, Point2{1, 0}, Point2{0, 1}};

// Exact integral of x^a y^b over the unit right triangle: a! b! / (a + b + 2)!.
double monomial_integral(int a, int b) {
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

double integrate(const QuadratureRule& q, int a, int b) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i].x, a) * std::pow(q.points[i].y, b);
  return s;
}

std::array<double, 3> phi_values(const Triangle& t, double a, double b, double c) {
  return {a * t[0].x + b * t[0].y + c, a * t[1].x + b * t[1].y + c, a * t[2].x + b * t[2].y + c};
}

}  // namespace

TEST_CASE("triangle rules are exact up to their degree") {
  for (int deg : {2, 5}) {
    const QuadratureRule q = triangle_rule(kUnit, deg);
    CHECK(q.size() == (deg <= 2 ? 3u : 7u));
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) CHECK(integrate(q, a, b) == doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(triangle_rule(kUnit, 6), std::invalid_argument);
}

TEST_CASE("segment rule") {
  const QuadratureRule q = segment_rule({0, 0}, {2, 0}, 5);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i].x, 5);
  CHECK(s == doctest::Approx(64.0 / 6.0).epsilon(1e-13));
  CHECK(q.measure() == doctest::Approx(2.0));
}

TEST_CASE("half-plane cut of the unit triangle") {
  const auto phi = phi_values(kUnit, 1, 0, -0.5);  // x - 0.5
  CHECK(cut_area(kUnit, phi) == doctest::Approx(0.375).epsilon(1e-15));
  const QuadratureRule vol = cut_volume_quadrature(kUnit, phi, 5);
  CHECK(vol.measure() == doctest::Approx(0.375).epsilon(1e-14));
  // Integral of x^2 over the triangle minus the corner (0.5,0),(1,0),(0.5,0.5).
  CHECK(integrate(vol, 2, 0) == doctest::Approx(1.0 / 12 - 11.0 / 192).epsilon(1e-13));

  const QuadratureRule bnd = cut_boundary_quadrature(kUnit, phi, 3);
  CHECK(bnd.measure() == doctest::Approx(0.5).epsilon(1e-15));
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    CHECK(bnd.points[i].x == doctest::Approx(0.5));
    CHECK(bnd.normals[i].x == doctest::Approx(1.0));
    CHECK(bnd.normals[i].y == doctest::Approx(0.0));
  }
}

TEST_CASE("uncut triangles") {
  const auto inside = phi_values(kUnit, 0, 0, -1);
  const auto outside = phi_values(kUnit, 0, 0, 1);
  CHECK(cut_area(kUnit, inside) == doctest::Approx(0.5));
  CHECK(cut_area(kUnit, outside) == 0.0);
  CHECK(cut_boundary_quadrature(kUnit, inside, 2).empty());
  CHECK(cut_boundary_quadrature(kUnit, outside, 2).empty());
  CHECK(cut_volume_quadrature(kUnit, outside, 2).empty());
}

TEST_CASE("cut area matches a Monte Carlo estimate") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0), coef(-1.0, 1.0);
  const Triangle tri = {Point2{0.1, 0.2}, Point2{0.9, 0.1}, Point2{0.4, 0.8}};
  const double area = 0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
  for (int trial = 0; trial < 5; ++trial) {
    const double a = coef(rng), b = coef(rng);
    const double c = -(a * 0.45 + b * 0.35);  // zero line near the centroid
    const auto phi = phi_values(tri, a, b, c);
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      double s = u(rng), t = u(rng);
      if (s + t > 1.0) s = 1.0 - s, t = 1.0 - t;
      const Point2 p = tri[0] + s * (tri[1] - tri[0]) + t * (tri[2] - tri[0]);
      hits += a * p.x + b * p.y + c < 0.0;
    }
    CHECK(std::abs(cut_area(tri, phi) - area * hits / n) < 5e-3 * area);
  }
}

TEST_CASE("disc classification") {
  const ImplicitDomain disc = domain_catalog("disc");
  const BackgroundMesh mesh = build_structured_mesh(disc.box, 0.02);
  const Classification cls = classify(mesh, disc);
  double total = 0.0;
  for (int e : cls.active) total += cls.cut_area[static_cast<std::size_t>(e)];
  CHECK(std::abs(total - std::numbers::pi / 4) < mesh.h() * mesh.h());
  const double h2 = mesh.h() * mesh.h();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const int i = static_cast<int>(e);
    if (cls.label[e] == ElementLabel::Large) CHECK(cls.cut_area[e] >= 0.1 * h2 * (1 - 1e-12));
    if (cls.label[e] == ElementLabel::Small) {
      CHECK(cls.cut_area[e] > 0.0);
      CHECK(cls.cut_area[e] < 0.1 * h2);
    }
    if (cls.label[e] == ElementLabel::Outside) CHECK(cls.cut_area[e] == 0.0);
    CHECK(cls.is_active(i) == (cls.cut_area[e] > 0.0));
  }
  const Classification inside = classify(mesh, disc, 0.1, InteriorRule::FullyInside);
  CHECK(inside.large.size() < cls.large.size());
  CHECK(inside.active == cls.active);
}

TEST_CASE("classification errors") {
  const ImplicitDomain disc = domain_catalog("disc");
  const BackgroundMesh mesh = build_structured_mesh(disc.box, 0.1);
  CHECK_THROWS_AS(classify(mesh, disc, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify(mesh, disc, 0.3), std::invalid_argument);
  ImplicitDomain tiny = domain_catalog("disc", {0.01});
  CHECK_THROWS_WITH_AS(classify(mesh, tiny), "domain unresolved by mesh", std::runtime_error);
}

TEST_CASE("domain catalog and validation") {
  CHECK_THROWS_AS(domain_catalog("square"), std::invalid_argument);
  const ImplicitDomain box = domain_catalog("box-with-cut-side");
  CHECK(box.tag(BoundaryPortion::XMin) == BcType::StrongDirichlet);
  CHECK(box.tag(BoundaryPortion::LevelSet) == BcType::WeakDirichlet);
  CHECK(box.tag(BoundaryPortion::YMin) == BcType::Neumann);
  const BackgroundMesh mesh = build_structured_mesh(box.box, 0.05);
  CHECK_NOTHROW(validate_domain(box, mesh));

  ImplicitDomain untagged = box;
  untagged.bc_tags.erase(BoundaryPortion::YMax);
  CHECK_THROWS_AS(validate_domain(untagged, mesh), std::invalid_argument);
  ImplicitDomain no_level_set = box;
  no_level_set.bc_tags.erase(BoundaryPortion::LevelSet);
  CHECK_THROWS_AS(validate_domain(no_level_set, mesh), std::invalid_argument);
  ImplicitDomain strong_cut = box;
  strong_cut.bc_tags[BoundaryPortion::LevelSet] = BcType::StrongDirichlet;
  CHECK_THROWS_AS(validate_domain(strong_cut, mesh), std::invalid_argument);

  ImplicitDomain flat = domain_catalog("disc");
  flat.grad_phi = [](Point2) { return Point2{0, 0}; };
  CHECK_THROWS_AS(validate_domain(flat, build_structured_mesh(flat.box, 0.05)), std::invalid_argument);
}

TEST_CASE("boundary names round-trip") {
  for (auto p : {BoundaryPortion::LevelSet, BoundaryPortion::XMin, BoundaryPortion::XMax, BoundaryPortion::YMin,
                 BoundaryPortion::YMax})
    CHECK(parse_boundary_portion(to_string(p)) == p);
  for (auto t : {BcType::WeakDirichlet, BcType::StrongDirichlet, BcType::Neumann}) CHECK(parse_bc_type(to_string(t)) == t);
  CHECK_THROWS_AS(parse_bc_type("robin"), std::invalid_argument);
}
