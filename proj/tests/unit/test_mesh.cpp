#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cutwave/mesh.hpp"

using namespace cutwave;

TEST_CASE("2x2 grid has the expected counts") {
  const BackgroundMesh mesh = build_grid_mesh({0, 1, 0, 1}, 2, 2);
  CHECK(mesh.num_vertices() == 9);
  CHECK(mesh.num_elements() == 8);
  // 4 diagonals plus 4 interior grid edges; Euler: V - E + F = 1.
  CHECK(mesh.interior_faces().size() == 8);
  CHECK(mesh.boundary_edges().size() == 8);
  const std::size_t edges = mesh.interior_faces().size() + mesh.boundary_edges().size();
  CHECK(static_cast<long>(mesh.num_vertices()) - static_cast<long>(edges) + static_cast<long>(mesh.num_elements()) == 1);
}

TEST_CASE("node patches of the 2x2 grid") {
  const BackgroundMesh mesh = build_grid_mesh({0, 1, 0, 1}, 2, 2);
  CHECK(mesh.node_patch(0).size() == 2);
  CHECK(mesh.node_patch(2).size() == 1);
  CHECK(mesh.node_patch(6).size() == 1);
  CHECK(mesh.node_patch(8).size() == 2);
  CHECK(mesh.node_patch(4).size() == 6);
  CHECK(mesh.node_patch(1).size() == 3);
  CHECK_THROWS_AS(mesh.node_patch(9), std::out_of_range);
  const auto patch = mesh.node_patch(4);
  CHECK(std::is_sorted(patch.begin(), patch.end()));
}

TEST_CASE("element geometry") {
  const BackgroundMesh mesh = build_grid_mesh({0, 1, 0, 1}, 2, 2);
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    CHECK(mesh.signed_area(static_cast<int>(e)) > 0.0);
    total += mesh.area(static_cast<int>(e));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mesh.h() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(mesh.uniformity_ratio() == doctest::Approx(1.0).epsilon(1e-15));
  // Right isosceles triangle: hypotenuse over inscribed diameter = 1 + sqrt 2.
  CHECK(mesh.quality_ratio() == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
  const Point2 c = mesh.centroid(0);
  CHECK(c.x == doctest::Approx(1.0 / 3.0));
  CHECK(c.y == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("box sides") {
  const BackgroundMesh mesh = build_grid_mesh({-1, 1, 0, 2}, 2, 2);
  CHECK(mesh.on_side(0, BoxSide::XMin));
  CHECK(mesh.on_side(0, BoxSide::YMin));
  CHECK_FALSE(mesh.on_side(0, BoxSide::XMax));
  CHECK(mesh.on_side(8, BoxSide::YMax));
  CHECK_FALSE(mesh.on_side(4, BoxSide::XMin));
  CHECK(mesh.bounds().xmin == -1.0);
  CHECK(mesh.bounds().ymax == 2.0);
}

TEST_CASE("structured mesh respects the target size") {
  const Box box{-0.55, 0.55, -0.55, 0.55};
  const auto counts = structured_cell_counts(box, 0.1);
  CHECK(counts[0] == 16);  // ceil(1.1 / (0.1 / sqrt 2))
  CHECK(counts[1] == 16);
  for (double target : {0.1, 2.69e-2, 7e-3}) {
    const BackgroundMesh mesh = build_structured_mesh(box, target);
    CHECK(mesh.h() <= target);
    CHECK(mesh.h() > 0.9 * target);
  }
}

TEST_CASE("mesh construction is deterministic") {
  const BackgroundMesh a = build_structured_mesh({0, 1, 0, 0.5}, 0.05);
  const BackgroundMesh b = build_structured_mesh({0, 1, 0, 0.5}, 0.05);
  CHECK(a.vertices() == b.vertices());
  CHECK(a.triangles() == b.triangles());
}

TEST_CASE("invalid meshes are rejected") {
  CHECK_THROWS_AS(build_structured_mesh({0, 0, 0, 1}, 0.1), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_structured_mesh({0, 1, 0, 0}, 0.1), "empty domain", std::invalid_argument);
  std::vector<Point2> v = {{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(BackgroundMesh(v, {{0, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(BackgroundMesh(v, {{0, 1, 3}}), std::invalid_argument);
  CHECK_NOTHROW(BackgroundMesh(v, {{0, 1, 2}}));
}
