#include "cutwave/mesh.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace cutwave {

BackgroundMesh::BackgroundMesh(std::vector<Point2> vertices, std::vector<TriangleIndices> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty()) throw std::invalid_argument("empty domain");
  for (const auto& tri : triangles_) {
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
        throw std::invalid_argument("triangle references missing vertex");
    }
  }
  build_topology();
}

Triangle BackgroundMesh::element_coords(int e) const {
  const auto& t = element(e);
  return {vertex(t[0]), vertex(t[1]), vertex(t[2])};
}

Point2 BackgroundMesh::centroid(int e) const {
  const auto p = element_coords(e);
  return {(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0};
}

double BackgroundMesh::signed_area(int e) const {
  const auto p = element_coords(e);
  return 0.5 * cross(p[1] - p[0], p[2] - p[0]);
}

double BackgroundMesh::area(int e) const { return std::abs(signed_area(e)); }

double BackgroundMesh::diameter(int e) const {
  const auto p = element_coords(e);
  return std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
}

std::span<const int> BackgroundMesh::node_patch(int node) const {
  if (node < 0 || static_cast<std::size_t>(node) >= vertices_.size())
    throw std::out_of_range("node index out of range");
  const auto begin = static_cast<std::size_t>(patch_offsets_[static_cast<std::size_t>(node)]);
  const auto end = static_cast<std::size_t>(patch_offsets_[static_cast<std::size_t>(node) + 1]);
  return std::span<const int>(patch_elements_).subspan(begin, end - begin);
}

bool BackgroundMesh::on_side(int vertex_index, BoxSide side) const {
  const Point2& p = vertex(vertex_index);
  switch (side) {
    case BoxSide::XMin: return p.x == bounds_.xmin;
    case BoxSide::XMax: return p.x == bounds_.xmax;
    case BoxSide::YMin: return p.y == bounds_.ymin;
    case BoxSide::YMax: return p.y == bounds_.ymax;
  }
  return false;
}

void BackgroundMesh::build_topology() {
  const auto ne = static_cast<int>(triangles_.size());

  bounds_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  for (const auto& p : vertices_) {
    bounds_.xmin = std::min(bounds_.xmin, p.x);
    bounds_.xmax = std::max(bounds_.xmax, p.x);
    bounds_.ymin = std::min(bounds_.ymin, p.y);
    bounds_.ymax = std::max(bounds_.ymax, p.y);
  }

  // (edge v0 < v1, element)
  std::vector<std::tuple<int, int, int>> edges;
  edges.reserve(3 * triangles_.size());
  double max_diam = 0.0;
  double min_diam = std::numeric_limits<double>::max();
  double min_inscribed = std::numeric_limits<double>::max();
  for (int e = 0; e < ne; ++e) {
    if (signed_area(e) <= 0.0) throw std::invalid_argument("triangle with non-positive signed area");
    const auto& t = element(e);
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)];
      const int b = t[static_cast<std::size_t>((k + 1) % 3)];
      edges.emplace_back(std::min(a, b), std::max(a, b), e);
    }
    const auto p = element_coords(e);
    const double perimeter = distance(p[0], p[1]) + distance(p[1], p[2]) + distance(p[2], p[0]);
    const double diam = diameter(e);
    max_diam = std::max(max_diam, diam);
    min_diam = std::min(min_diam, diam);
    min_inscribed = std::min(min_inscribed, 4.0 * area(e) / perimeter);
  }
  h_ = max_diam;
  quality_ratio_ = max_diam / min_inscribed;
  uniformity_ratio_ = max_diam / min_diam;

  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && std::get<0>(edges[j]) == std::get<0>(edges[i]) &&
           std::get<1>(edges[j]) == std::get<1>(edges[i]))
      ++j;
    const std::array<int, 2> verts{std::get<0>(edges[i]), std::get<1>(edges[i])};
    if (j - i == 1) {
      boundary_edges_.push_back({verts, std::get<2>(edges[i])});
    } else if (j - i == 2) {
      interior_faces_.push_back({verts, std::get<2>(edges[i]), std::get<2>(edges[i + 1])});
    } else {
      throw std::invalid_argument("non-conforming mesh: edge shared by more than two triangles");
    }
    i = j;
  }

  patch_offsets_.assign(vertices_.size() + 1, 0);
  for (const auto& t : triangles_)
    for (int v : t) ++patch_offsets_[static_cast<std::size_t>(v) + 1];
  for (std::size_t i = 0; i < vertices_.size(); ++i) patch_offsets_[i + 1] += patch_offsets_[i];
  patch_elements_.resize(static_cast<std::size_t>(patch_offsets_.back()));
  std::vector<int> fill(patch_offsets_.begin(), patch_offsets_.end() - 1);
  for (int e = 0; e < ne; ++e)
    for (int v : element(e)) patch_elements_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = e;
}

BackgroundMesh build_grid_mesh(const Box& box, int nx, int ny) {
  if (!(box.width() > 0.0) || !(box.height() > 0.0) || nx < 1 || ny < 1)
    throw std::invalid_argument("empty domain");
  const double dx = box.width() / nx;
  const double dy = box.height() / ny;
  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? box.ymax : box.ymin + j * dy;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? box.xmax : box.xmin + i * dx;
      vertices.push_back({x, y});
    }
  }
  std::vector<TriangleIndices> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  return BackgroundMesh(std::move(vertices), std::move(triangles));
}

std::array<int, 2> structured_cell_counts(const Box& box, double target_h) {
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) throw std::invalid_argument("empty domain");
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  const double cell = target_h / std::sqrt(2.0);
  const auto count = [cell](double length) {
    return std::max(1, static_cast<int>(std::ceil(length / cell)));
  };
  return {count(box.width()), count(box.height())};
}

BackgroundMesh build_structured_mesh(const Box& box, double target_h) {
  const auto [nx, ny] = structured_cell_counts(box, target_h);
  return build_grid_mesh(box, nx, ny);
}

}  // namespace cutwave
