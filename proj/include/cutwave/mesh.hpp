#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cutwave {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Box {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

using Triangle = std::array<Point2, 3>;
using TriangleIndices = std::array<int, 3>;

/// Sides of the background box; used to tag mesh-boundary portions of the
/// physical boundary.
enum class BoxSide { XMin, XMax, YMin, YMax };

struct InteriorFace {
  std::array<int, 2> vertices;  // sorted ascending
  int left = -1;                // lower element index
  int right = -1;
};

struct BoundaryEdge {
  std::array<int, 2> vertices;
  int element = -1;
};

/// Structured triangulation of a box. Immutable once built.
class BackgroundMesh {
 public:
  BackgroundMesh(std::vector<Point2> vertices, std::vector<TriangleIndices> triangles);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return triangles_.size(); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<TriangleIndices>& triangles() const { return triangles_; }
  const Point2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const TriangleIndices& element(int e) const { return triangles_[static_cast<std::size_t>(e)]; }
  Triangle element_coords(int e) const;
  Point2 centroid(int e) const;
  double area(int e) const;
  double signed_area(int e) const;
  double diameter(int e) const;

  const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  /// Elements having `node` as a vertex, ascending. Throws std::out_of_range.
  std::span<const int> node_patch(int node) const;

  /// Max element diameter.
  double h() const { return h_; }

  /// Max diameter over min inscribed-circle diameter.
  double quality_ratio() const { return quality_ratio_; }

  /// Max over min element diameter; 1 for a mesh of congruent elements.
  double uniformity_ratio() const { return uniformity_ratio_; }

  /// Bounding box of the vertex set.
  const Box& bounds() const { return bounds_; }

  /// True if the vertex lies on the given side of the bounding box.
  bool on_side(int vertex, BoxSide side) const;

 private:
  void build_topology();

  std::vector<Point2> vertices_;
  std::vector<TriangleIndices> triangles_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<int> patch_offsets_;
  std::vector<int> patch_elements_;
  double h_ = 0.0;
  double quality_ratio_ = 0.0;
  double uniformity_ratio_ = 0.0;
  Box bounds_;
};

/// Uniform right-triangle split of an nx x ny grid: every cell is cut by the
/// diagonal from its lower-left to its upper-right corner. Vertices are
/// row-major, two triangles per cell in cell-major order.
BackgroundMesh build_grid_mesh(const Box& box, int nx, int ny);

/// Grid with cells of at most target_h / sqrt(2) per side so that the
/// hypotenuse, and hence h, does not exceed target_h. Throws
/// std::invalid_argument("empty domain") for a degenerate box.
BackgroundMesh build_structured_mesh(const Box& box, double target_h);

/// Cell counts chosen by build_structured_mesh.
std::array<int, 2> structured_cell_counts(const Box& box, double target_h);

}  // namespace cutwave
