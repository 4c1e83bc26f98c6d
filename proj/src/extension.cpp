#include "cutwave/extension.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cutwave {

namespace {

// Uniform bucket grid over the centroids of a candidate element set.
class CentroidGrid {
 public:
  CentroidGrid(const BackgroundMesh& mesh, const std::vector<int>& elements) : mesh_(mesh) {
    const Box& b = mesh.bounds();
    cell_ = mesh.h();
    nx_ = std::max(1, static_cast<int>(std::ceil(b.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(b.height() / cell_)));
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (int e : elements) {
      const auto [i, j] = bucket_of(mesh.centroid(e));
      buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(e);
    }
  }

  // Element with nearest centroid, ties to the lowest index.
  int nearest(Point2 q) const {
    const auto [qi, qj] = bucket_of(q);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::max();
    const int max_ring = std::max(nx_, ny_);
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int j = qj - ring; j <= qj + ring; ++j) {
        for (int i = qi - ring; i <= qi + ring; ++i) {
          if (std::max(std::abs(i - qi), std::abs(j - qj)) != ring) continue;
          if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
          for (int e : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
            const Point2 d = mesh_.centroid(e) - q;
            const double d2 = dot(d, d);
            if (d2 < best_d2 || (d2 == best_d2 && e < best)) {
              best_d2 = d2;
              best = e;
            }
          }
        }
      }
      // Anything in ring + 1 is at least ring * cell away.
      if (best >= 0 && std::sqrt(best_d2) < ring * cell_) break;
    }
    return best;
  }

 private:
  std::pair<int, int> bucket_of(Point2 p) const {
    const Box& b = mesh_.bounds();
    const int i = std::clamp(static_cast<int>((p.x - b.xmin) / cell_), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>((p.y - b.ymin) / cell_), 0, ny_ - 1);
    return {i, j};
  }

  const BackgroundMesh& mesh_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

double union_diameter(const BackgroundMesh& mesh, int a, int b) {
  std::array<Point2, 6> p{};
  const auto ta = mesh.element_coords(a);
  const auto tb = mesh.element_coords(b);
  std::copy(ta.begin(), ta.end(), p.begin());
  std::copy(tb.begin(), tb.end(), p.begin() + 3);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d = std::max(d, distance(p[i], p[j]));
  return d;
}

}  // namespace

NodeNumbering number_nodes(const BackgroundMesh& mesh, const Classification& cls) {
  std::vector<char> active(mesh.num_vertices(), 0), interior(mesh.num_vertices(), 0);
  for (int e : cls.active)
    for (int v : mesh.element(e)) active[static_cast<std::size_t>(v)] = 1;
  for (int e : cls.large)
    for (int v : mesh.element(e)) interior[static_cast<std::size_t>(v)] = 1;

  NodeNumbering n;
  n.vertex_to_full.assign(mesh.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!active[v]) continue;
    const int full = n.num_full();
    n.vertex_to_full[v] = full;
    n.full_to_vertex.push_back(static_cast<int>(v));
    n.full_to_interior.push_back(-1);
    if (interior[v]) {
      n.full_to_interior.back() = n.num_interior();
      n.interior_to_full.push_back(full);
    }
  }
  return n;
}

SMapResult build_s_map(const BackgroundMesh& mesh, const Classification& cls) {
  if (cls.large.empty()) throw std::runtime_error("domain unresolved by mesh");
  SMapResult result;
  result.s_map.assign(mesh.num_elements(), -1);
  for (int e : cls.large) result.s_map[static_cast<std::size_t>(e)] = e;
  const CentroidGrid grid(mesh, cls.large);
  const double h = mesh.h();
  for (int e : cls.active) {
    if (cls.is_large(e)) {
      result.max_diameter_ratio = std::max(result.max_diameter_ratio, mesh.diameter(e) / h);
      continue;
    }
    const int target = grid.nearest(mesh.centroid(e));
    result.s_map[static_cast<std::size_t>(e)] = target;
    result.max_diameter_ratio = std::max(result.max_diameter_ratio, union_diameter(mesh, e, target) / h);
  }
  return result;
}

std::vector<int> choose_node_owners(const BackgroundMesh& mesh, const Classification& cls,
                                    const NodeNumbering& nodes, const std::vector<int>& s_map) {
  std::vector<int> owner(static_cast<std::size_t>(nodes.num_full()), -1);
  for (int full = 0; full < nodes.num_full(); ++full) {
    if (nodes.is_interior(full)) continue;
    const int v = nodes.full_to_vertex[static_cast<std::size_t>(full)];
    const Point2 x = mesh.vertex(v);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::max();
    for (int e : mesh.node_patch(v)) {
      if (!cls.is_active(e)) continue;
      const Point2 d = mesh.centroid(s_map[static_cast<std::size_t>(e)]) - x;
      const double d2 = dot(d, d);
      if (d2 < best_d2 || (d2 == best_d2 && e < best)) {
        best_d2 = d2;
        best = e;
      }
    }
    assert(best >= 0);
    owner[static_cast<std::size_t>(full)] = best;
  }
  return owner;
}

std::array<double, 3> barycentric(const Triangle& tri, Point2 p) {
  const double det = cross(tri[1] - tri[0], tri[2] - tri[0]);
  const double l1 = cross(p - tri[0], tri[2] - tri[0]) / det;
  const double l2 = cross(tri[1] - tri[0], p - tri[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

ExtensionOperator assemble_extension_matrix(const BackgroundMesh& mesh, const Classification& cls,
                                            const NodeNumbering& nodes, const SMapResult& s_map,
                                            const std::vector<int>& node_owner, AveragingWeights weights) {
  ExtensionOperator ext;
  ext.nodes = nodes;
  ext.s_map = s_map.s_map;
  ext.node_owner = node_owner;
  ext.max_diameter_ratio = s_map.max_diameter_ratio;
  ext.weights = weights;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nodes.num_full()) + 3 * static_cast<std::size_t>(nodes.num_full() - nodes.num_interior()));

  const auto add_polynomial_extension = [&](int row, int source, Point2 x, double weight) {
    const TriangleIndices& t = mesh.element(source);
    const auto lambda = barycentric(mesh.element_coords(source), x);
    for (std::size_t k = 0; k < 3; ++k) {
      const int col = nodes.full_to_interior[static_cast<std::size_t>(nodes.vertex_to_full[static_cast<std::size_t>(t[k])])];
      if (col < 0) throw std::logic_error("extension source element has a non-interior vertex");
      triplets.emplace_back(row, col, weight * lambda[k]);
    }
  };

  for (int full = 0; full < nodes.num_full(); ++full) {
    const int col = nodes.full_to_interior[static_cast<std::size_t>(full)];
    if (col >= 0) {
      triplets.emplace_back(full, col, 1.0);
      continue;
    }
    const int v = nodes.full_to_vertex[static_cast<std::size_t>(full)];
    const Point2 x = mesh.vertex(v);
    if (weights == AveragingWeights::SingleOwner) {
      const int owner = node_owner[static_cast<std::size_t>(full)];
      add_polynomial_extension(full, s_map.s_map[static_cast<std::size_t>(owner)], x, 1.0);
    } else {
      std::vector<int> patch;
      for (int e : mesh.node_patch(v))
        if (cls.is_active(e)) patch.push_back(e);
      const double w = 1.0 / static_cast<double>(patch.size());
      for (int e : patch) add_polynomial_extension(full, s_map.s_map[static_cast<std::size_t>(e)], x, w);
    }
  }

  ext.matrix.resize(nodes.num_full(), nodes.num_interior());
  // Duplicates (uniform weights) are summed; exact zeros are kept so exterior
  // rows keep their full barycentric stencil.
  ext.matrix.setFromTriplets(triplets.begin(), triplets.end());
  ext.matrix.makeCompressed();
  return ext;
}

ExtensionOperator build_extension(const BackgroundMesh& mesh, const Classification& cls, AveragingWeights weights) {
  const NodeNumbering nodes = number_nodes(mesh, cls);
  const SMapResult s_map = build_s_map(mesh, cls);
  const auto owners = choose_node_owners(mesh, cls, nodes, s_map.s_map);
  return assemble_extension_matrix(mesh, cls, nodes, s_map, owners, weights);
}

}  // namespace cutwave
