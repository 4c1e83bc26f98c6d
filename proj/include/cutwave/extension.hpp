#pragma once

#include <vector>

#include "cutwave/geometry.hpp"
#include "cutwave/kernels.hpp"
#include "cutwave/mesh.hpp"

namespace cutwave {

/// Numbering of the active-mesh nodes ("full" indices, N_h of them) and of
/// the interior nodes (nodes of Large elements, N_I of them). Both follow
/// ascending global vertex order.
struct NodeNumbering {
  std::vector<int> full_to_vertex;
  std::vector<int> vertex_to_full;  // -1 for vertices outside the active mesh
  std::vector<int> interior_to_full;
  std::vector<int> full_to_interior;  // -1 for exterior nodes

  int num_full() const { return static_cast<int>(full_to_vertex.size()); }
  int num_interior() const { return static_cast<int>(interior_to_full.size()); }
  bool is_interior(int full) const { return full_to_interior[static_cast<std::size_t>(full)] >= 0; }
};

NodeNumbering number_nodes(const BackgroundMesh& mesh, const Classification& cls);

/// How the nodal average at an exterior node combines the element-wise extensions.
enum class AveragingWeights {
  SingleOwner,  // weight 1 on one owner element T_x
  Uniform,      // weight 1/|T_h(x)| on every active element of the patch
};

struct ExtensionOperator {
  NodeNumbering nodes;
  /// S_h per background element; -1 for Outside elements, identity on Large.
  std::vector<int> s_map;
  /// Owner element T_x per full node; -1 for interior nodes.
  std::vector<int> node_owner;
  /// N_h x N_I.
  SparseMatrix matrix;
  /// max diam(T u S_h(T)) / h over active elements.
  double max_diameter_ratio = 0.0;
  AveragingWeights weights = AveragingWeights::SingleOwner;

  Vector apply(const Vector& interior_values) const { return matrix * interior_values; }
};

struct SMapResult {
  std::vector<int> s_map;
  double max_diameter_ratio = 0.0;
};

/// Nearest-centroid Large element for every Small element (ties to the
/// lowest index); identity on Large elements.
SMapResult build_s_map(const BackgroundMesh& mesh, const Classification& cls);

/// For each exterior node the active patch element whose image has the
/// centroid nearest the node (ties to the lowest index). Indexed by full node.
std::vector<int> choose_node_owners(const BackgroundMesh& mesh, const Classification& cls,
                                    const NodeNumbering& nodes, const std::vector<int>& s_map);

/// Barycentric coordinates of p with respect to tri.
std::array<double, 3> barycentric(const Triangle& tri, Point2 p);

ExtensionOperator assemble_extension_matrix(const BackgroundMesh& mesh, const Classification& cls,
                                            const NodeNumbering& nodes, const SMapResult& s_map,
                                            const std::vector<int>& node_owner,
                                            AveragingWeights weights = AveragingWeights::SingleOwner);

ExtensionOperator build_extension(const BackgroundMesh& mesh, const Classification& cls,
                                  AveragingWeights weights = AveragingWeights::SingleOwner);

}  // namespace cutwave
