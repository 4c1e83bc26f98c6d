#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cutwave/extension.hpp"
#include "cutwave/geometry.hpp"
#include "cutwave/kernels.hpp"
#include "cutwave/mesh.hpp"

namespace cutwave {

using ScalarField = std::function<double(Point2, double)>;  // (x, t)
using GradientField = std::function<Point2(Point2, double)>;

struct DiscretizationParams {
  double gamma = 10.0;
  double c_large = 0.1;
  InteriorRule interior_rule = InteriorRule::LargeIntersection;
  AveragingWeights weights = AveragingWeights::SingleOwner;
  /// Quadrature degree for mass, stiffness and load.
  int degree = 2;
};

/// Mesh, domain, classification and extension for one resolution.
struct Discretization {
  std::shared_ptr<const BackgroundMesh> mesh;
  ImplicitDomain domain;
  DiscretizationParams params;
  Classification cls;
  ExtensionOperator ext;
  /// Interior indices constrained by strong Dirichlet conditions, ascending.
  std::vector<int> strong_dirichlet;

  double h() const { return mesh->h(); }
  int num_full() const { return ext.nodes.num_full(); }
  int num_interior() const { return ext.nodes.num_interior(); }
  Point2 full_node(int full) const;
  Point2 interior_node(int i) const;
  /// Full indices of the vertices of a background element; -1 where inactive.
  std::array<int, 3> element_dofs(int e) const;

  /// Rule on T cap Omega_h.
  QuadratureRule volume_rule(int e, int degree) const;
  /// Rule on the weakly imposed (Nitsche) part of the boundary inside T.
  QuadratureRule nitsche_rule(int e, int degree) const;
  /// Rule on the whole boundary of Omega_h inside T, any tag.
  QuadratureRule boundary_rule(int e, int degree) const;
};

std::shared_ptr<Discretization> make_discretization(std::shared_ptr<const BackgroundMesh> mesh,
                                                    ImplicitDomain domain, const DiscretizationParams& params = {});

/// P1 basis values and constant gradients on a triangle.
struct P1Element {
  explicit P1Element(const Triangle& tri);
  std::array<double, 3> values(Point2 p) const;
  std::array<Point2, 3> grads;
  Triangle tri;
  double det = 0.0;
};

/// Full-space mass matrix (N_h x N_h).
SparseMatrix assemble_mass(const Discretization& d);
/// Full-space Nitsche stiffness matrix (N_h x N_h).
SparseMatrix assemble_stiffness(const Discretization& d, double gamma);
SparseMatrix assemble_stiffness(const Discretization& d);

/// (f(t), phi_i) over Omega_h, i over full indices.
Vector assemble_load(const Discretization& d, const ScalarField& f, double t, int degree = 5);

/// Interior nodal values of f(t); the lumped load is m_L .* these values.
Vector interior_nodal_values(const Discretization& d, const ScalarField& f, double t);
Vector full_nodal_values(const Discretization& d, const ScalarField& f, double t);

/// E^T X E, symmetrized.
SparseMatrix reduce(const ExtensionOperator& ext, const SparseMatrix& full);
Vector reduce(const ExtensionOperator& ext, const Vector& full);

struct LumpedMass {
  Vector diagonal;
  /// diag(m_L) - M_I.
  SparseMatrix defect;
};

/// Row-sum lumping. Throws std::runtime_error("lumping produced non-positive mass").
LumpedMass lump(const SparseMatrix& reduced_mass);

struct SystemMatrices {
  SparseMatrix mass_full;
  SparseMatrix stiffness_full;
  SparseMatrix mass;       // M_I
  SparseMatrix stiffness;  // A_I
  LumpedMass lumped;
  double gamma = 10.0;
};

SystemMatrices assemble_system(const Discretization& d);

}  // namespace cutwave
