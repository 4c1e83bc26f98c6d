#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cutwave/mesh.hpp"

namespace cutwave {

enum class BcType { WeakDirichlet, StrongDirichlet, Neumann };

/// A portion of the physical boundary: the zero level set, or one side of
/// the background box that is part of the domain boundary.
enum class BoundaryPortion { LevelSet, XMin, XMax, YMin, YMax };

std::string to_string(BcType t);
std::string to_string(BoundaryPortion p);
BcType parse_bc_type(const std::string& s);
BoundaryPortion parse_boundary_portion(const std::string& s);
BoxSide box_side(BoundaryPortion p);

/// Level-set description of the physical domain. phi < 0 inside.
struct ImplicitDomain {
  std::string name;
  std::function<double(Point2)> phi;
  std::function<Point2(Point2)> grad_phi;
  std::map<BoundaryPortion, BcType> bc_tags;
  /// Background box the domain is meant to be meshed in.
  Box box;

  double operator()(Point2 p) const { return phi(p); }
  std::optional<BcType> tag(BoundaryPortion p) const;
  bool has_level_set_boundary() const;
};

/// Throws std::invalid_argument if phi has a vanishing gradient near its
/// zero set (sampled on the mesh), the level-set portion is untagged, or some
/// untagged box side carries nodes inside the domain.
void validate_domain(const ImplicitDomain& domain, const BackgroundMesh& mesh);

struct DomainParams {
  double radius = 0.5;
  double cut_x = 0.79;
  BcType boundary = BcType::WeakDirichlet;
};

/// "disc": phi = r - radius, box [-0.55, 0.55]^2, single level-set tag.
/// "box-with-cut-side": phi = x - cut_x on (-0.81, 0.81) x (-0.8, 0.8), strong
/// Dirichlet at x = -0.81, Neumann at y = +-0.8, weak Dirichlet on the cut.
/// Throws std::invalid_argument for unknown names.
ImplicitDomain domain_catalog(const std::string& name, const DomainParams& params = {});

struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;
  /// Outward unit normal, boundary rules only.
  std::vector<Point2> normals;

  bool empty() const { return weights.empty(); }
  std::size_t size() const { return weights.size(); }
  double measure() const;
};

/// Standard rule on a whole triangle. degree <= 2: 3-point edge-midpoint
/// rule; degree 3..5: 7-point rule.
QuadratureRule triangle_rule(const Triangle& tri, int degree);

/// Gauss-Legendre rule on a segment exact for the given polynomial degree.
QuadratureRule segment_rule(Point2 a, Point2 b, int degree);

/// Rule on T intersected with {phi_lin < 0}, phi_lin the linear interpolant of
/// the given vertex values.
QuadratureRule cut_volume_quadrature(const Triangle& tri, const std::array<double, 3>& phi, int degree);
QuadratureRule cut_volume_quadrature(const Triangle& tri, const ImplicitDomain& domain, int degree);

/// Rule on the zero segment of phi_lin inside T; normals grad(phi_lin)/|grad(phi_lin)|.
QuadratureRule cut_boundary_quadrature(const Triangle& tri, const std::array<double, 3>& phi, int degree);
QuadratureRule cut_boundary_quadrature(const Triangle& tri, const ImplicitDomain& domain, int degree);

/// Rule on the part of segment [a, b] where the linear interpolant of
/// (phi_a, phi_b) is negative, with a fixed outward normal.
QuadratureRule clipped_segment_quadrature(Point2 a, Point2 b, double phi_a, double phi_b, Point2 normal,
                                          int degree);

/// Area of T intersected with {phi_lin < 0}, via the same clipping.
double cut_area(const Triangle& tri, const std::array<double, 3>& phi);

enum class ElementLabel { Large, Small, Outside };

enum class InteriorRule {
  LargeIntersection,  // |T cap Omega| >= c_large h^2
  FullyInside,        // T subset of Omega
};

struct Classification {
  std::vector<ElementLabel> label;
  std::vector<int> active;
  std::vector<int> large;
  /// Cut area |T cap Omega_h| per background element.
  std::vector<double> cut_area;
  double c_large = 0.1;
  InteriorRule rule = InteriorRule::LargeIntersection;

  bool is_active(int e) const { return label[static_cast<std::size_t>(e)] != ElementLabel::Outside; }
  bool is_large(int e) const { return label[static_cast<std::size_t>(e)] == ElementLabel::Large; }
};

/// Throws std::invalid_argument for c_large outside (0, 1/4) (the unit
/// structured cell has area h^2/4) and std::runtime_error("domain unresolved
/// by mesh") when no element qualifies as Large.
Classification classify(const BackgroundMesh& mesh, const ImplicitDomain& domain, double c_large = 0.1,
                        InteriorRule rule = InteriorRule::LargeIntersection);

std::array<double, 3> vertex_phi(const BackgroundMesh& mesh, const ImplicitDomain& domain, int e);

}  // namespace cutwave
