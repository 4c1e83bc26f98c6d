#include "cutwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cutwave {

std::string to_string(BcType t) {
  switch (t) {
    case BcType::WeakDirichlet: return "weak-dirichlet";
    case BcType::StrongDirichlet: return "strong-dirichlet";
    case BcType::Neumann: return "neumann";
  }
  return "?";
}

std::string to_string(BoundaryPortion p) {
  switch (p) {
    case BoundaryPortion::LevelSet: return "levelset";
    case BoundaryPortion::XMin: return "xmin";
    case BoundaryPortion::XMax: return "xmax";
    case BoundaryPortion::YMin: return "ymin";
    case BoundaryPortion::YMax: return "ymax";
  }
  return "?";
}

BcType parse_bc_type(const std::string& s) {
  if (s == "weak-dirichlet" || s == "dirichlet") return BcType::WeakDirichlet;
  if (s == "strong-dirichlet") return BcType::StrongDirichlet;
  if (s == "neumann") return BcType::Neumann;
  throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

BoundaryPortion parse_boundary_portion(const std::string& s) {
  for (auto p : {BoundaryPortion::LevelSet, BoundaryPortion::XMin, BoundaryPortion::XMax, BoundaryPortion::YMin,
                 BoundaryPortion::YMax}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown boundary portion '" + s + "'");
}

BoxSide box_side(BoundaryPortion p) {
  switch (p) {
    case BoundaryPortion::XMin: return BoxSide::XMin;
    case BoundaryPortion::XMax: return BoxSide::XMax;
    case BoundaryPortion::YMin: return BoxSide::YMin;
    case BoundaryPortion::YMax: return BoxSide::YMax;
    case BoundaryPortion::LevelSet: break;
  }
  throw std::invalid_argument("level-set portion is not a box side");
}

std::optional<BcType> ImplicitDomain::tag(BoundaryPortion p) const {
  const auto it = bc_tags.find(p);
  if (it == bc_tags.end()) return std::nullopt;
  return it->second;
}

bool ImplicitDomain::has_level_set_boundary() const { return bc_tags.count(BoundaryPortion::LevelSet) > 0; }

void validate_domain(const ImplicitDomain& domain, const BackgroundMesh& mesh) {
  if (!domain.phi) throw std::invalid_argument("domain has no level-set function");
  if (!domain.has_level_set_boundary()) throw std::invalid_argument("level-set boundary is not tagged");
  for (const auto& [portion, type] : domain.bc_tags) {
    if (portion == BoundaryPortion::LevelSet && type == BcType::StrongDirichlet)
      throw std::invalid_argument("strong Dirichlet conditions need a mesh-fitted boundary portion");
  }

  const double band = 2.0 * mesh.h();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point2 p = mesh.vertices()[v];
    const double value = domain.phi(p);
    if (!std::isfinite(value)) throw std::invalid_argument("phi is not finite at a mesh vertex");
    if (domain.grad_phi && std::abs(value) < band && norm(domain.grad_phi(p)) < 1e-8)
      throw std::invalid_argument("grad phi vanishes near the zero level set");
  }

  for (auto portion : {BoundaryPortion::XMin, BoundaryPortion::XMax, BoundaryPortion::YMin, BoundaryPortion::YMax}) {
    if (domain.tag(portion)) continue;
    const BoxSide side = box_side(portion);
    for (const auto& edge : mesh.boundary_edges()) {
      const int a = edge.vertices[0], b = edge.vertices[1];
      if (!mesh.on_side(a, side) || !mesh.on_side(b, side)) continue;
      if (domain.phi(mesh.vertex(a)) < 0.0 || domain.phi(mesh.vertex(b)) < 0.0)
        throw std::invalid_argument("box side " + to_string(portion) + " touches the domain but is untagged");
    }
  }
}

ImplicitDomain domain_catalog(const std::string& name, const DomainParams& params) {
  ImplicitDomain d;
  d.name = name;
  if (name == "disc") {
    const double r0 = params.radius;
    if (!(r0 > 0.0) || r0 >= 0.55) throw std::invalid_argument("disc radius must lie in (0, 0.55)");
    d.phi = [r0](Point2 p) { return std::hypot(p.x, p.y) - r0; };
    d.grad_phi = [](Point2 p) {
      const double r = std::hypot(p.x, p.y);
      if (r == 0.0) return Point2{0.0, 0.0};
      return Point2{p.x / r, p.y / r};
    };
    d.bc_tags[BoundaryPortion::LevelSet] = params.boundary;
    d.box = {-0.55, 0.55, -0.55, 0.55};
    return d;
  }
  if (name == "box-with-cut-side") {
    const double cx = params.cut_x;
    d.box = {-0.81, 0.81, -0.8, 0.8};
    if (!(cx > d.box.xmin) || !(cx < d.box.xmax)) throw std::invalid_argument("cut plane outside the box");
    d.phi = [cx](Point2 p) { return p.x - cx; };
    d.grad_phi = [](Point2) { return Point2{1.0, 0.0}; };
    d.bc_tags[BoundaryPortion::LevelSet] = BcType::WeakDirichlet;
    d.bc_tags[BoundaryPortion::XMin] = BcType::StrongDirichlet;
    d.bc_tags[BoundaryPortion::YMin] = BcType::Neumann;
    d.bc_tags[BoundaryPortion::YMax] = BcType::Neumann;
    return d;
  }
  throw std::invalid_argument("unknown domain '" + name + "'");
}

double QuadratureRule::measure() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

Point2 from_barycentric(const Triangle& t, double l0, double l1, double l2) {
  return {l0 * t[0].x + l1 * t[1].x + l2 * t[2].x, l0 * t[0].y + l1 * t[1].y + l2 * t[2].y};
}

double triangle_area(const Triangle& t) { return 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0])); }

void append_triangle_rule(const Triangle& t, int degree, QuadratureRule& rule) {
  const double area = triangle_area(t);
  if (area == 0.0) return;
  if (degree <= 2) {
    const double w = area / 3.0;
    rule.points.push_back(from_barycentric(t, 0.5, 0.5, 0.0));
    rule.points.push_back(from_barycentric(t, 0.0, 0.5, 0.5));
    rule.points.push_back(from_barycentric(t, 0.5, 0.0, 0.5));
    rule.weights.insert(rule.weights.end(), {w, w, w});
    return;
  }
  if (degree > 5) throw std::invalid_argument("triangle quadrature degree > 5 not available");
  const double s15 = std::sqrt(15.0);
  const double a = (6.0 - s15) / 21.0;
  const double b = (6.0 + s15) / 21.0;
  const double wa = (155.0 - s15) / 1200.0;
  const double wb = (155.0 + s15) / 1200.0;
  rule.points.push_back(from_barycentric(t, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0));
  rule.weights.push_back(area * 9.0 / 40.0);
  for (const auto& [c, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
    const double d = 1.0 - 2.0 * c;
    rule.points.push_back(from_barycentric(t, d, c, c));
    rule.points.push_back(from_barycentric(t, c, d, c));
    rule.points.push_back(from_barycentric(t, c, c, d));
    rule.weights.insert(rule.weights.end(), {area * w, area * w, area * w});
  }
}

// Polygon of T cap {phi_lin < 0}; at most 4 vertices.
std::vector<Point2> clip_inside(const Triangle& t, const std::array<double, 3>& phi) {
  std::vector<Point2> poly;
  poly.reserve(4);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3;
    const bool in_i = phi[i] < 0.0;
    const bool in_j = phi[j] < 0.0;
    if (in_i) poly.push_back(t[i]);
    if (in_i != in_j) {
      const double s = phi[i] / (phi[i] - phi[j]);
      poly.push_back(t[i] + s * (t[j] - t[i]));
    }
  }
  return poly;
}

Point2 linear_gradient(const Triangle& t, const std::array<double, 3>& phi) {
  const Point2 e1 = t[1] - t[0];
  const Point2 e2 = t[2] - t[0];
  const double det = cross(e1, e2);
  const double d1 = phi[1] - phi[0];
  const double d2 = phi[2] - phi[0];
  return {(d1 * e2.y - d2 * e1.y) / det, (d2 * e1.x - d1 * e2.x) / det};
}

}  // namespace

QuadratureRule triangle_rule(const Triangle& tri, int degree) {
  QuadratureRule rule;
  append_triangle_rule(tri, degree, rule);
  return rule;
}

QuadratureRule segment_rule(Point2 a, Point2 b, int degree) {
  QuadratureRule rule;
  const double len = distance(a, b);
  if (len == 0.0) return rule;
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<std::pair<double, double>> gauss;  // (point on [-1, 1], weight)
  switch (n) {
    case 1: gauss = {{0.0, 2.0}}; break;
    case 2: gauss = {{-1.0 / std::sqrt(3.0), 1.0}, {1.0 / std::sqrt(3.0), 1.0}}; break;
    case 3:
      gauss = {{-std::sqrt(0.6), 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {std::sqrt(0.6), 5.0 / 9.0}};
      break;
    default: throw std::invalid_argument("segment quadrature degree > 5 not available");
  }
  for (const auto& [s, w] : gauss) {
    rule.points.push_back(a + (0.5 * (s + 1.0)) * (b - a));
    rule.weights.push_back(0.5 * w * len);
  }
  return rule;
}

QuadratureRule cut_volume_quadrature(const Triangle& tri, const std::array<double, 3>& phi, int degree) {
  QuadratureRule rule;
  if (phi[0] < 0.0 && phi[1] < 0.0 && phi[2] < 0.0) {
    append_triangle_rule(tri, degree, rule);
    return rule;
  }
  const auto poly = clip_inside(tri, phi);
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) append_triangle_rule({poly[0], poly[i], poly[i + 1]}, degree, rule);
  return rule;
}

QuadratureRule cut_volume_quadrature(const Triangle& tri, const ImplicitDomain& domain, int degree) {
  return cut_volume_quadrature(tri, {domain(tri[0]), domain(tri[1]), domain(tri[2])}, degree);
}

double cut_area(const Triangle& tri, const std::array<double, 3>& phi) {
  if (phi[0] < 0.0 && phi[1] < 0.0 && phi[2] < 0.0) return triangle_area(tri);
  const auto poly = clip_inside(tri, phi);
  double area = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) area += triangle_area({poly[0], poly[i], poly[i + 1]});
  return area;
}

QuadratureRule cut_boundary_quadrature(const Triangle& tri, const std::array<double, 3>& phi, int degree) {
  std::vector<Point2> crossings;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3;
    if ((phi[i] < 0.0) != (phi[j] < 0.0)) {
      const double s = phi[i] / (phi[i] - phi[j]);
      crossings.push_back(tri[i] + s * (tri[j] - tri[i]));
    }
  }
  if (crossings.size() != 2) return {};
  const Point2 g = linear_gradient(tri, phi);
  const double gn = norm(g);
  if (gn == 0.0) return {};
  QuadratureRule rule = segment_rule(crossings[0], crossings[1], degree);
  rule.normals.assign(rule.size(), Point2{g.x / gn, g.y / gn});
  return rule;
}

QuadratureRule cut_boundary_quadrature(const Triangle& tri, const ImplicitDomain& domain, int degree) {
  return cut_boundary_quadrature(tri, {domain(tri[0]), domain(tri[1]), domain(tri[2])}, degree);
}

QuadratureRule clipped_segment_quadrature(Point2 a, Point2 b, double phi_a, double phi_b, Point2 normal,
                                          int degree) {
  const bool in_a = phi_a < 0.0;
  const bool in_b = phi_b < 0.0;
  if (!in_a && !in_b) return {};
  Point2 p = a, q = b;
  if (in_a != in_b) {
    const Point2 c = a + (phi_a / (phi_a - phi_b)) * (b - a);
    if (in_a)
      q = c;
    else
      p = c;
  }
  QuadratureRule rule = segment_rule(p, q, degree);
  rule.normals.assign(rule.size(), normal);
  return rule;
}

std::array<double, 3> vertex_phi(const BackgroundMesh& mesh, const ImplicitDomain& domain, int e) {
  const auto& t = mesh.element(e);
  return {domain(mesh.vertex(t[0])), domain(mesh.vertex(t[1])), domain(mesh.vertex(t[2]))};
}

Classification classify(const BackgroundMesh& mesh, const ImplicitDomain& domain, double c_large, InteriorRule rule) {
  const double h = mesh.h();
  double min_area = std::numeric_limits<double>::max();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) min_area = std::min(min_area, mesh.area(static_cast<int>(e)));
  if (!(c_large > 0.0) || !(c_large * h * h < min_area))
    throw std::invalid_argument("c_large must lie in (0, min |T| / h^2)");

  Classification cls;
  cls.c_large = c_large;
  cls.rule = rule;
  const auto ne = static_cast<int>(mesh.num_elements());
  cls.label.assign(mesh.num_elements(), ElementLabel::Outside);
  cls.cut_area.assign(mesh.num_elements(), 0.0);
  for (int e = 0; e < ne; ++e) {
    const auto phi = vertex_phi(mesh, domain, e);
    const double area = cut_area(mesh.element_coords(e), phi);
    cls.cut_area[static_cast<std::size_t>(e)] = area;
    if (!(area > 0.0)) continue;
    const bool inside = phi[0] < 0.0 && phi[1] < 0.0 && phi[2] < 0.0;
    const bool large = rule == InteriorRule::FullyInside ? inside : (inside || area >= c_large * h * h);
    cls.label[static_cast<std::size_t>(e)] = large ? ElementLabel::Large : ElementLabel::Small;
    cls.active.push_back(e);
    if (large) cls.large.push_back(e);
  }
  if (cls.large.empty()) throw std::runtime_error("domain unresolved by mesh");
  return cls;
}

}  // namespace cutwave
