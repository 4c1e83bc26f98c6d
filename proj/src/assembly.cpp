#include "cutwave/assembly.hpp"

#include <algorithm>
#include <stdexcept>

namespace cutwave {

namespace {

using ElementMatrix = std::array<double, 9>;

Point2 outward_normal(BoxSide side) {
  switch (side) {
    case BoxSide::XMin: return {-1.0, 0.0};
    case BoxSide::XMax: return {1.0, 0.0};
    case BoxSide::YMin: return {0.0, -1.0};
    case BoxSide::YMax: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

void append(QuadratureRule& into, const QuadratureRule& from) {
  into.points.insert(into.points.end(), from.points.begin(), from.points.end());
  into.weights.insert(into.weights.end(), from.weights.begin(), from.weights.end());
  into.normals.insert(into.normals.end(), from.normals.begin(), from.normals.end());
}

// Element loop computing local matrices in parallel and scattering them in
// element order, so the result does not depend on the thread count.
template <typename Local>
SparseMatrix assemble_matrix(const Discretization& d, Local&& local) {
  const auto& active = d.cls.active;
  const auto n = static_cast<long>(active.size());
  std::vector<ElementMatrix> locals(active.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) locals[static_cast<std::size_t>(i)] = local(active[static_cast<std::size_t>(i)]);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto dofs = d.element_dofs(active[i]);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        const double v = locals[i][3 * a + b];
        if (v != 0.0) triplets.emplace_back(dofs[a], dofs[b], v);
      }
  }
  SparseMatrix m(d.num_full(), d.num_full());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

Point2 Discretization::full_node(int full) const {
  return mesh->vertex(ext.nodes.full_to_vertex[static_cast<std::size_t>(full)]);
}

Point2 Discretization::interior_node(int i) const {
  return full_node(ext.nodes.interior_to_full[static_cast<std::size_t>(i)]);
}

std::array<int, 3> Discretization::element_dofs(int e) const {
  const auto& t = mesh->element(e);
  return {ext.nodes.vertex_to_full[static_cast<std::size_t>(t[0])],
          ext.nodes.vertex_to_full[static_cast<std::size_t>(t[1])],
          ext.nodes.vertex_to_full[static_cast<std::size_t>(t[2])]};
}

QuadratureRule Discretization::volume_rule(int e, int degree) const {
  return cut_volume_quadrature(mesh->element_coords(e), vertex_phi(*mesh, domain, e), degree);
}

namespace {

QuadratureRule collect_boundary(const Discretization& d, int e, int degree, bool nitsche_only) {
  QuadratureRule rule;
  const auto level_tag = d.domain.tag(BoundaryPortion::LevelSet);
  const auto phi = vertex_phi(*d.mesh, d.domain, e);
  if (level_tag && (!nitsche_only || *level_tag == BcType::WeakDirichlet))
    append(rule, cut_boundary_quadrature(d.mesh->element_coords(e), phi, degree));

  const auto& t = d.mesh->element(e);
  for (auto portion : {BoundaryPortion::XMin, BoundaryPortion::XMax, BoundaryPortion::YMin, BoundaryPortion::YMax}) {
    const auto tag = d.domain.tag(portion);
    if (!tag || (nitsche_only && *tag != BcType::WeakDirichlet)) continue;
    const BoxSide side = box_side(portion);
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t l = (k + 1) % 3;
      if (!d.mesh->on_side(t[k], side) || !d.mesh->on_side(t[l], side)) continue;
      append(rule, clipped_segment_quadrature(d.mesh->vertex(t[k]), d.mesh->vertex(t[l]), phi[k], phi[l],
                                              outward_normal(side), degree));
    }
  }
  return rule;
}

}  // namespace

QuadratureRule Discretization::nitsche_rule(int e, int degree) const { return collect_boundary(*this, e, degree, true); }

QuadratureRule Discretization::boundary_rule(int e, int degree) const {
  return collect_boundary(*this, e, degree, false);
}

std::shared_ptr<Discretization> make_discretization(std::shared_ptr<const BackgroundMesh> mesh,
                                                    ImplicitDomain domain, const DiscretizationParams& params) {
  if (!(params.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  validate_domain(domain, *mesh);
  auto d = std::make_shared<Discretization>();
  d->mesh = std::move(mesh);
  d->domain = std::move(domain);
  d->params = params;
  d->cls = classify(*d->mesh, d->domain, params.c_large, params.interior_rule);
  d->ext = build_extension(*d->mesh, d->cls, params.weights);

  for (const auto& [portion, type] : d->domain.bc_tags) {
    if (type != BcType::StrongDirichlet) continue;
    const BoxSide side = box_side(portion);
    for (int i = 0; i < d->num_interior(); ++i) {
      const int v = d->ext.nodes.full_to_vertex[static_cast<std::size_t>(d->ext.nodes.interior_to_full[static_cast<std::size_t>(i)])];
      if (d->mesh->on_side(v, side) && d->domain(d->mesh->vertex(v)) < 0.0) d->strong_dirichlet.push_back(i);
    }
  }
  std::sort(d->strong_dirichlet.begin(), d->strong_dirichlet.end());
  d->strong_dirichlet.erase(std::unique(d->strong_dirichlet.begin(), d->strong_dirichlet.end()),
                            d->strong_dirichlet.end());
  return d;
}

P1Element::P1Element(const Triangle& t) : tri(t) {
  const Point2 e1 = tri[1] - tri[0];
  const Point2 e2 = tri[2] - tri[0];
  det = cross(e1, e2);
  grads[1] = {e2.y / det, -e2.x / det};
  grads[2] = {-e1.y / det, e1.x / det};
  grads[0] = {-grads[1].x - grads[2].x, -grads[1].y - grads[2].y};
}

std::array<double, 3> P1Element::values(Point2 p) const {
  const double l1 = cross(p - tri[0], tri[2] - tri[0]) / det;
  const double l2 = cross(tri[1] - tri[0], p - tri[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

SparseMatrix assemble_mass(const Discretization& d) {
  return assemble_matrix(d, [&](int e) {
    const P1Element fe(d.mesh->element_coords(e));
    const auto rule = d.volume_rule(e, d.params.degree);
    ElementMatrix m{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = fe.values(rule.points[q]);
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) m[3 * a + b] += rule.weights[q] * phi[a] * phi[b];
    }
    return m;
  });
}

SparseMatrix assemble_stiffness(const Discretization& d, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double penalty = gamma / d.h();
  return assemble_matrix(d, [&](int e) {
    const P1Element fe(d.mesh->element_coords(e));
    ElementMatrix m{};
    const double area = d.cls.cut_area[static_cast<std::size_t>(e)];
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) m[3 * a + b] = area * dot(fe.grads[a], fe.grads[b]);

    const auto rule = d.nitsche_rule(e, d.params.degree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = fe.values(rule.points[q]);
      const Point2 n = rule.normals[q];
      const double w = rule.weights[q];
      std::array<double, 3> dn{};
      for (std::size_t a = 0; a < 3; ++a) dn[a] = dot(fe.grads[a], n);
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          m[3 * a + b] += w * (-dn[b] * phi[a] - phi[b] * dn[a] + penalty * phi[a] * phi[b]);
    }
    return m;
  });
}

SparseMatrix assemble_stiffness(const Discretization& d) { return assemble_stiffness(d, d.params.gamma); }

Vector assemble_load(const Discretization& d, const ScalarField& f, double t, int degree) {
  Vector b = Vector::Zero(d.num_full());
  for (int e : d.cls.active) {
    const P1Element fe(d.mesh->element_coords(e));
    const auto rule = d.volume_rule(e, degree);
    const auto dofs = d.element_dofs(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = fe.values(rule.points[q]);
      const double fq = f(rule.points[q], t) * rule.weights[q];
      for (std::size_t a = 0; a < 3; ++a) b[dofs[a]] += fq * phi[a];
    }
  }
  return b;
}

Vector interior_nodal_values(const Discretization& d, const ScalarField& f, double t) {
  Vector v(d.num_interior());
  for (int i = 0; i < d.num_interior(); ++i) v[i] = f(d.interior_node(i), t);
  return v;
}

Vector full_nodal_values(const Discretization& d, const ScalarField& f, double t) {
  Vector v(d.num_full());
  for (int i = 0; i < d.num_full(); ++i) v[i] = f(d.full_node(i), t);
  return v;
}

SparseMatrix reduce(const ExtensionOperator& ext, const SparseMatrix& full) {
  if (full.rows() != ext.matrix.rows() || full.cols() != ext.matrix.rows())
    throw std::invalid_argument("reduce: dimension mismatch");
  const SparseMatrix et = ext.matrix.transpose();
  const SparseMatrix product = et * (full * ext.matrix);
  const SparseMatrix product_t = product.transpose();
  SparseMatrix sym = 0.5 * (product + product_t);
  sym.makeCompressed();
  return sym;
}

Vector reduce(const ExtensionOperator& ext, const Vector& full) {
  if (full.size() != ext.matrix.rows()) throw std::invalid_argument("reduce: dimension mismatch");
  return ext.matrix.transpose() * full;
}

LumpedMass lump(const SparseMatrix& reduced_mass) {
  LumpedMass out;
  const auto n = reduced_mass.rows();
  out.diagonal = Vector::Zero(n);
  for (int r = 0; r < reduced_mass.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(reduced_mass, r); it; ++it) out.diagonal[r] += it.value();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(out.diagonal[i] > 0.0)) throw std::runtime_error("lumping produced non-positive mass");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(reduced_mass.nonZeros() + n));
  for (int r = 0; r < reduced_mass.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(reduced_mass, r); it; ++it)
      if (it.col() != r) triplets.emplace_back(r, it.col(), -it.value());
  // The diagonal is formed so that each row of the defect sums to zero in the
  // same order the row sum was accumulated.
  for (int r = 0; r < reduced_mass.outerSize(); ++r) {
    double off = 0.0;
    for (SparseMatrix::InnerIterator it(reduced_mass, r); it; ++it)
      if (it.col() != r) off += it.value();
    triplets.emplace_back(r, r, off);
  }
  out.defect.resize(n, n);
  out.defect.setFromTriplets(triplets.begin(), triplets.end());
  out.defect.makeCompressed();
  return out;
}

SystemMatrices assemble_system(const Discretization& d) {
  SystemMatrices s;
  s.gamma = d.params.gamma;
  s.mass_full = assemble_mass(d);
  s.stiffness_full = assemble_stiffness(d);
  s.mass = reduce(d.ext, s.mass_full);
  s.stiffness = reduce(d.ext, s.stiffness_full);
  s.lumped = lump(s.mass);
  return s;
}

}  // namespace cutwave
