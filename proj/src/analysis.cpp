#include "cutwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace cutwave {

namespace {

constexpr int kErrorDegree = 5;

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10e", v);
  return buf;
}

Vector random_vector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

double quadratic_form(const SparseMatrix& m, const Vector& v) { return v.dot(m * v); }

}  // namespace

double l2_error(const Discretization& d, const Vector& interior_coeffs, const ScalarField& exact, double t) {
  const Vector full = d.ext.apply(interior_coeffs);
  double sum = 0.0;
  for (int e : d.cls.active) {
    const P1Element fe(d.mesh->element_coords(e));
    const auto dofs = d.element_dofs(e);
    const auto rule = d.volume_rule(e, kErrorDegree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = fe.values(rule.points[q]);
      const double uh = phi[0] * full[dofs[0]] + phi[1] * full[dofs[1]] + phi[2] * full[dofs[2]];
      const double diff = uh - exact(rule.points[q], t);
      sum += rule.weights[q] * diff * diff;
    }
  }
  return std::sqrt(sum);
}

double h1_error(const Discretization& d, const Vector& interior_coeffs, const GradientField& exact_grad, double t) {
  const Vector full = d.ext.apply(interior_coeffs);
  double sum = 0.0;
  for (int e : d.cls.active) {
    const P1Element fe(d.mesh->element_coords(e));
    const auto dofs = d.element_dofs(e);
    Point2 grad{0.0, 0.0};
    for (std::size_t a = 0; a < 3; ++a) grad = grad + full[dofs[a]] * fe.grads[a];
    const auto rule = d.volume_rule(e, kErrorDegree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 diff = grad - exact_grad(rule.points[q], t);
      sum += rule.weights[q] * dot(diff, diff);
    }
  }
  return std::sqrt(sum);
}

SparseMatrix region_mass_matrix(const Discretization& d, Region region) {
  std::vector<Eigen::Triplet<double>> triplets;
  const auto& elements = region == Region::WholeLarge ? d.cls.large : d.cls.active;
  for (int e : elements) {
    const auto dofs = d.element_dofs(e);
    const auto tri = d.mesh->element_coords(e);
    const auto rule = region == Region::Cut ? d.volume_rule(e, 2) : triangle_rule(tri, 2);
    const P1Element fe(tri);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = fe.values(rule.points[q]);
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) triplets.emplace_back(dofs[a], dofs[b], rule.weights[q] * phi[a] * phi[b]);
    }
  }
  SparseMatrix m(d.num_full(), d.num_full());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

SparseMatrix region_gradient_matrix(const Discretization& d, Region region) {
  std::vector<Eigen::Triplet<double>> triplets;
  const auto& elements = region == Region::WholeLarge ? d.cls.large : d.cls.active;
  for (int e : elements) {
    const auto dofs = d.element_dofs(e);
    const P1Element fe(d.mesh->element_coords(e));
    const double area = region == Region::Cut ? d.cls.cut_area[static_cast<std::size_t>(e)] : d.mesh->area(e);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) triplets.emplace_back(dofs[a], dofs[b], area * dot(fe.grads[a], fe.grads[b]));
  }
  SparseMatrix m(d.num_full(), d.num_full());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

double l2_norm_full(const Discretization& d, const Vector& full_coeffs) {
  return std::sqrt(std::max(0.0, quadratic_form(region_mass_matrix(d, Region::Cut), full_coeffs)));
}

double h1_seminorm_full(const Discretization& d, const Vector& full_coeffs) {
  return std::sqrt(std::max(0.0, quadratic_form(region_gradient_matrix(d, Region::Cut), full_coeffs)));
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2) throw std::invalid_argument("eoc: need >= 2 matching entries");
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i - 1] > 0.0) || !(hs[i - 1] > 0.0) || !(hs[i] > 0.0) || errors[i] < 0.0)
      throw std::invalid_argument("eoc: entries must be positive");
    if (errors[i] == 0.0) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    out.push_back(std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]));
  }
  return out;
}

void ErrorReport::add(double h, double k, double l2, double h1) {
  ErrorRow row{h, k, l2, h1, std::nullopt, std::nullopt, std::nullopt, 0.0};
  if (!rows.empty()) {
    const ErrorRow& prev = rows.back();
    row.eoc_l2 = eoc({prev.l2, l2}, {prev.h, h}).front();
    row.eoc_h1 = eoc({prev.h1, h1}, {prev.h, h}).front();
  }
  rows.push_back(row);
}

std::string ErrorReport::to_csv(bool with_extras) const {
  std::ostringstream out;
  out << "h,k,l2,h1,eoc_l2,eoc_h1";
  if (with_extras) out << ",velocity_l2,energy_drift";
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.h) << ',' << format_double(r.k) << ',' << format_double(r.l2) << ','
        << format_double(r.h1) << ',' << (r.eoc_l2 ? format_double(*r.eoc_l2) : "") << ','
        << (r.eoc_h1 ? format_double(*r.eoc_h1) : "");
    if (with_extras)
      out << ',' << (r.velocity_l2 ? format_double(*r.velocity_l2) : "") << ','
          << (r.energy_drift ? format_double(*r.energy_drift) : "");
    out << '\n';
  }
  return out.str();
}

LumpingStudyResult lumping_error_study(const Discretization& d, const SystemMatrices& s, int n_samples,
                                       std::uint64_t seed) {
  const SparseMatrix grad_full = region_gradient_matrix(d, Region::Cut);
  const SparseMatrix grad = reduce(d.ext, grad_full);
  const double h2 = d.h() * d.h();
  std::mt19937_64 rng(seed);
  LumpingStudyResult result;
  result.h = d.h();
  result.seed = seed;
  result.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const Vector v = random_vector(rng, d.num_interior());
    const Vector w = random_vector(rng, d.num_interior());
    const double defect = std::abs(v.dot(s.lumped.defect * w));
    const double denom = h2 * std::sqrt(quadratic_form(grad, v)) * std::sqrt(quadratic_form(grad, w));
    result.max_ratio = std::max(result.max_ratio, defect / denom);
  }
  return result;
}

double dense_min_eigenvalue(const SparseMatrix& m) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double dense_max_eigenvalue(const SparseMatrix& m) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

GraphLaplacianReport graph_laplacian_check(const LumpedMass& lumped, const SparseMatrix& reduced_mass,
                                           int dense_limit) {
  GraphLaplacianReport r;
  const SparseMatrix& b = lumped.defect;
  double max_entry = 0.0;
  for (int row = 0; row < b.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(b, row); it; ++it) max_entry = std::max(max_entry, std::abs(it.value()));
  for (int row = 0; row < b.outerSize(); ++row) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(b, row); it; ++it) sum += it.value();
    r.max_row_sum = std::max(r.max_row_sum, max_entry > 0.0 ? std::abs(sum) / max_entry : std::abs(sum));
  }
  const SparseMatrix bt = b.transpose();
  const SparseMatrix diff = b - bt;
  for (int row = 0; row < diff.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(diff, row); it; ++it) r.max_asymmetry = std::max(r.max_asymmetry, std::abs(it.value()));

  r.min_off_diagonal_mass = std::numeric_limits<double>::max();
  for (int row = 0; row < reduced_mass.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(reduced_mass, row); it; ++it) {
      if (it.col() == row) continue;
      r.min_off_diagonal_mass = std::min(r.min_off_diagonal_mass, it.value());
      if (it.value() < 0.0) ++r.negative_mass_entries;
    }
  r.min_lumped_mass = lumped.diagonal.minCoeff();
  if (b.rows() <= dense_limit) r.min_eigenvalue = dense_min_eigenvalue(b);
  r.passed = r.max_row_sum <= 1e-12 && r.max_asymmetry == 0.0 && r.min_lumped_mass > 0.0;
  return r;
}

ExtensionStabilityRow extension_stability(const Discretization& d, int n_samples, std::uint64_t seed) {
  const SparseMatrix mass_all = region_mass_matrix(d, Region::WholeActive);
  const SparseMatrix mass_large = region_mass_matrix(d, Region::WholeLarge);
  const SparseMatrix grad_all = region_gradient_matrix(d, Region::WholeActive);
  const SparseMatrix grad_large = region_gradient_matrix(d, Region::WholeLarge);
  std::mt19937_64 rng(seed);
  ExtensionStabilityRow row;
  row.h = d.h();
  for (int i = 0; i < n_samples; ++i) {
    const Vector v = random_vector(rng, d.num_interior());
    const Vector ev = d.ext.apply(v);
    const double l2 = std::sqrt(quadratic_form(mass_all, ev) / quadratic_form(mass_large, ev));
    const double h1 = std::sqrt(quadratic_form(grad_all, ev) / quadratic_form(grad_large, ev));
    row.max_ratio_l2 = std::max(row.max_ratio_l2, l2);
    row.max_ratio_h1 = std::max(row.max_ratio_h1, h1);
  }
  return row;
}

std::vector<ExtensionStabilityRow> extension_stability_study(const std::vector<const Discretization*>& levels,
                                                             int n_samples, std::uint64_t seed) {
  std::vector<ExtensionStabilityRow> rows;
  for (const auto* d : levels) rows.push_back(extension_stability(*d, n_samples, seed));
  return rows;
}

}  // namespace cutwave
