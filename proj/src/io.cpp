#include "cutwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cutwave::io {

std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_mesh_vtk(std::ostream& out, const BackgroundMesh& mesh) {
  out << "# vtk DataFile Version 3.0\nbackground mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices()) out << format_exact(p.x) << ' ' << format_exact(p.y) << " 0\n";
  out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) out << "5\n";
}

void write_field_vtk(std::ostream& out, const Discretization& d, const Vector& interior_values,
                     const std::string& field_name, double time) {
  if (interior_values.size() != d.num_interior()) throw std::invalid_argument("write_field_vtk: size mismatch");
  const Vector full = d.ext.apply(interior_values);
  const auto& active = d.cls.active;
  out << "# vtk DataFile Version 3.0\n" << field_name << " t=" << format_exact(time) << "\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << d.num_full() << " double\n";
  for (int i = 0; i < d.num_full(); ++i) {
    const Point2 p = d.full_node(i);
    out << format_exact(p.x) << ' ' << format_exact(p.y) << " 0\n";
  }
  out << "CELLS " << active.size() << ' ' << 4 * active.size() << '\n';
  for (int e : active) {
    const auto dofs = d.element_dofs(e);
    out << "3 " << dofs[0] << ' ' << dofs[1] << ' ' << dofs[2] << '\n';
  }
  out << "CELL_TYPES " << active.size() << '\n';
  for (std::size_t i = 0; i < active.size(); ++i) out << "5\n";
  out << "CELL_DATA " << active.size() << "\nSCALARS label int 1\nLOOKUP_TABLE default\n";
  for (int e : active) out << (d.cls.is_large(e) ? 0 : 1) << '\n';
  out << "POINT_DATA " << d.num_full() << "\nSCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < d.num_full(); ++i) out << format_exact(full[i]) << '\n';
}

void write_field_vtk(const std::filesystem::path& path, const Discretization& d, const Vector& interior_values,
                     const std::string& field_name, double time) {
  auto out = open(path);
  write_field_vtk(out, d, interior_values, field_name, time);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      out << r + 1 << ' ' << it.col() + 1 << ' ' << format_exact(it.value()) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  auto out = open(path);
  write_matrix_market(out, m);
}

std::string log_to_csv(const std::vector<LogRow>& rows) {
  bool any_l2 = false, any_h1 = false;
  for (const auto& r : rows) {
    any_l2 = any_l2 || r.l2.has_value();
    any_h1 = any_h1 || r.h1.has_value();
  }
  std::ostringstream out;
  out << "n,t,energy";
  if (any_l2) out << ",l2";
  if (any_h1) out << ",h1";
  out << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << format_exact(r.t) << ',' << format_exact(r.energy);
    if (any_l2) out << ',' << (r.l2 ? format_exact(*r.l2) : "");
    if (any_h1) out << ',' << (r.h1 ? format_exact(*r.h1) : "");
    out << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open(path);
  out << text;
}

}  // namespace cutwave::io
