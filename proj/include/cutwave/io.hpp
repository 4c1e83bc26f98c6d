#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cutwave/assembly.hpp"
#include "cutwave/mesh.hpp"
#include "cutwave/solver.hpp"

namespace cutwave::io {

/// Legacy VTK ASCII unstructured grid of the whole background mesh.
void write_mesh_vtk(std::ostream& out, const BackgroundMesh& mesh);

/// Legacy VTK ASCII unstructured grid of the active mesh with the extended
/// field as point data (one value per active node, full numbering) and the
/// element label as cell data (0 Large, 1 Small).
void write_field_vtk(std::ostream& out, const Discretization& d, const Vector& interior_values,
                     const std::string& field_name = "u", double time = 0.0);
void write_field_vtk(const std::filesystem::path& path, const Discretization& d, const Vector& interior_values,
                     const std::string& field_name = "u", double time = 0.0);

/// Matrix Market coordinate real general, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

/// CSV n,t,energy[,l2,h1].
std::string log_to_csv(const std::vector<LogRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

/// %.17g.
std::string format_exact(double v);

}  // namespace cutwave::io
