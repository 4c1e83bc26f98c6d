#pragma once

// Hot loops of the explicit scheme. Each kernel exists in a serial reference
// form and an OpenMP form; both produce bitwise-identical results (rows are
// owned by one thread, reductions are blocked with a thread-count-independent
// partition and combined in a fixed order).

#include <cstddef>
#include <span>

#include <Eigen/SparseCore>

namespace cutwave {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Vector = Eigen::VectorXd;

/// Non-owning view of a compressed row-major matrix.
struct CsrView {
  int rows = 0;
  int cols = 0;
  std::span<const int> row_ptr;
  std::span<const int> col_idx;
  std::span<const double> values;
};

/// Requires a compressed matrix.
CsrView csr_view(const SparseMatrix& m);

namespace serial {

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);

/// next = 2 curr - prev - k^2 (A curr) / mass + k^2 forcing; forcing may be empty.
void leapfrog_update(const CsrView& a, std::span<const double> inv_mass, double k2, std::span<const double> prev,
                     std::span<const double> curr, std::span<const double> forcing, std::span<double> next);

}  // namespace serial

namespace parallel {

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void leapfrog_update(const CsrView& a, std::span<const double> inv_mass, double k2, std::span<const double> prev,
                     std::span<const double> curr, std::span<const double> forcing, std::span<double> next);

}  // namespace parallel

/// Dispatch to the OpenMP kernels unless disabled with
/// set_parallel_kernels(false).
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void leapfrog_update(const CsrView& a, std::span<const double> inv_mass, double k2, std::span<const double> prev,
                     std::span<const double> curr, std::span<const double> forcing, std::span<double> next);

void set_parallel_kernels(bool enabled);
bool parallel_kernels_enabled();

/// Applies the CUTWAVE_THREADS cap, if set. Returns the thread count in use.
int configure_threads_from_env();
int max_threads();

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace cutwave
