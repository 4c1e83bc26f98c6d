#include "cutwave/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cutwave {

namespace {

// Fixed reduction block; partial sums are combined in block order.
constexpr std::size_t kDotBlock = 2048;

std::atomic<bool> g_parallel{true};

inline double row_product(const CsrView& a, std::span<const double> x, int row) {
  double s = 0.0;
  for (int p = a.row_ptr[static_cast<std::size_t>(row)]; p < a.row_ptr[static_cast<std::size_t>(row) + 1]; ++p)
    s += a.values[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(a.col_idx[static_cast<std::size_t>(p)])];
  return s;
}

inline double block_dot(std::span<const double> x, std::span<const double> y, std::size_t b) {
  const std::size_t begin = b * kDotBlock;
  const std::size_t end = std::min(x.size(), begin + kDotBlock);
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += x[i] * y[i];
  return s;
}

inline double leapfrog_row(const CsrView& a, std::span<const double> inv_mass, double k2,
                           std::span<const double> prev, std::span<const double> curr,
                           std::span<const double> forcing, int row) {
  const auto i = static_cast<std::size_t>(row);
  double v = 2.0 * curr[i] - prev[i] - k2 * row_product(a, curr, row) * inv_mass[i];
  if (!forcing.empty()) v += k2 * forcing[i];
  return v;
}

void check_sizes(const CsrView& a, std::size_t x, std::size_t y) {
  if (x != static_cast<std::size_t>(a.cols) || y != static_cast<std::size_t>(a.rows))
    throw std::invalid_argument("spmv: dimension mismatch");
}

}  // namespace

CsrView csr_view(const SparseMatrix& m) {
  if (!m.isCompressed()) throw std::invalid_argument("csr_view: matrix must be compressed");
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto nnz = static_cast<std::size_t>(m.nonZeros());
  return {static_cast<int>(m.rows()), static_cast<int>(m.cols()), {m.outerIndexPtr(), rows + 1},
          {m.innerIndexPtr(), nnz}, {m.valuePtr(), nnz}};
}

namespace serial {

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  check_sizes(a, x.size(), y.size());
  for (int r = 0; r < a.rows; ++r) y[static_cast<std::size_t>(r)] = row_product(a, x, r);
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  const std::size_t blocks = (x.size() + kDotBlock - 1) / kDotBlock;
  double s = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) s += block_dot(x, y, b);
  return s;
}

void leapfrog_update(const CsrView& a, std::span<const double> inv_mass, double k2, std::span<const double> prev,
                     std::span<const double> curr, std::span<const double> forcing, std::span<double> next) {
  check_sizes(a, curr.size(), next.size());
  for (int r = 0; r < a.rows; ++r)
    next[static_cast<std::size_t>(r)] = leapfrog_row(a, inv_mass, k2, prev, curr, forcing, r);
}

}  // namespace serial

namespace parallel {

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  check_sizes(a, x.size(), y.size());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < a.rows; ++r) y[static_cast<std::size_t>(r)] = row_product(a, x, r);
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  const std::size_t blocks = (x.size() + kDotBlock - 1) / kDotBlock;
  if (blocks <= 1) return serial::dot(x, y);
  std::vector<double> partial(blocks);
  const auto nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < nb; ++b) partial[static_cast<std::size_t>(b)] = block_dot(x, y, static_cast<std::size_t>(b));
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void leapfrog_update(const CsrView& a, std::span<const double> inv_mass, double k2, std::span<const double> prev,
                     std::span<const double> curr, std::span<const double> forcing, std::span<double> next) {
  check_sizes(a, curr.size(), next.size());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < a.rows; ++r)
    next[static_cast<std::size_t>(r)] = leapfrog_row(a, inv_mass, k2, prev, curr, forcing, r);
}

}  // namespace parallel

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  g_parallel ? parallel::spmv(a, x, y) : serial::spmv(a, x, y);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return g_parallel ? parallel::dot(x, y) : serial::dot(x, y);
}

void leapfrog_update(const CsrView& a, std::span<const double> inv_mass, double k2, std::span<const double> prev,
                     std::span<const double> curr, std::span<const double> forcing, std::span<double> next) {
  g_parallel ? parallel::leapfrog_update(a, inv_mass, k2, prev, curr, forcing, next)
             : serial::leapfrog_update(a, inv_mass, k2, prev, curr, forcing, next);
}

void set_parallel_kernels(bool enabled) { g_parallel = enabled; }
bool parallel_kernels_enabled() { return g_parallel; }

int configure_threads_from_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("CUTWAVE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_num_procs()));
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace cutwave
