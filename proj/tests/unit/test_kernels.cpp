#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <cstring>
#include <random>

#include <omp.h>

#include "cutwave/kernels.hpp"
#include "cutwave/studies.hpp"

using namespace cutwave;

namespace {

const Level& level() {
  static const Level l = make_level(domain_catalog("disc"), 0.02);
  return l;
}

Vector random(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace

TEST_CASE("serial spmv matches Eigen") {
  const SparseMatrix& a = level().system.stiffness;
  const Vector x = random(static_cast<int>(a.cols()), 1);
  Vector y(a.rows());
  serial::spmv(csr_view(a), as_span(x), as_span(y));
  CHECK((y - a * x).cwiseAbs().maxCoeff() < 1e-12 * (a * x).cwiseAbs().maxCoeff());
}

TEST_CASE("parallel kernels are bitwise identical to the serial ones") {
  const SparseMatrix& a = level().system.stiffness;
  const CsrView csr = csr_view(a);
  const int n = csr.rows;
  const Vector x = random(n, 2), prev = random(n, 3), f = random(n, 4);
  const Vector inv_mass = level().system.lumped.diagonal.cwiseInverse();
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    Vector ys(n), yp(n);
    serial::spmv(csr, as_span(x), as_span(ys));
    parallel::spmv(csr, as_span(x), as_span(yp));
    CHECK(bitwise_equal(ys, yp));

    const double ds = serial::dot(as_span(x), as_span(prev));
    const double dp = parallel::dot(as_span(x), as_span(prev));
    CHECK(std::memcmp(&ds, &dp, sizeof(double)) == 0);

    for (bool forcing : {false, true}) {
      Vector ns(n), np(n);
      const std::span<const double> fs = forcing ? as_span(f) : std::span<const double>{};
      serial::leapfrog_update(csr, as_span(inv_mass), 1e-6, as_span(prev), as_span(x), fs, as_span(ns));
      parallel::leapfrog_update(csr, as_span(inv_mass), 1e-6, as_span(prev), as_span(x), fs, as_span(np));
      CHECK(bitwise_equal(ns, np));
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("leapfrog update formula") {
  const SparseMatrix& a = level().system.stiffness;
  const int n = static_cast<int>(a.rows());
  const Vector x = random(n, 5), prev = random(n, 6), f = random(n, 7);
  const Vector inv_mass = level().system.lumped.diagonal.cwiseInverse();
  const double k2 = 2.5e-5;
  Vector next(n);
  leapfrog_update(csr_view(a), as_span(inv_mass), k2, as_span(prev), as_span(x), as_span(f), as_span(next));
  const Vector ref = 2.0 * x - prev - k2 * inv_mass.cwiseProduct(a * x) + k2 * f;
  CHECK((next - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dot product") {
  const Vector x = random(10001, 8), y = random(10001, 9);
  CHECK(dot(as_span(x), as_span(y)) == doctest::Approx(x.dot(y)).epsilon(1e-12));
  const Vector empty;
  CHECK(dot(as_span(empty), as_span(empty)) == 0.0);
  CHECK_THROWS_AS(dot(as_span(x), as_span(empty)), std::invalid_argument);
}

TEST_CASE("dispatch switch") {
  set_parallel_kernels(false);
  CHECK_FALSE(parallel_kernels_enabled());
  set_parallel_kernels(true);
  CHECK(parallel_kernels_enabled());
}

TEST_CASE("CUTWAVE_THREADS caps the thread count") {
  const int saved = omp_get_max_threads();
  setenv("CUTWAVE_THREADS", "1", 1);
  CHECK(configure_threads_from_env() == 1);
  setenv("CUTWAVE_THREADS", "2", 1);
  const int t = configure_threads_from_env();
  CHECK(t >= 1);
  CHECK(t <= 2);
  unsetenv("CUTWAVE_THREADS");
  omp_set_num_threads(saved);
}

TEST_CASE("csr view requires a compressed matrix") {
  SparseMatrix m(3, 3);
  m.reserve(Eigen::VectorXi::Constant(3, 2));
  m.insert(0, 0) = 1.0;
  CHECK_THROWS_AS(csr_view(m), std::invalid_argument);
  m.makeCompressed();
  const CsrView v = csr_view(m);
  CHECK(v.rows == 3);
  CHECK(v.values.size() == 1);
}
