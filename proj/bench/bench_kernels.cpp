// Serial reference kernels against their OpenMP counterparts on the disc
// stiffness matrix. Thread count follows CUTWAVE_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "cutwave/studies.hpp"

namespace {

using namespace cutwave;

struct Problem {
  Level level;
  CsrView csr;
  Vector x, y, prev, inv_mass;
};

const Problem& problem(int refinement) {
  static std::map<int, std::unique_ptr<Problem>> cache;
  auto& p = cache[refinement];
  if (!p) {
    p = std::make_unique<Problem>();
    p->level = make_level(domain_catalog("disc"), kDiscInitialH / (1 << refinement));
    p->csr = csr_view(p->level.system.stiffness);
    const int n = p->csr.rows;
    p->x = Vector::LinSpaced(n, -1.0, 1.0);
    p->prev = Vector::LinSpaced(n, 1.0, -1.0);
    p->y = Vector::Zero(n);
    p->inv_mass = p->level.system.lumped.diagonal.cwiseInverse();
  }
  return *p;
}

template <bool Parallel>
void BM_spmv(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  Vector y(p.csr.rows);
  for (auto _ : state) {
    if constexpr (Parallel)
      parallel::spmv(p.csr, as_span(p.x), as_span(y));
    else
      serial::spmv(p.csr, as_span(p.x), as_span(y));
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["rows"] = p.csr.rows;
}

template <bool Parallel>
void BM_dot(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double r = Parallel ? parallel::dot(as_span(p.x), as_span(p.prev)) : serial::dot(as_span(p.x), as_span(p.prev));
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_leapfrog(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  Vector next(p.csr.rows);
  const double k2 = 1e-8;
  for (auto _ : state) {
    if constexpr (Parallel)
      parallel::leapfrog_update(p.csr, as_span(p.inv_mass), k2, as_span(p.prev), as_span(p.x), {}, as_span(next));
    else
      serial::leapfrog_update(p.csr, as_span(p.inv_mass), k2, as_span(p.prev), as_span(p.x), {}, as_span(next));
    benchmark::DoNotOptimize(next.data());
  }
}

BENCHMARK(BM_spmv<false>)->DenseRange(0, 3);
BENCHMARK(BM_spmv<true>)->DenseRange(0, 3);
BENCHMARK(BM_dot<false>)->DenseRange(0, 3);
BENCHMARK(BM_dot<true>)->DenseRange(0, 3);
BENCHMARK(BM_leapfrog<false>)->DenseRange(0, 3);
BENCHMARK(BM_leapfrog<true>)->DenseRange(0, 3);

}  // namespace

int main(int argc, char** argv) {
  cutwave::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
