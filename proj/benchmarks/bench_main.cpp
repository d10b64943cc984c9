// Microbenchmarks for the hot paths: spectral decompositions, conditional
// expectations, the full bound pipeline, algebra closure, and the sweep
// driver.  Run with --benchmark_filter=<regex> to select a subset.

#include <benchmark/benchmark.h>

#include <qdpi/algebra.hpp>
#include <qdpi/linalg.hpp>
#include <qdpi/recovery.hpp>
#include <qdpi/rng.hpp>
#include <qdpi/stability.hpp>
#include <qdpi/states.hpp>
#include <qdpi/structure.hpp>
#include <qdpi/sweep.hpp>

namespace {

using namespace qdpi;

Matrix random_hermitian(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix x(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      x(i, j) = rng.next_complex_gaussian();
    }
  }
  return hermitize(x);
}

void BM_HermitianEig(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix h = random_hermitian(n, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitian_eig(h));
  }
}
BENCHMARK(BM_HermitianEig)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_ConditionalExpectationTau(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Subalgebra alg = Subalgebra::tensor_factor(2, n / 2, Factor::Second);
  const Matrix x = random_hermitian(n, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conditional_expectation_tau(alg, x));
  }
}
BENCHMARK(BM_ConditionalExpectationTau)->Arg(4)->Arg(8)->Arg(16);

void BM_EvaluateBounds(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityMatrix rho = random_density(n, n, 21);
  const DensityMatrix sigma = random_density(n, n, 22);
  const RecoveryContext ctx(rho, Subalgebra::diagonal(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_bounds(ctx, sigma));
  }
}
BENCHMARK(BM_EvaluateBounds)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_CloseGenerators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(31);
  Matrix g = Matrix::Zero(n, n);
  g(0, 1) = 1.0;
  g(1, 0) = 1.0;
  Matrix h = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = static_cast<double>(i + 1);
  }
  const std::vector<Matrix> gens = {g, h};
  for (auto _ : state) {
    benchmark::DoNotOptimize(close_generators(n, gens));
  }
}
BENCHMARK(BM_CloseGenerators)->Arg(4)->Arg(8);

void BM_BuildStructure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityMatrix rho = random_density(n, n, 41);
  const RecoveryContext ctx(rho, Subalgebra::diagonal(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_structure(ctx, 5));
  }
}
BENCHMARK(BM_BuildStructure)->Arg(2)->Arg(4)->Arg(8);

void BM_RunInstance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SweepConfig cfg;
  cfg.dim = n;
  cfg.samples = 1;
  cfg.seed = 99;
  cfg.t_grid = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_instance(cfg, 0));
  }
}
BENCHMARK(BM_RunInstance)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
