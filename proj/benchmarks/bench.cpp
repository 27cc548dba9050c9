#include <benchmark/benchmark.h>

#include <random>

#include "khora/f2.hpp"

using namespace khora;

static SparseRows random_rows(std::size_t rows, std::size_t cols, double density,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  SparseRows out(rows);
  for (auto& r : out)
    for (std::size_t j = 0; j < cols; ++j)
      if (bit(rng)) r.push_back(static_cast<std::uint32_t>(j));
  return out;
}

static void BM_rank_dense(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  SparseRows rows = random_rows(n, n, 0.5, 42);
  BitMatrix m = to_dense(rows, n);
  for (auto _ : state) benchmark::DoNotOptimize(rank_dense(m));
}
BENCHMARK(BM_rank_dense)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_rank_sparse(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  SparseRows rows = random_rows(n, n, 8.0 / static_cast<double>(n), 42);
  for (auto _ : state) benchmark::DoNotOptimize(rank_sparse(rows));
}
BENCHMARK(BM_rank_sparse)->Arg(1024)->Arg(8192);

BENCHMARK_MAIN();
