#include <benchmark/benchmark.h>

#include "tsvdtd/experiments.hpp"
#include "tsvdtd/linalg.hpp"

using namespace tsvdtd;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = rng.normal();
    }
  }
  return m;
}

void BM_TruncatedSvd(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Matrix m = random_matrix(d, n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncated_svd(m, n / 4 + 1));
  }
}
BENCHMARK(BM_TruncatedSvd)->Args({200, 40})->Args({1000, 40})->Args({1000, 200});

void BM_ProjectRankK(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Matrix m = random_matrix(d, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_rank_k(m, n / 4 + 1));
  }
}
BENCHMARK(BM_ProjectRankK)->Args({200, 40})->Args({1000, 40})->Args({1000, 200});

void BM_ExactValue(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MultiTaskMdp mdp = generate_mdp(d, 40, 8, 0.95, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_value(mdp));
  }
}
BENCHMARK(BM_ExactValue)->Arg(200)->Arg(500);

void BM_TsvdTdStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MultiTaskMdp mdp = generate_mdp(d, 40, 8, 0.95, 4);
  const GroundTruth gt = exact_value(mdp);
  ValueMatrix value = initialize_value(gt, 5);
  Rng rng(6);
  const SampleBatch batch = sample_batch(mdp, 0.0, rng);
  for (auto _ : state) {
    value = tsvd_td_step(value, batch, mdp, 9, 0.05);
    benchmark::DoNotOptimize(value);
  }
}
BENCHMARK(BM_TsvdTdStep)->Arg(200)->Arg(1000);

void BM_VanillaTdStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MultiTaskMdp mdp = generate_mdp(d, 40, 8, 0.95, 4);
  const GroundTruth gt = exact_value(mdp);
  ValueMatrix value = initialize_value(gt, 5);
  Rng rng(6);
  const SampleBatch batch = sample_batch(mdp, 0.0, rng);
  for (auto _ : state) {
    value = vanilla_td_step(value, batch, mdp, 0.05);
    benchmark::DoNotOptimize(value);
  }
}
BENCHMARK(BM_VanillaTdStep)->Arg(200)->Arg(1000);

void BM_SampleBatch(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MultiTaskMdp mdp = generate_mdp(d, 40, 8, 0.95, 7);
  Rng rng(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_batch(mdp, 0.5, rng));
  }
}
BENCHMARK(BM_SampleBatch)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
