#include <benchmark/benchmark.h>

#include "nullstream/algorithms.hpp"
#include "nullstream/instances.hpp"
#include "nullstream/linalg.hpp"
#include "nullstream/streaming.hpp"

using namespace nullstream;

static void BM_KernelVector(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Matrix g = sample_gaussian(d - 1, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_vector(g));
}
BENCHMARK(BM_KernelVector)->Arg(64)->Arg(256)->Arg(512);

static void BM_BitWriterDoubles(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  BitState s(64 * n);
  for (auto _ : state) {
    BitWriter w(s);
    for (std::size_t i = 0; i < n; ++i) w.write_double(static_cast<double>(i));
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n * 8));
}
BENCHMARK(BM_BitWriterDoubles)->Arg(1024)->Arg(65536);

static void BM_BitWriterQuantized(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  BitState s(13 * n);
  for (auto _ : state) {
    BitWriter w(s);
    for (std::size_t i = 0; i < n; ++i) w.write_bits(i & 0x1FFF, 13);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_BitWriterQuantized)->Arg(1024)->Arg(65536);

// Whole runs through the runner, including the per-step state copy.
static void BM_OfflineKernelRun(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto samples = to_samples(gen_anv_gaussian(d, 3));
  const auto alg = offline_kernel_solver();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_one_pass(*alg, samples, offline_kernel_bits(d, d - 1), 0));
  }
}
BENCHMARK(BM_OfflineKernelRun)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_ProjectionSeparatorUpdate(benchmark::State& state) {
  const std::size_t d = 1024;
  const auto dprime = static_cast<std::size_t>(state.range(0));
  const LspDataset ds = gen_margin_dataset(d, 64, 0.3, 5);
  const auto samples = to_samples(ds);
  const ProjectionSeparatorConfig cfg{dprime, 64, 16, 4.0, 10000, 1};
  const auto alg = projection_separator(cfg);
  const SharedRandomness rnd(2);
  const BitState start(projection_separator_bits(cfg));
  for (auto _ : state) {
    benchmark::DoNotOptimize(advance(*alg, samples, start, 0, rnd));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples.size()));
}
BENCHMARK(BM_ProjectionSeparatorUpdate)->Arg(64)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
