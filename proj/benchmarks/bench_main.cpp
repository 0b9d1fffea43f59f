#include <random>

#include <benchmark/benchmark.h>

#include "narr/evaluation.hpp"
#include "narr/retrieval.hpp"
#include "narr/salience.hpp"

namespace {

narr::Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  narr::Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void BM_KendallTau(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(rng, n), y = random_vector(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(narr::kendall_tau(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oNLogN);

void BM_FindPeaks(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto x = random_vector(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(narr::find_peaks(x));
}
BENCHMARK(BM_FindPeaks)->RangeMultiplier(4)->Range(64, 16384);

void BM_Retrieve(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const std::size_t dim = 64;
  narr::PassageStore kb(dim);
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    narr::Passage p;
    p.id = "p" + std::to_string(i);
    p.key = random_vector(rng, dim);
    kb.add(std::move(p));
  }
  narr::MemoryCache mem(256, narr::CachePolicy::Lru, dim);
  for (int i = 0; i < 256; ++i) {
    narr::Passage p;
    p.id = "m" + std::to_string(i);
    p.key = random_vector(rng, dim);
    p.source = narr::PassageSource::Memory;
    mem.add(std::move(p));
  }
  const auto q = random_vector(rng, dim);
  for (auto _ : state) benchmark::DoNotOptimize(narr::retrieve(q, kb, mem, 5, 5, 5));
}
BENCHMARK(BM_Retrieve)->RangeMultiplier(10)->Range(100, 100000);

void BM_SphericalKMeans(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<narr::Vector> pts;
  for (std::int64_t i = 0; i < state.range(0); ++i) pts.push_back(random_vector(rng, 32));
  const auto k = static_cast<std::size_t>((state.range(0) + 9) / 10);
  for (auto _ : state) benchmark::DoNotOptimize(narr::spherical_kmeans(pts, k));
}
BENCHMARK(BM_SphericalKMeans)->RangeMultiplier(4)->Range(20, 1280);

}  // namespace
BENCHMARK_MAIN();
