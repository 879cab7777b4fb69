// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <map>

#include "kernels/kernels.hpp"
#include "vcd/descriptor.hpp"
#include "vcd/synth.hpp"

using namespace vcd;

namespace {

const Video& clip(double seconds, std::uint64_t seed) {
  static std::map<std::pair<double, std::uint64_t>, Video> cache;
  auto it = cache.find({seconds, seed});
  if (it == cache.end()) {
    SynthConfig c;
    c.seconds = seconds;
    c.seed = seed;
    it = cache.emplace(std::make_pair(seconds, seed), synthesize_video(c)).first;
  }
  return it->second;
}

template <bool Omp>
void BM_LagDiagonals(benchmark::State& state) {
  const Video& v = clip(static_cast<double>(state.range(0)), 1);
  const auto lags = ReducedDescriptor::lags_for(v.size());
  for (auto _ : state) {
    auto d = Omp ? kernels::omp::lag_diagonals(v.frames(), lags, ImageMetricId{})
                 : kernels::serial::lag_diagonals(v.frames(), lags, ImageMetricId{});
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

template <bool Omp>
void BM_ScanOffsets(benchmark::State& state) {
  static const auto fixed = build_reduced(clip(10, 2), ImageMetricId{}, Backend::kSerial);
  const auto moving = build_reduced(clip(static_cast<double>(state.range(0)), 3), ImageMetricId{}, Backend::kSerial);
  for (auto _ : state) {
    auto hit = Omp ? kernels::omp::scan_offsets(fixed, moving, {}) : kernels::serial::scan_offsets(fixed, moving, {});
    benchmark::DoNotOptimize(hit);
  }
}

template <bool Omp>
void BM_ScanCorpus(benchmark::State& state) {
  static const auto query = build_reduced(clip(10, 4), ImageMetricId{}, Backend::kSerial);
  std::vector<ReducedDescriptor> corpus;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    corpus.push_back(build_reduced(clip(15, 10 + static_cast<std::uint64_t>(i)), ImageMetricId{}, Backend::kSerial));
  }
  std::vector<const ReducedDescriptor*> ptrs;
  for (const auto& d : corpus) ptrs.push_back(&d);
  for (auto _ : state) {
    auto hits = Omp ? kernels::omp::scan_corpus(query, ptrs, {}) : kernels::serial::scan_corpus(query, ptrs, {});
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LagDiagonals<false>)->Arg(10)->Arg(40);
BENCHMARK(BM_LagDiagonals<true>)->Arg(10)->Arg(40);
BENCHMARK(BM_ScanOffsets<false>)->Arg(30)->Arg(120);
BENCHMARK(BM_ScanOffsets<true>)->Arg(30)->Arg(120);
BENCHMARK(BM_ScanCorpus<false>)->Arg(8)->Arg(32);
BENCHMARK(BM_ScanCorpus<true>)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
