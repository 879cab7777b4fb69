#pragma once

// Data-parallel inner loops. Each kernel exists twice: a plain serial
// reference and an OpenMP version. Both must produce bit-identical output;
// tests/kernels_test.cpp checks that on random inputs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vcd/descriptor.hpp"
#include "vcd/video_distance.hpp"

namespace vcd::kernels {

struct OffsetHit {
  double distance;
  std::size_t offset;
};

namespace serial {

// out[k][i] = ticks(d(frames[i], frames[i + lags[k]]))
std::vector<std::vector<Ticks>> lag_diagonals(std::span<const GrayFrame> frames,
                                              std::span<const std::uint32_t> lags,
                                              const ImageMetricId& metric);

// min over o in {0, stride, ...} <= moving.n() - fixed.n() of
// delta4(fixed @ 0, moving @ o, fixed.n()); smallest offset wins ties.
OffsetHit scan_offsets(const ReducedDescriptor& fixed, const ReducedDescriptor& moving,
                       const DistanceConfig& config);

// One windowed distance per corpus entry, in corpus order.
std::vector<WindowMatch> scan_corpus(const ReducedDescriptor& query,
                                     std::span<const ReducedDescriptor* const> corpus,
                                     const DistanceConfig& config);

}  // namespace serial

namespace omp {

std::vector<std::vector<Ticks>> lag_diagonals(std::span<const GrayFrame> frames,
                                              std::span<const std::uint32_t> lags,
                                              const ImageMetricId& metric);

OffsetHit scan_offsets(const ReducedDescriptor& fixed, const ReducedDescriptor& moving,
                       const DistanceConfig& config);

std::vector<WindowMatch> scan_corpus(const ReducedDescriptor& query,
                                     std::span<const ReducedDescriptor* const> corpus,
                                     const DistanceConfig& config);

}  // namespace omp

}  // namespace vcd::kernels
