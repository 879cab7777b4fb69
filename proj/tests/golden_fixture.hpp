#pragma once

#include <vector>

#include "vcd/descriptor.hpp"
#include "vcd/frame.hpp"

namespace vcd::test {

// 16 frames of 6x4 8-bit pixels, fully determined by integer arithmetic so
// the golden descriptor file can be rebuilt anywhere.
inline Video golden_video() {
  std::vector<GrayFrame> frames;
  for (unsigned t = 0; t < 16; ++t) {
    std::vector<Pixel> px(24);
    for (unsigned y = 0; y < 4; ++y) {
      for (unsigned x = 0; x < 6; ++x) {
        const unsigned v = (t * t * 11 + x * 37 + y * 53 + ((x ^ t) & 3) * 29) % 256;
        px[y * 6 + x] = static_cast<Pixel>(v) / 255.0;
      }
    }
    frames.emplace_back(6, 4, std::move(px));
  }
  return Video(Fps(8), std::move(frames));
}

inline ReducedDescriptor golden_descriptor() {
  return build_reduced(golden_video(), ImageMetricId{}, Backend::kSerial);
}

}  // namespace vcd::test
