#pragma once

#include <cstddef>
#include <cstdint>

#include "vcd/frame.hpp"

namespace vcd {

struct SynthConfig {
  std::size_t width = 132;
  std::size_t height = 74;
  Fps fps = Fps(8);
  double seconds = 10.0;
  std::uint64_t seed = 1;
};

// Procedural test footage: a sequence of 2-5 s "shots", each with its own
// textured, drifting background, global light changes and a handful of
// moving, pulsing blobs. Output is 8-bit quantized, like decoded video.
// Deterministic in the config.
Video synthesize_video(const SynthConfig& config);

}  // namespace vcd
