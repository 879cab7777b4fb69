#pragma once

#include <cstddef>

#include "vcd/frame.hpp"

namespace vcd {

struct PreprocessConfig {
  std::size_t target_width = 132;
  Fps target_fps = Fps(8);
};

void validate(const PreprocessConfig& config);

// Exact box-filter resampling: every output pixel is the area-weighted mean of
// the (fractional) source rectangle it covers. Works in both directions.
GrayFrame resample_area(const GrayFrame& frame, std::size_t width, std::size_t height);

// Height that keeps the aspect ratio at the given width: round-half-up, >= 1.
std::size_t scaled_height(std::size_t width, std::size_t height, std::size_t target_width);

// Identity when target_width >= frame.width().
GrayFrame downscale(const GrayFrame& frame, std::size_t target_width);

// Output frame k is source frame min(n-1, floor(k * src_fps / target_fps)),
// for k in [0, ceil(n * target_fps / src_fps)).
Video resample_fps(const Video& video, Fps target_fps);

Video preprocess(const Video& video, const PreprocessConfig& config);

}  // namespace vcd
