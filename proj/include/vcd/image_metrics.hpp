#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "vcd/frame.hpp"

namespace vcd {

enum class MetricKind : std::uint8_t {
  kPixelSum = 0,
  kMean = 1,
  kDiffMean = 2,
};

inline constexpr double kDefaultDiffEpsilon = 0.5 / 255.0;

struct ImageMetricId {
  MetricKind kind = MetricKind::kDiffMean;
  double diff_epsilon = kDefaultDiffEpsilon;  // consulted by kDiffMean only

  friend bool operator==(const ImageMetricId&, const ImageMetricId&) = default;
};

void validate(const ImageMetricId& metric);

std::string_view metric_name(MetricKind kind);  // "pixel-sum", "mean", "diff-mean"
MetricKind parse_metric(std::string_view name);

// Sum over pixels of |a_p - b_p|.
//
// Per-pixel differences are rounded to a 2^-50 grid and summed in integers,
// which makes every metric independent of the pixel visiting order: mirrored
// frame pairs give bit-identical results.
double pixel_sum_distance(const GrayFrame& a, const GrayFrame& b);

// pixel_sum_distance / (width * height), in [0,1].
double mean_pixel_distance(const GrayFrame& a, const GrayFrame& b);

// Mean of |a_p - b_p| over the pixels where it exceeds diff_epsilon; 0 when
// no pixel does. Shared static content (e.g. black borders) is ignored.
double diff_mean_distance(const GrayFrame& a, const GrayFrame& b, double diff_epsilon);

double image_distance(const GrayFrame& a, const GrayFrame& b, const ImageMetricId& metric);

}  // namespace vcd
