#include "vcd/image_metrics.hpp"

#include <cmath>

#include "vcd/error.hpp"

namespace vcd {

namespace {

constexpr double kGrid = 0x1p50;

void check_shapes(const GrayFrame& a, const GrayFrame& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

inline std::int64_t grid_ticks(double diff) {
  return static_cast<std::int64_t>(diff * kGrid + 0.5);
}

struct DiffSum {
  __int128 ticks = 0;
  std::size_t count = 0;
};

// Row partials stay in int64: a run of 512 pixels with differences
// below 8 cannot overflow.
DiffSum accumulate(const GrayFrame& a, const GrayFrame& b, double threshold, bool thresholded) {
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  const std::size_t w = a.width();
  DiffSum out;
  for (std::size_t row = 0; row < a.height(); ++row) {
    const Pixel* ra = pa.data() + row * w;
    const Pixel* rb = pb.data() + row * w;
    for (std::size_t x0 = 0; x0 < w; x0 += 512) {
      const std::size_t x1 = std::min(w, x0 + 512);
      std::int64_t partial = 0;
      std::size_t count = 0;
      for (std::size_t x = x0; x < x1; ++x) {
        const double d = std::fabs(static_cast<double>(ra[x]) - static_cast<double>(rb[x]));
        if (thresholded) {
          if (d > threshold) {
            partial += grid_ticks(d);
            ++count;
          }
        } else {
          partial += grid_ticks(d);
        }
      }
      out.ticks += partial;
      out.count += count;
    }
  }
  return out;
}

inline double to_value(__int128 ticks) { return static_cast<double>(ticks) / kGrid; }

}  // namespace

void validate(const ImageMetricId& metric) {
  if (!(metric.diff_epsilon >= 0.0 && metric.diff_epsilon <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "diff_epsilon must lie in [0,1]");
  }
  switch (metric.kind) {
    case MetricKind::kPixelSum:
    case MetricKind::kMean:
    case MetricKind::kDiffMean: return;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric kind");
}

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kPixelSum: return "pixel-sum";
    case MetricKind::kMean: return "mean";
    case MetricKind::kDiffMean: return "diff-mean";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  if (name == "pixel-sum") return MetricKind::kPixelSum;
  if (name == "mean") return MetricKind::kMean;
  if (name == "diff-mean") return MetricKind::kDiffMean;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

double pixel_sum_distance(const GrayFrame& a, const GrayFrame& b) {
  check_shapes(a, b);
  return to_value(accumulate(a, b, 0.0, false).ticks);
}

double mean_pixel_distance(const GrayFrame& a, const GrayFrame& b) {
  check_shapes(a, b);
  return to_value(accumulate(a, b, 0.0, false).ticks) / static_cast<double>(a.size());
}

double diff_mean_distance(const GrayFrame& a, const GrayFrame& b, double diff_epsilon) {
  check_shapes(a, b);
  const DiffSum s = accumulate(a, b, diff_epsilon, true);
  if (s.count == 0) return 0.0;
  return to_value(s.ticks) / static_cast<double>(s.count);
}

double image_distance(const GrayFrame& a, const GrayFrame& b, const ImageMetricId& metric) {
  switch (metric.kind) {
    case MetricKind::kPixelSum: return pixel_sum_distance(a, b);
    case MetricKind::kMean: return mean_pixel_distance(a, b);
    case MetricKind::kDiffMean: return diff_mean_distance(a, b, metric.diff_epsilon);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric kind");
}

}  // namespace vcd
