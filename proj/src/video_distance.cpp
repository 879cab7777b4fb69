#include "vcd/video_distance.hpp"

#include <algorithm>
#include <cmath>

#include "kernels/kernels.hpp"
#include "vcd/error.hpp"
#include "vcd/image_metrics.hpp"

namespace vcd {

MeanMode parse_mean_mode(std::string_view name) {
  if (name == "paper") return MeanMode::kPaperOneOverLag;
  if (name == "per-entry") return MeanMode::kPerEntry;
  throw Error(ErrorCode::kInvalidArgument, "unknown mean mode '" + std::string(name) + "'");
}

std::string_view mean_mode_name(MeanMode mode) {
  return mode == MeanMode::kPaperOneOverLag ? "paper" : "per-entry";
}

void validate(const DistanceConfig& config) {
  if (!(config.norm_epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "norm_epsilon must be > 0");
  if (config.window_stride < 1) throw Error(ErrorCode::kInvalidArgument, "window stride must be >= 1");
}

double delta1(const Video& u, const Video& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "videos differ in length: " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  if (u.width() != v.width() || u.height() != v.height()) {
    throw Error(ErrorCode::kShapeMismatch, "videos differ in resolution");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += pixel_sum_distance(u[i], v[i]);
  return total;
}

namespace {

void require_same_n(const FullSsm& a, const FullSsm& b) {
  if (a.n() != b.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "matrices cover " + std::to_string(a.n()) + " and " + std::to_string(b.n()) + " frames");
  }
}

double lag_abs_sum(const FullSsm& a, const FullSsm& b, std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = 0; i + lag < a.n(); ++i) s += std::fabs(a.entry(i, lag) - b.entry(i, lag));
  return s;
}

// Normalized view of one lag window. Entries are ticks / window_ticks, or
// the uniform value when the window is (numerically) static.
struct LagWindow {
  std::span<const Ticks> ticks;
  double sum = 0.0;
  double uniform = 0.0;
  bool is_uniform = false;

  LagWindow(const ReducedDescriptor& d, std::size_t lag, std::size_t offset, std::size_t length,
            double norm_epsilon)
      : ticks(d.diagonal(lag).subspan(offset, length - lag)) {
    const TickSum s = d.window_ticks(lag, offset, length);
    is_uniform = !(from_ticks(s) >= norm_epsilon);
    sum = static_cast<double>(s);
    uniform = 1.0 / static_cast<double>(length - lag);
  }

  double operator[](std::size_t i) const {
    return is_uniform ? uniform : static_cast<double>(ticks[i]) / sum;
  }
};

}  // namespace

double delta2(const FullSsm& a, const FullSsm& b) {
  require_same_n(a, b);
  double best = 0.0;
  for (std::size_t j = 1; j < a.n(); ++j) best = std::max(best, lag_abs_sum(a, b, j));
  return best;
}

double delta3(const FullSsm& a, const FullSsm& b) {
  require_same_n(a, b);
  double best = 0.0;
  for (std::size_t j = 1; j < a.n(); ++j) {
    best = std::max(best, lag_abs_sum(a, b, j) / static_cast<double>(a.n() - j));
  }
  return best;
}

std::vector<double> normalize_window(const ReducedDescriptor& d, std::size_t lag, std::size_t offset,
                                     std::size_t length, const DistanceConfig& config) {
  const LagWindow w(d, lag, offset, length, config.norm_epsilon);
  std::vector<double> out(length - lag);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[i];
  return out;
}

double delta4(const ReducedDescriptor& u, const ReducedDescriptor& v, std::size_t offset_u,
              std::size_t offset_v, std::size_t length, const DistanceConfig& config) {
  if (length < 2) throw Error(ErrorCode::kRangeError, "window must span at least 2 frames");
  double best = 0.0;
  for (std::size_t lag = 1; lag < length; lag *= 2) {
    const LagWindow a(u, lag, offset_u, length, config.norm_epsilon);
    const LagWindow b(v, lag, offset_v, length, config.norm_epsilon);
    double s = 0.0;
    for (std::size_t i = 0; i < length - lag; ++i) s += std::fabs(a[i] - b[i]);
    const double weight = config.mean_mode == MeanMode::kPaperOneOverLag
                              ? 1.0 / static_cast<double>(lag)
                              : 1.0 / static_cast<double>(length - lag);
    best = std::max(best, weight * s);
  }
  return best;
}

WindowMatch windowed_distance(const ReducedDescriptor& u, const ReducedDescriptor& v,
                              const DistanceConfig& config, Backend backend) {
  validate(config);
  require_compatible(u.provenance(), v.provenance());
  const bool u_shorter = u.n() <= v.n();
  const ReducedDescriptor& fixed = u_shorter ? u : v;
  const ReducedDescriptor& moving = u_shorter ? v : u;
  const auto hit = backend == Backend::kSerial ? kernels::serial::scan_offsets(fixed, moving, config)
                                               : kernels::omp::scan_offsets(fixed, moving, config);
  return {hit.distance, hit.offset};
}

WindowMatch muscle_distance(const ReducedDescriptor& u, const ReducedDescriptor& v,
                            const DistanceConfig& config, Backend backend) {
  if (u.provenance().metric != MetricKind::kDiffMean || v.provenance().metric != MetricKind::kDiffMean) {
    throw Error(ErrorCode::kIncompatibleDescriptors, "muscle distance needs diff-mean descriptors");
  }
  return windowed_distance(u, v, config, backend);
}

}  // namespace vcd
