#include "kernels/kernels.hpp"

namespace vcd::kernels::serial {

std::vector<std::vector<Ticks>> lag_diagonals(std::span<const GrayFrame> frames,
                                              std::span<const std::uint32_t> lags,
                                              const ImageMetricId& metric) {
  const std::size_t n = frames.size();
  std::vector<std::vector<Ticks>> out(lags.size());
  for (std::size_t k = 0; k < lags.size(); ++k) {
    const std::size_t lag = lags[k];
    out[k].resize(n - lag);
    for (std::size_t i = 0; i + lag < n; ++i) {
      out[k][i] = to_ticks(image_distance(frames[i], frames[i + lag], metric));
    }
  }
  return out;
}

OffsetHit scan_offsets(const ReducedDescriptor& fixed, const ReducedDescriptor& moving,
                       const DistanceConfig& config) {
  const std::size_t m = fixed.n();
  const std::size_t last = moving.n() - m;
  OffsetHit best{delta4(fixed, moving, 0, 0, m, config), 0};
  for (std::size_t o = config.window_stride; o <= last; o += config.window_stride) {
    const double d = delta4(fixed, moving, 0, o, m, config);
    if (d < best.distance) best = {d, o};
  }
  return best;
}

std::vector<WindowMatch> scan_corpus(const ReducedDescriptor& query,
                                     std::span<const ReducedDescriptor* const> corpus,
                                     const DistanceConfig& config) {
  std::vector<WindowMatch> out(corpus.size());
  for (std::size_t e = 0; e < corpus.size(); ++e) {
    out[e] = windowed_distance(query, *corpus[e], config, Backend::kSerial);
  }
  return out;
}

}  // namespace vcd::kernels::serial
