#include <omp.h>

#include <exception>

#include "kernels/kernels.hpp"

namespace vcd {

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

namespace kernels::omp {

namespace {

// Exceptions must not escape an OpenMP region; the first one is captured
// and rethrown after the join.
class ErrorSlot {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(vcd_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

std::vector<std::vector<Ticks>> lag_diagonals(std::span<const GrayFrame> frames,
                                              std::span<const std::uint32_t> lags,
                                              const ImageMetricId& metric) {
  const std::size_t n = frames.size();
  std::vector<std::vector<Ticks>> out(lags.size());
  // Flatten (lag, row) so the team balances across short and long diagonals.
  std::vector<std::size_t> start(lags.size() + 1, 0);
  for (std::size_t k = 0; k < lags.size(); ++k) {
    out[k].resize(n - lags[k]);
    start[k + 1] = start[k] + out[k].size();
  }
  const auto total = static_cast<std::int64_t>(start.back());
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t e = 0; e < total; ++e) {
    err.run([&] {
      std::size_t k = 0;
      while (start[k + 1] <= static_cast<std::size_t>(e)) ++k;
      const std::size_t i = static_cast<std::size_t>(e) - start[k];
      out[k][i] = to_ticks(image_distance(frames[i], frames[i + lags[k]], metric));
    });
  }
  err.rethrow();
  return out;
}

OffsetHit scan_offsets(const ReducedDescriptor& fixed, const ReducedDescriptor& moving,
                       const DistanceConfig& config) {
  const std::size_t m = fixed.n();
  const std::size_t count = (moving.n() - m) / config.window_stride + 1;
  std::vector<double> dist(count);
  ErrorSlot err;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
    err.run([&] {
      const auto o = static_cast<std::size_t>(k) * config.window_stride;
      dist[static_cast<std::size_t>(k)] = delta4(fixed, moving, 0, o, m, config);
    });
  }
  err.rethrow();
  // Sequential reduction keeps the smallest-offset tie-break.
  OffsetHit best{dist[0], 0};
  for (std::size_t k = 1; k < count; ++k) {
    if (dist[k] < best.distance) best = {dist[k], k * config.window_stride};
  }
  return best;
}

std::vector<WindowMatch> scan_corpus(const ReducedDescriptor& query,
                                     std::span<const ReducedDescriptor* const> corpus,
                                     const DistanceConfig& config) {
  std::vector<WindowMatch> out(corpus.size());
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t e = 0; e < static_cast<std::int64_t>(corpus.size()); ++e) {
    err.run([&] {
      const auto idx = static_cast<std::size_t>(e);
      out[idx] = windowed_distance(query, *corpus[idx], config, Backend::kSerial);
    });
  }
  err.rethrow();
  return out;
}

}  // namespace kernels::omp

}  // namespace vcd
