#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vcd/backend.hpp"
#include "vcd/frame.hpp"
#include "vcd/image_metrics.hpp"

namespace vcd {

// Descriptor entries are kept as integer multiples of 2^-40 ("ticks"). Window
// sums over ticks are exact and associative, so a sum read off the prefix
// array is bit-identical to the same window summed directly, and a subclip's
// windows normalize to exactly the values of the source's windows.
inline constexpr double kTicksPerUnit = 0x1p40;
inline constexpr double kMaxEntryValue = 0x1p23;

using Ticks = std::int64_t;
using TickSum = __int128;

Ticks to_ticks(double value);
inline double from_ticks(TickSum t) { return static_cast<double>(t) / kTicksPerUnit; }

// The extraction parameters recorded with every descriptor. Fields use the
// precision of the on-disk format so a loaded descriptor compares equal to
// the one that was written.
struct Provenance {
  float fps = 0.0f;
  std::uint32_t frame_width = 0;
  std::uint32_t frame_height = 0;
  MetricKind metric = MetricKind::kDiffMean;
  float diff_epsilon = static_cast<float>(kDefaultDiffEpsilon);

  static Provenance of(const Video& video, const ImageMetricId& metric);
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Descriptors may be compared when metric, epsilon, fps and frame width agree.
// Height is free: it follows each source's aspect ratio.
bool compatible(const Provenance& a, const Provenance& b);
void require_compatible(const Provenance& a, const Provenance& b);

// Complete upper-triangular self-similarity matrix, entry (i, j) =
// d(v_i, v_{i+j}) for 0 <= i < n-1, 1 <= j < n-i. Quadratic; used as the
// reference for the reduced descriptor and by the delta2/delta3 distances.
class FullSsm {
 public:
  FullSsm(std::size_t n, std::vector<std::vector<Ticks>> by_lag);

  std::size_t n() const noexcept { return n_; }
  std::size_t entry_count() const noexcept { return n_ * (n_ - 1) / 2; }
  Ticks ticks(std::size_t i, std::size_t lag) const { return by_lag_[lag - 1][i]; }
  double entry(std::size_t i, std::size_t lag) const { return from_ticks(ticks(i, lag)); }

 private:
  std::size_t n_;
  std::vector<std::vector<Ticks>> by_lag_;
};

FullSsm build_full_ssm(const Video& video, const ImageMetricId& metric);

// Self-similarity diagonals restricted to the power-of-two lags below n,
// O(n log n) entries, with prefix sums for O(1) window sums.
class ReducedDescriptor {
 public:
  ReducedDescriptor() = default;
  // diagonals[k] holds lag 2^k and must have length n - 2^k.
  ReducedDescriptor(Provenance provenance, std::size_t n, std::vector<std::vector<Ticks>> diagonals);

  static std::vector<std::uint32_t> lags_for(std::size_t n);

  const Provenance& provenance() const noexcept { return provenance_; }
  std::size_t n() const noexcept { return n_; }
  std::span<const std::uint32_t> lags() const noexcept { return lags_; }
  bool has_lag(std::size_t lag) const noexcept;
  std::size_t stored_entries() const noexcept;

  std::span<const Ticks> diagonal(std::size_t lag) const;
  double entry(std::size_t lag, std::size_t i) const { return from_ticks(diagonal(lag)[i]); }

  // Sum of diag[lag][offset .. offset+length-lag), the entries of `lag` that
  // fall inside a window of `length` frames starting at `offset`.
  TickSum window_ticks(std::size_t lag, std::size_t offset, std::size_t length) const;
  double window_sum(std::size_t lag, std::size_t offset, std::size_t length) const {
    return from_ticks(window_ticks(lag, offset, length));
  }

  // The descriptor a serialize/deserialize cycle yields: entries rounded to
  // binary32. Idempotent.
  ReducedDescriptor rounded_to_file_precision() const;

  friend bool operator==(const ReducedDescriptor& a, const ReducedDescriptor& b) {
    return a.provenance_ == b.provenance_ && a.n_ == b.n_ && a.diagonals_ == b.diagonals_;
  }

 private:
  std::size_t lag_index(std::size_t lag) const;

  Provenance provenance_;
  std::size_t n_ = 0;
  std::vector<std::uint32_t> lags_;
  std::vector<std::vector<Ticks>> diagonals_;
  std::vector<std::vector<TickSum>> prefix_;
};

ReducedDescriptor build_reduced(const Video& video, const ImageMetricId& metric,
                                Backend backend = Backend::kOpenMP);

// Binary format, little-endian:
//   "SSMVCD01" | u32 version=1 | u32 n | f32 fps | u32 width | u32 height |
//   u8 metric | f32 diff_epsilon | u32 lag_count |
//   lag_count x ( u32 lag | u32 len=n-lag | len x f32 )
inline constexpr std::uint32_t kDescriptorVersion = 1;

std::vector<std::uint8_t> serialize(const ReducedDescriptor& descriptor);
ReducedDescriptor deserialize(std::span<const std::uint8_t> bytes);

void save_descriptor(const ReducedDescriptor& descriptor, const std::filesystem::path& path);
ReducedDescriptor load_descriptor(const std::filesystem::path& path);

}  // namespace vcd
