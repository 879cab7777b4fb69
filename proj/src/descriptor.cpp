#include "vcd/descriptor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "kernels/kernels.hpp"
#include "vcd/error.hpp"

namespace vcd {

namespace fs = std::filesystem;

Ticks to_ticks(double value) {
  if (!(value >= 0.0 && value < kMaxEntryValue)) {
    throw Error(ErrorCode::kRangeError, "descriptor entry out of range: " + std::to_string(value));
  }
  return static_cast<Ticks>(value * kTicksPerUnit + 0.5);
}

Provenance Provenance::of(const Video& video, const ImageMetricId& metric) {
  Provenance p;
  p.fps = static_cast<float>(video.fps().value());
  p.frame_width = static_cast<std::uint32_t>(video.width());
  p.frame_height = static_cast<std::uint32_t>(video.height());
  p.metric = metric.kind;
  p.diff_epsilon = static_cast<float>(metric.diff_epsilon);
  return p;
}

bool compatible(const Provenance& a, const Provenance& b) {
  return a.metric == b.metric && a.diff_epsilon == b.diff_epsilon && a.fps == b.fps &&
         a.frame_width == b.frame_width;
}

void require_compatible(const Provenance& a, const Provenance& b) {
  if (compatible(a, b)) return;
  throw Error(ErrorCode::kIncompatibleDescriptors,
              std::string(metric_name(a.metric)) + "@" + std::to_string(a.fps) + "fps/w" +
                  std::to_string(a.frame_width) + " vs " + std::string(metric_name(b.metric)) + "@" +
                  std::to_string(b.fps) + "fps/w" + std::to_string(b.frame_width));
}

// ---------------------------------------------------------------- FullSsm

FullSsm::FullSsm(std::size_t n, std::vector<std::vector<Ticks>> by_lag) : n_(n), by_lag_(std::move(by_lag)) {
  if (n_ < 2) throw Error(ErrorCode::kTooShort, "self-similarity needs at least 2 frames");
  if (by_lag_.size() != n_ - 1) throw Error(ErrorCode::kShapeMismatch, "expected n-1 lags");
  for (std::size_t j = 1; j < n_; ++j) {
    if (by_lag_[j - 1].size() != n_ - j) throw Error(ErrorCode::kShapeMismatch, "lag length != n - lag");
  }
}

FullSsm build_full_ssm(const Video& video, const ImageMetricId& metric) {
  validate(metric);
  const std::size_t n = video.size();
  if (n < 2) throw Error(ErrorCode::kTooShort, "self-similarity needs at least 2 frames");
  std::vector<std::vector<Ticks>> by_lag(n - 1);
  for (std::size_t j = 1; j < n; ++j) by_lag[j - 1].resize(n - j);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 1; i + j < n; ++j) {
      by_lag[j - 1][i] = to_ticks(image_distance(video[i], video[i + j], metric));
    }
  }
  return FullSsm(n, std::move(by_lag));
}

// ------------------------------------------------------ ReducedDescriptor

std::vector<std::uint32_t> ReducedDescriptor::lags_for(std::size_t n) {
  std::vector<std::uint32_t> lags;
  for (std::size_t j = 1; j < n; j *= 2) lags.push_back(static_cast<std::uint32_t>(j));
  return lags;
}

ReducedDescriptor::ReducedDescriptor(Provenance provenance, std::size_t n,
                                     std::vector<std::vector<Ticks>> diagonals)
    : provenance_(provenance), n_(n), lags_(lags_for(n)), diagonals_(std::move(diagonals)) {
  if (n_ < 2) throw Error(ErrorCode::kTooShort, "descriptor needs at least 2 frames");
  if (diagonals_.size() != lags_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(lags_.size()) + " lag diagonals");
  }
  prefix_.resize(lags_.size());
  for (std::size_t k = 0; k < lags_.size(); ++k) {
    const auto& d = diagonals_[k];
    if (d.size() != n_ - lags_[k]) throw Error(ErrorCode::kShapeMismatch, "lag length != n - lag");
    auto& p = prefix_[k];
    p.resize(d.size() + 1);
    p[0] = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] < 0) throw Error(ErrorCode::kRangeError, "negative descriptor entry");
      p[i + 1] = p[i] + d[i];
    }
  }
}

bool ReducedDescriptor::has_lag(std::size_t lag) const noexcept {
  return lag >= 1 && lag < n_ && std::has_single_bit(lag);
}

std::size_t ReducedDescriptor::lag_index(std::size_t lag) const {
  if (!has_lag(lag)) throw Error(ErrorCode::kLagNotStored, "lag " + std::to_string(lag) + " not stored");
  return static_cast<std::size_t>(std::countr_zero(lag));
}

std::size_t ReducedDescriptor::stored_entries() const noexcept {
  std::size_t total = 0;
  for (const auto& d : diagonals_) total += d.size();
  return total;
}

std::span<const Ticks> ReducedDescriptor::diagonal(std::size_t lag) const {
  return diagonals_[lag_index(lag)];
}

TickSum ReducedDescriptor::window_ticks(std::size_t lag, std::size_t offset, std::size_t length) const {
  const std::size_t k = lag_index(lag);
  if (lag >= length || length > n_ || offset > n_ - length) {
    throw Error(ErrorCode::kRangeError, "window (lag " + std::to_string(lag) + ", offset " +
                                            std::to_string(offset) + ", length " + std::to_string(length) +
                                            ") outside a " + std::to_string(n_) + "-frame descriptor");
  }
  const auto& p = prefix_[k];
  return p[offset + length - lag] - p[offset];
}

namespace {

float ticks_to_f32(Ticks t) { return static_cast<float>(static_cast<double>(t) / kTicksPerUnit); }

Ticks f32_to_ticks(float f) { return to_ticks(static_cast<double>(f)); }

}  // namespace

ReducedDescriptor ReducedDescriptor::rounded_to_file_precision() const {
  auto diagonals = diagonals_;
  for (auto& d : diagonals) {
    for (auto& t : d) t = f32_to_ticks(ticks_to_f32(t));
  }
  return ReducedDescriptor(provenance_, n_, std::move(diagonals));
}

ReducedDescriptor build_reduced(const Video& video, const ImageMetricId& metric, Backend backend) {
  validate(metric);
  if (video.size() < 2) throw Error(ErrorCode::kTooShort, "descriptor needs at least 2 frames");
  const auto lags = ReducedDescriptor::lags_for(video.size());
  auto diagonals = backend == Backend::kSerial ? kernels::serial::lag_diagonals(video.frames(), lags, metric)
                                               : kernels::omp::lag_diagonals(video.frames(), lags, metric);
  return ReducedDescriptor(Provenance::of(video, metric), video.size(), std::move(diagonals));
}

// ---------------------------------------------------------- serialization

namespace {

constexpr char kMagic[8] = {'S', 'S', 'M', 'V', 'C', 'D', '0', '1'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kCorruptFile, "descriptor payload truncated");
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(in_[pos_++]) << s;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const ReducedDescriptor& d) {
  const auto& p = d.provenance();
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kDescriptorVersion);
  w.u32(static_cast<std::uint32_t>(d.n()));
  w.f32(p.fps);
  w.u32(p.frame_width);
  w.u32(p.frame_height);
  w.u8(static_cast<std::uint8_t>(p.metric));
  w.f32(p.diff_epsilon);
  w.u32(static_cast<std::uint32_t>(d.lags().size()));
  for (const auto lag : d.lags()) {
    const auto diag = d.diagonal(lag);
    w.u32(lag);
    w.u32(static_cast<std::uint32_t>(diag.size()));
    for (const auto t : diag) w.f32(ticks_to_f32(t));
  }
  return w.take();
}

ReducedDescriptor deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormatError, "bad descriptor magic");
  }
  Reader r(bytes.subspan(sizeof(kMagic)));
  if (r.remaining() < 4) throw Error(ErrorCode::kFormatError, "missing format version");
  const auto version = r.u32();
  if (version != kDescriptorVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported descriptor version " + std::to_string(version));
  }
  const std::size_t n = r.u32();
  Provenance p;
  p.fps = r.f32();
  p.frame_width = r.u32();
  p.frame_height = r.u32();
  const auto metric = r.u8();
  if (metric > static_cast<std::uint8_t>(MetricKind::kDiffMean)) {
    throw Error(ErrorCode::kFormatError, "unknown metric id " + std::to_string(metric));
  }
  p.metric = static_cast<MetricKind>(metric);
  p.diff_epsilon = r.f32();
  if (n < 2) throw Error(ErrorCode::kCorruptFile, "descriptor with fewer than 2 frames");

  const auto expected_lags = ReducedDescriptor::lags_for(n);
  const auto lag_count = r.u32();
  if (lag_count != expected_lags.size()) throw Error(ErrorCode::kCorruptFile, "lag count does not match n");
  std::vector<std::vector<Ticks>> diagonals(lag_count);
  for (std::size_t k = 0; k < lag_count; ++k) {
    const auto lag = r.u32();
    const auto len = r.u32();
    if (lag != expected_lags[k] || len != n - lag) {
      throw Error(ErrorCode::kCorruptFile, "unexpected lag header (" + std::to_string(lag) + ", " +
                                               std::to_string(len) + ")");
    }
    r.need(static_cast<std::size_t>(len) * 4);
    auto& d = diagonals[k];
    d.resize(len);
    for (auto& t : d) {
      const float f = r.f32();
      if (!(std::isfinite(f) && f >= 0.0f && static_cast<double>(f) < kMaxEntryValue)) {
        throw Error(ErrorCode::kCorruptFile, "descriptor entry out of range");
      }
      t = f32_to_ticks(f);
    }
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kCorruptFile, "trailing bytes after descriptor payload");
  return ReducedDescriptor(p, n, std::move(diagonals));
}

void save_descriptor(const ReducedDescriptor& descriptor, const fs::path& path) {
  const auto bytes = serialize(descriptor);
  // Write-then-rename so an interrupted index build never leaves a
  // half-written descriptor under the final name.
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename to " + path.string() + ": " + ec.message());
}

ReducedDescriptor load_descriptor(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace vcd
