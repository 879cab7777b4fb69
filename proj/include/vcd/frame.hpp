#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vcd {

using Pixel = double;

// Positive rational frame rate, stored in lowest terms.
class Fps {
 public:
  Fps() = default;
  Fps(std::int64_t num, std::int64_t den = 1);

  // Accepts "8", "25/2", "25:2" and decimal forms such as "12.5".
  static Fps parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend bool operator==(const Fps&, const Fps&) = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

// One grayscale raster, row-major, intensities in [0,1].
class GrayFrame {
 public:
  GrayFrame() = default;
  GrayFrame(std::size_t width, std::size_t height, Pixel fill = 0.0);
  GrayFrame(std::size_t width, std::size_t height, std::vector<Pixel> pixels);

  // Skips the [0,1] range check. Only the testing transforms use this, to
  // model unclamped brightness gain.
  static GrayFrame unchecked(std::size_t width, std::size_t height, std::vector<Pixel> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  std::span<const Pixel> pixels() const noexcept { return pixels_; }
  Pixel at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
  double mean() const noexcept;

  friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

 private:
  struct NoCheck {};
  GrayFrame(NoCheck, std::size_t width, std::size_t height, std::vector<Pixel> pixels);

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Pixel> pixels_;
};

class Video {
 public:
  Video() = default;
  Video(Fps fps, std::vector<GrayFrame> frames);

  Fps fps() const noexcept { return fps_; }
  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t width() const noexcept { return frames_.empty() ? 0 : frames_.front().width(); }
  std::size_t height() const noexcept { return frames_.empty() ? 0 : frames_.front().height(); }
  const GrayFrame& operator[](std::size_t i) const { return frames_[i]; }
  std::span<const GrayFrame> frames() const noexcept { return frames_; }
  double duration_seconds() const noexcept { return static_cast<double>(size()) / fps_.value(); }

  friend bool operator==(const Video&, const Video&) = default;

 private:
  Fps fps_;
  std::vector<GrayFrame> frames_;
};

// q(p) = round_half_up(p * 255) clamped to [0,255].
std::uint8_t quantize8(Pixel p) noexcept;

// Applies the 8-bit write/read round trip to every pixel.
Video quantize8(const Video& video);

}  // namespace vcd
