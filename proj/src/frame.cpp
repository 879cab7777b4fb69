#include "vcd/frame.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "vcd/error.hpp"

namespace vcd {

Fps::Fps(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame rate must be positive, got " + std::to_string(num) + "/" + std::to_string(den));
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Fps Fps::parse(std::string_view text) {
  const auto sep = text.find_first_of("/:");
  if (sep != std::string_view::npos) {
    return Fps(parse_int(text.substr(0, sep)), parse_int(text.substr(sep + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    return Fps(parse_int(text));
  }
  // Decimal: scale by 10^digits so "12.5" becomes 125/10.
  std::string digits(text.substr(0, dot));
  std::string_view frac = text.substr(dot + 1);
  if (frac.size() > 9) frac = frac.substr(0, 9);
  digits += frac;
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return Fps(parse_int(digits), den);
}

std::string Fps::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

GrayFrame::GrayFrame(std::size_t width, std::size_t height, Pixel fill)
    : GrayFrame(width, height, std::vector<Pixel>(width * height, fill)) {}

GrayFrame::GrayFrame(std::size_t width, std::size_t height, std::vector<Pixel> pixels)
    : GrayFrame(NoCheck{}, width, height, std::move(pixels)) {
  for (Pixel p : pixels_) {
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw Error(ErrorCode::kRangeError, "pixel value outside [0,1]: " + std::to_string(p));
    }
  }
}

GrayFrame::GrayFrame(NoCheck, std::size_t width, std::size_t height, std::vector<Pixel> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame dimensions must be at least 1x1");
  }
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pixel buffer has " + std::to_string(pixels_.size()) + " values for a " +
                    std::to_string(width_) + "x" + std::to_string(height_) + " frame");
  }
}

GrayFrame GrayFrame::unchecked(std::size_t width, std::size_t height, std::vector<Pixel> pixels) {
  return GrayFrame(NoCheck{}, width, height, std::move(pixels));
}

double GrayFrame::mean() const noexcept {
  double sum = 0.0;
  for (Pixel p : pixels_) sum += p;
  return pixels_.empty() ? 0.0 : sum / static_cast<double>(pixels_.size());
}

Video::Video(Fps fps, std::vector<GrayFrame> frames) : fps_(fps), frames_(std::move(frames)) {
  if (frames_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a video needs at least one frame");
  }
  const auto w = frames_.front().width();
  const auto h = frames_.front().height();
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (frames_[i].width() != w || frames_[i].height() != h) {
      throw Error(ErrorCode::kInconsistentFrames,
                  "frame " + std::to_string(i) + " is " + std::to_string(frames_[i].width()) + "x" +
                      std::to_string(frames_[i].height()) + ", expected " + std::to_string(w) + "x" +
                      std::to_string(h));
    }
  }
}

std::uint8_t quantize8(Pixel p) noexcept {
  const double scaled = std::floor(static_cast<double>(p) * 255.0 + 0.5);
  if (!(scaled > 0.0)) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<std::uint8_t>(scaled);
}

Video quantize8(const Video& video) {
  std::vector<GrayFrame> frames;
  frames.reserve(video.size());
  for (const auto& f : video.frames()) {
    std::vector<Pixel> px(f.size());
    auto src = f.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = static_cast<Pixel>(quantize8(src[i])) / 255.0;
    }
    frames.emplace_back(f.width(), f.height(), std::move(px));
  }
  return Video(video.fps(), std::move(frames));
}

}  // namespace vcd
