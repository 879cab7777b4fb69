#include "vcd/preprocess.hpp"

#include <algorithm>
#include <vector>

#include "vcd/error.hpp"

namespace vcd {

namespace {

// Sparse 1-D box weights: output sample o covers source interval
// [o*src/dst, (o+1)*src/dst). Weights are overlap lengths in units of 1/dst,
// so they are integers summing to src; dividing once by src keeps constant
// inputs exact.
struct Tap {
  std::size_t src;
  double weight;
};

std::vector<std::vector<Tap>> box_taps(std::size_t src, std::size_t dst) {
  std::vector<std::vector<Tap>> taps(dst);
  for (std::size_t o = 0; o < dst; ++o) {
    // Integer endpoints in units of 1/dst keep the overlap arithmetic exact.
    const std::size_t lo = o * src;        // start * dst
    const std::size_t hi = (o + 1) * src;  // end * dst
    for (std::size_t s = lo / dst; s * dst < hi; ++s) {
      const std::size_t a = std::max(lo, s * dst);
      const std::size_t b = std::min(hi, (s + 1) * dst);
      if (b > a) {
        taps[o].push_back({s, static_cast<double>(b - a)});
      }
    }
  }
  return taps;
}

// Weighted mean of the tapped samples. Taps are summed in pairs from both
// ends, so a mirrored tap list (a flipped frame) gives the identical result,
// and offsets are taken from the smallest sample so flat regions stay exact.
template <class Sample>
double tap_mean(const std::vector<Tap>& taps, double total, Sample sample) {
  double base = sample(taps.front().src);
  for (const auto& t : taps) base = std::min(base, sample(t.src));
  auto term = [&](const Tap& t) { return t.weight * (sample(t.src) - base); };
  double acc = 0.0;
  std::size_t i = 0, j = taps.size();
  for (; j - i >= 2; ++i) {
    --j;
    acc += term(taps[i]) + term(taps[j]);
  }
  if (i < j) acc += term(taps[i]);
  return base + acc / total;
}

}  // namespace

void validate(const PreprocessConfig& config) {
  if (config.target_width == 0) throw Error(ErrorCode::kInvalidArgument, "target width must be >= 1");
}

std::size_t scaled_height(std::size_t width, std::size_t height, std::size_t target_width) {
  // round_half_up(height * target_width / width) in integers
  const std::size_t h = (2 * height * target_width + width) / (2 * width);
  return std::max<std::size_t>(1, h);
}

GrayFrame resample_area(const GrayFrame& frame, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw Error(ErrorCode::kInvalidArgument, "output size must be >= 1x1");
  if (width == frame.width() && height == frame.height()) return frame;

  const auto xt = box_taps(frame.width(), width);
  const auto yt = box_taps(frame.height(), height);
  const auto src = frame.pixels();

  // Horizontal pass into a (width x src height) buffer, then vertical.
  std::vector<double> tmp(width * frame.height());
  for (std::size_t y = 0; y < frame.height(); ++y) {
    const Pixel* row = src.data() + y * frame.width();
    for (std::size_t x = 0; x < width; ++x) {
      tmp[y * width + x] = tap_mean(xt[x], static_cast<double>(frame.width()), [&](std::size_t i) { return row[i]; });
    }
  }
  std::vector<Pixel> out(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double acc = tap_mean(yt[y], static_cast<double>(frame.height()),
                                  [&](std::size_t i) { return tmp[i * width + x]; });
      out[y * width + x] = static_cast<Pixel>(std::clamp(acc, 0.0, 1.0));
    }
  }
  return GrayFrame(width, height, std::move(out));
}

GrayFrame downscale(const GrayFrame& frame, std::size_t target_width) {
  if (target_width == 0) throw Error(ErrorCode::kInvalidArgument, "target width must be >= 1");
  if (target_width >= frame.width()) return frame;
  return resample_area(frame, target_width, scaled_height(frame.width(), frame.height(), target_width));
}

Video resample_fps(const Video& video, Fps target_fps) {
  const Fps src = video.fps();
  if (src == target_fps) return video;
  const auto n = static_cast<std::int64_t>(video.size());
  // count = ceil(n * (tn/td) / (sn/sd)) = ceil(n * tn * sd / (td * sn))
  const __int128 num = static_cast<__int128>(n) * target_fps.num() * src.den();
  const __int128 den = static_cast<__int128>(target_fps.den()) * src.num();
  const auto count = std::max<std::int64_t>(1, static_cast<std::int64_t>((num + den - 1) / den));

  std::vector<GrayFrame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    // floor(k * (sn/sd) / (tn/td)) = floor(k * sn * td / (sd * tn))
    const __int128 a = static_cast<__int128>(k) * src.num() * target_fps.den();
    const __int128 b = static_cast<__int128>(src.den()) * target_fps.num();
    const auto idx = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(a / b));
    frames.push_back(video[static_cast<std::size_t>(idx)]);
  }
  return Video(target_fps, std::move(frames));
}

Video preprocess(const Video& video, const PreprocessConfig& config) {
  validate(config);
  Video resampled = resample_fps(video, config.target_fps);
  if (config.target_width >= resampled.width()) return resampled;
  std::vector<GrayFrame> frames;
  frames.reserve(resampled.size());
  for (const auto& f : resampled.frames()) frames.push_back(downscale(f, config.target_width));
  return Video(config.target_fps, std::move(frames));
}

}  // namespace vcd
