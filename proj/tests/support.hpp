#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vcd/frame.hpp"
#include "vcd/rng.hpp"

#include <unistd.h>

namespace vcd::test {

// Hand-rolled generators for the property tests. Everything is derived from
// an explicit seed so failures are reproducible from the printed seed.

inline GrayFrame random_frame(CounterRng& rng, std::size_t w, std::size_t h, bool quantized = false) {
  std::vector<Pixel> px(w * h);
  for (auto& p : px) {
    p = static_cast<Pixel>(rng.uniform());
    if (quantized) p = static_cast<Pixel>(quantize8(p)) / 255.0;
  }
  return GrayFrame(w, h, std::move(px));
}

inline Video random_video(std::uint64_t seed, std::size_t n, std::size_t w, std::size_t h, Fps fps = Fps(8),
                          bool quantized = false) {
  CounterRng rng(mix64(seed));
  std::vector<GrayFrame> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(random_frame(rng, w, h, quantized));
  return Video(fps, std::move(frames));
}

// Smoothly varying content: a random walk per pixel. Closer to real footage
// than white noise, so lag structure actually differs between lags.
inline Video walk_video(std::uint64_t seed, std::size_t n, std::size_t w, std::size_t h, Fps fps = Fps(8)) {
  CounterRng rng(mix64(seed ^ 0x5eed));
  std::vector<Pixel> cur(w * h);
  for (auto& p : cur) p = static_cast<Pixel>(rng.uniform(0.2, 0.8));
  std::vector<GrayFrame> frames;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& p : cur) p = static_cast<Pixel>(std::clamp(p + rng.uniform(-0.08, 0.08), 0.0, 1.0));
    frames.emplace_back(w, h, cur);
  }
  return Video(fps, std::move(frames));
}

// 1x1-pixel video with the given intensities.
inline Video pixel_video(const std::vector<Pixel>& values, Fps fps = Fps(8)) {
  std::vector<GrayFrame> frames;
  for (Pixel v : values) frames.emplace_back(1, 1, v);
  return Video(fps, std::move(frames));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("vcd_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(mix64(reinterpret_cast<std::uintptr_t>(this)) % 1000003));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace vcd::test
