#include "vcd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vcd/error.hpp"
#include "vcd/rng.hpp"

namespace vcd {

namespace {

struct Blob {
  double x, y;    // centre, in units of frame width
  double vx, vy;  // per second
  double rx, ry;
  double level;
  double pulse_rate, pulse_amp;
};

struct Wave {
  double kx, ky, speed, phase, amp;
};

struct Shot {
  std::size_t frames;
  double base;
  double grad_x, grad_y;
  double flicker_rate, flicker_amp, fade;
  std::vector<Wave> waves;
  std::vector<Blob> blobs;
};

Shot make_shot(CounterRng& rng, std::size_t frames) {
  Shot s;
  s.frames = frames;
  s.base = rng.uniform(0.12, 0.78);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double g = rng.uniform(0.05, 0.3);
  s.grad_x = g * std::cos(angle);
  s.grad_y = g * std::sin(angle);
  s.flicker_rate = rng.uniform(0.1, 1.5);
  s.flicker_amp = rng.uniform(0.0, 0.08);
  s.fade = rng.uniform(-0.15, 0.15);  // linear light drift over the shot
  const int waves = rng.integer(2, 4);
  for (int k = 0; k < waves; ++k) {
    s.waves.push_back({rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0), rng.uniform(-4.0, 4.0),
                       rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.02, 0.09)});
  }
  const int blobs = rng.integer(2, 6);
  for (int k = 0; k < blobs; ++k) {
    s.blobs.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.6), rng.uniform(-0.35, 0.35),
                       rng.uniform(-0.25, 0.25), rng.uniform(0.03, 0.16), rng.uniform(0.03, 0.14),
                       rng.uniform(0.0, 1.0), rng.uniform(0.2, 2.5), rng.uniform(0.0, 0.3)});
  }
  return s;
}

// Reflect a coordinate into [0, extent].
double bounce(double v, double extent) {
  const double period = 2.0 * extent;
  double m = std::fmod(v, period);
  if (m < 0) m += period;
  return m <= extent ? m : period - m;
}

}  // namespace

Video synthesize_video(const SynthConfig& config) {
  if (config.width == 0 || config.height == 0 || !(config.seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic video needs a positive size and duration");
  }
  const double fps = config.fps.value();
  const auto total = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(config.seconds * fps)));
  CounterRng rng(mix64(config.seed));

  std::vector<Shot> shots;
  for (std::size_t covered = 0; covered < total;) {
    const auto len = std::max<std::size_t>(1, static_cast<std::size_t>(rng.uniform(2.0, 5.0) * fps));
    shots.push_back(make_shot(rng, std::min(len, total - covered)));
    covered += shots.back().frames;
  }

  const std::size_t w = config.width;
  const std::size_t h = config.height;
  const double aspect = static_cast<double>(h) / static_cast<double>(w);
  std::vector<GrayFrame> frames;
  frames.reserve(total);
  for (const auto& shot : shots) {
    for (std::size_t f = 0; f < shot.frames; ++f) {
      const double t = static_cast<double>(f) / fps;
      const double light = shot.flicker_amp * std::sin(2.0 * std::numbers::pi * shot.flicker_rate * t) +
                           shot.fade * static_cast<double>(f) / static_cast<double>(shot.frames);
      std::vector<Pixel> px(w * h);
      for (std::size_t y = 0; y < h; ++y) {
        const double v = static_cast<double>(y) / static_cast<double>(w);
        for (std::size_t x = 0; x < w; ++x) {
          const double u = static_cast<double>(x) / static_cast<double>(w);
          double p = shot.base + shot.grad_x * (u - 0.5) + shot.grad_y * (v - 0.5 * aspect) + light;
          for (const auto& wv : shot.waves) p += wv.amp * std::sin(wv.kx * u + wv.ky * v + wv.speed * t + wv.phase);
          for (const auto& b : shot.blobs) {
            const double cx = bounce(b.x + b.vx * t, 1.0);
            const double cy = bounce(b.y + b.vy * t, aspect);
            const double dx = (u - cx) / b.rx;
            const double dy = (v - cy) / b.ry;
            if (dx * dx + dy * dy <= 1.0) {
              p = b.level + b.pulse_amp * std::sin(2.0 * std::numbers::pi * b.pulse_rate * t) + 0.5 * light;
            }
          }
          const double q = std::floor(std::clamp(p, 0.0, 1.0) * 255.0 + 0.5);
          px[y * w + x] = static_cast<Pixel>(q) / 255.0;
        }
      }
      frames.emplace_back(w, h, std::move(px));
    }
  }
  return Video(config.fps, std::move(frames));
}

}  // namespace vcd
