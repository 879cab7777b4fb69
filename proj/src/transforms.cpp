#include "vcd/transforms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vcd/csv.hpp"
#include "vcd/error.hpp"
#include "vcd/media_io.hpp"
#include "vcd/preprocess.hpp"
#include "vcd/rng.hpp"

namespace vcd {

namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidSpec, what); }

// Border size for letterbox/crop: round-half-up, but always leaving at least
// one interior row (column).
std::size_t border(double fraction, std::size_t extent) {
  const auto b = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(extent) + 0.5));
  return std::min(b, (extent - 1) / 2);
}

template <typename F>
Video map_frames(const Video& video, F&& f) {
  std::vector<GrayFrame> frames;
  frames.reserve(video.size());
  for (const auto& frame : video.frames()) frames.push_back(f(frame));
  return Video(video.fps(), std::move(frames));
}

GrayFrame flip_h(const GrayFrame& f) {
  std::vector<Pixel> px(f.size());
  const auto src = f.pixels();
  for (std::size_t y = 0; y < f.height(); ++y) {
    for (std::size_t x = 0; x < f.width(); ++x) px[y * f.width() + x] = src[y * f.width() + (f.width() - 1 - x)];
  }
  return GrayFrame::unchecked(f.width(), f.height(), std::move(px));
}

GrayFrame flip_v(const GrayFrame& f) {
  std::vector<Pixel> px(f.size());
  const auto src = f.pixels();
  for (std::size_t y = 0; y < f.height(); ++y) {
    std::copy_n(src.data() + (f.height() - 1 - y) * f.width(), f.width(), px.data() + y * f.width());
  }
  return GrayFrame::unchecked(f.width(), f.height(), std::move(px));
}

GrayFrame brightness(const GrayFrame& f, const Brightness& b) {
  std::vector<Pixel> px(f.size());
  const auto src = f.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    double v = b.alpha * static_cast<double>(src[i]) + b.beta;
    if (b.clamp) v = std::clamp(v, 0.0, 1.0);
    px[i] = static_cast<Pixel>(v);
  }
  return b.clamp ? GrayFrame(f.width(), f.height(), std::move(px))
                 : GrayFrame::unchecked(f.width(), f.height(), std::move(px));
}

// Separable (2r+1)^2 box mean with replicated edges.
GrayFrame box_blur(const GrayFrame& f, std::size_t r) {
  const auto w = static_cast<std::ptrdiff_t>(f.width());
  const auto h = static_cast<std::ptrdiff_t>(f.height());
  const auto rr = static_cast<std::ptrdiff_t>(r);
  const auto src = f.pixels();
  const double norm = 1.0 / static_cast<double>(2 * r + 1);
  std::vector<double> tmp(f.size());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -rr; k <= rr; ++k) acc += src[y * w + std::clamp(x + k, std::ptrdiff_t{0}, w - 1)];
      tmp[y * w + x] = acc * norm;
    }
  }
  std::vector<Pixel> px(f.size());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -rr; k <= rr; ++k) acc += tmp[std::clamp(y + k, std::ptrdiff_t{0}, h - 1) * w + x];
      px[y * w + x] = static_cast<Pixel>(std::clamp(acc * norm, 0.0, 1.0));
    }
  }
  return GrayFrame(f.width(), f.height(), std::move(px));
}

GrayFrame letterbox(const GrayFrame& f, double fraction) {
  const std::size_t b = border(fraction, f.height());
  std::vector<Pixel> px(f.pixels().begin(), f.pixels().end());
  std::fill_n(px.begin(), b * f.width(), 0.0f);
  std::fill(px.end() - static_cast<std::ptrdiff_t>(b * f.width()), px.end(), 0.0f);
  return GrayFrame::unchecked(f.width(), f.height(), std::move(px));
}

GrayFrame crop(const GrayFrame& f, double fraction) {
  const std::size_t by = border(fraction, f.height());
  const std::size_t bx = border(fraction, f.width());
  const std::size_t w = f.width() - 2 * bx;
  const std::size_t h = f.height() - 2 * by;
  std::vector<Pixel> px(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) px[y * w + x] = f.at(x + bx, y + by);
  }
  return GrayFrame::unchecked(w, h, std::move(px));
}

GrayFrame add_noise(const GrayFrame& f, const Noise& n, std::uint64_t frame_index) {
  std::vector<Pixel> px(f.size());
  const auto src = f.pixels();
  const std::uint64_t base = frame_index * static_cast<std::uint64_t>(f.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = static_cast<double>(src[i]) + n.sigma * gaussian(n.seed, base + i);
    px[i] = static_cast<Pixel>(std::clamp(v, 0.0, 1.0));
  }
  return GrayFrame(f.width(), f.height(), std::move(px));
}

std::pair<std::size_t, std::size_t> resolve(const Subclip& s, std::size_t n) {
  if (!s.relative) return {static_cast<std::size_t>(s.start), static_cast<std::size_t>(s.length)};
  const auto start = static_cast<std::size_t>(std::floor(s.start * static_cast<double>(n)));
  const auto length = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(s.length * static_cast<double>(n))));
  return {start, length};
}

Video apply_impl(const Video& video, const TransformSpec& spec, bool testing) {
  validate(spec);
  if (!testing) {
    if (const auto* b = std::get_if<Brightness>(&spec); b && !b->clamp) {
      invalid("unclamped brightness is only available through apply_for_testing");
    }
  }
  return std::visit(
      overloaded{
          [&](const FlipH&) { return map_frames(video, flip_h); },
          [&](const FlipV&) { return map_frames(video, flip_v); },
          [&](const Brightness& b) { return map_frames(video, [&](const GrayFrame& f) { return brightness(f, b); }); },
          [&](const BoxBlur& b) { return map_frames(video, [&](const GrayFrame& f) { return box_blur(f, b.radius); }); },
          [&](const Letterbox& l) { return map_frames(video, [&](const GrayFrame& f) { return letterbox(f, l.fraction); }); },
          [&](const Crop& c) { return map_frames(video, [&](const GrayFrame& f) { return crop(f, c.fraction); }); },
          [&](const Rescale& r) {
            return map_frames(video, [&](const GrayFrame& f) {
              return resample_area(f, r.width, scaled_height(f.width(), f.height(), r.width));
            });
          },
          [&](const Subclip& s) {
            const auto [start, length] = resolve(s, video.size());
            if (length == 0 || start + length > video.size()) {
              invalid("subclip [" + std::to_string(start) + ", +" + std::to_string(length) + ") outside a " +
                      std::to_string(video.size()) + "-frame video");
            }
            auto frames = video.frames().subspan(start, length);
            return Video(video.fps(), std::vector<GrayFrame>(frames.begin(), frames.end()));
          },
          [&](const Noise& n) {
            std::vector<GrayFrame> frames;
            frames.reserve(video.size());
            for (std::size_t i = 0; i < video.size(); ++i) frames.push_back(add_noise(video[i], n, i));
            return Video(video.fps(), std::move(frames));
          },
      },
      spec);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) invalid("bad number '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) invalid("bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_args(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = s.find(',');
    out.push_back(s.substr(0, c));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

}  // namespace

void validate(const TransformSpec& spec) {
  std::visit(overloaded{
                 [](const FlipH&) {},
                 [](const FlipV&) {},
                 [](const Brightness& b) {
                   if (!(b.alpha > 0.0) || !std::isfinite(b.beta)) invalid("brightness needs alpha > 0");
                 },
                 [](const BoxBlur& b) {
                   if (b.radius < 1) invalid("blur radius must be >= 1");
                 },
                 [](const Letterbox& l) {
                   if (!(l.fraction >= 0.0 && l.fraction <= 0.4)) invalid("letterbox fraction must be in [0, 0.4]");
                 },
                 [](const Crop& c) {
                   if (!(c.fraction >= 0.0 && c.fraction <= 0.4)) invalid("crop fraction must be in [0, 0.4]");
                 },
                 [](const Rescale& r) {
                   if (r.width < 1) invalid("rescale width must be >= 1");
                 },
                 [](const Subclip& s) {
                   if (!(s.start >= 0.0) || !(s.length > 0.0)) invalid("subclip needs start >= 0 and length > 0");
                   if (s.relative && !(s.start + s.length <= 1.0)) invalid("relative subclip exceeds the video");
                 },
                 [](const Noise& n) {
                   if (!(n.sigma >= 0.0 && n.sigma <= 1.0)) invalid("noise sigma must be in [0,1]");
                 },
             },
             spec);
}

TransformSpec parse_transform(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view op = text.substr(0, colon);
  const std::vector<std::string_view> args =
      colon == std::string_view::npos ? std::vector<std::string_view>{} : split_args(text.substr(colon + 1));
  auto need = [&](std::size_t k) {
    if (args.size() != k) invalid("'" + std::string(op) + "' takes " + std::to_string(k) + " argument(s)");
  };
  TransformSpec spec;
  if (op == "flip-h") {
    need(0);
    spec = FlipH{};
  } else if (op == "flip-v") {
    need(0);
    spec = FlipV{};
  } else if (op == "brightness") {
    if (args.size() == 1) {
      spec = Brightness{parse_double(args[0]), 0.0, true};
    } else {
      need(2);
      spec = Brightness{parse_double(args[0]), parse_double(args[1]), true};
    }
  } else if (op == "blur") {
    need(1);
    spec = BoxBlur{static_cast<std::size_t>(parse_u64(args[0]))};
  } else if (op == "letterbox") {
    need(1);
    spec = Letterbox{parse_double(args[0])};
  } else if (op == "crop") {
    need(1);
    spec = Crop{parse_double(args[0])};
  } else if (op == "rescale") {
    need(1);
    spec = Rescale{static_cast<std::size_t>(parse_u64(args[0]))};
  } else if (op == "subclip") {
    need(2);
    const bool rel = args[0].ends_with('%') && args[1].ends_with('%');
    if (rel) {
      spec = Subclip{parse_double(args[0].substr(0, args[0].size() - 1)) / 100.0,
                     parse_double(args[1].substr(0, args[1].size() - 1)) / 100.0, true};
    } else {
      spec = Subclip{static_cast<double>(parse_u64(args[0])), static_cast<double>(parse_u64(args[1])), false};
    }
  } else if (op == "noise") {
    need(2);
    spec = Noise{parse_double(args[0]), parse_u64(args[1])};
  } else {
    invalid("unknown transform '" + std::string(op) + "'");
  }
  validate(spec);
  return spec;
}

std::string to_string(const TransformSpec& spec) {
  auto g = [](double v) { return csv::fmt(v); };
  return std::visit(overloaded{
                        [](const FlipH&) -> std::string { return "flip-h"; },
                        [](const FlipV&) -> std::string { return "flip-v"; },
                        [&](const Brightness& b) { return "brightness:" + g(b.alpha) + "," + g(b.beta); },
                        [](const BoxBlur& b) { return "blur:" + std::to_string(b.radius); },
                        [&](const Letterbox& l) { return "letterbox:" + g(l.fraction); },
                        [&](const Crop& c) { return "crop:" + g(c.fraction); },
                        [](const Rescale& r) { return "rescale:" + std::to_string(r.width); },
                        [&](const Subclip& s) {
                          if (s.relative) return "subclip:" + g(s.start * 100) + "%," + g(s.length * 100) + "%";
                          return "subclip:" + g(s.start) + "," + g(s.length);
                        },
                        [&](const Noise& n) { return "noise:" + g(n.sigma) + "," + std::to_string(n.seed); },
                    },
                    spec);
}

Video apply(const Video& video, const TransformSpec& spec) { return apply_impl(video, spec, false); }

Video apply_for_testing(const Video& video, const TransformSpec& spec) { return apply_impl(video, spec, true); }

// ------------------------------------------------------------------ corpus

std::size_t Manifest::copy_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.is_copy(); }));
}

std::vector<fs::path> Manifest::bases() const {
  std::vector<fs::path> out;
  for (const auto& r : rows) {
    if (r.is_base()) out.push_back(r.copy_path);
  }
  return out;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const fs::path dir = path.parent_path();
  auto rel = [&](const fs::path& p) {
    if (p.empty()) return std::string();
    return p.lexically_relative(dir.empty() ? fs::path(".") : dir).generic_string();
  };
  csv::write_row(out, {"copy_path", "source_path", "transform_string"});
  for (const auto& r : manifest.rows) csv::write_row(out, {rel(r.copy_path), rel(r.source_path), r.transform_string});
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

Manifest read_manifest(const fs::path& where) {
  const fs::path path = fs::is_directory(where) ? where / std::string(kManifestName) : where;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::string> f;
  if (!csv::read_row(in, f) || f.size() != 3 || f[0] != "copy_path") {
    throw Error(ErrorCode::kParseError, path.string() + ": missing manifest header");
  }
  const fs::path dir = path.parent_path();
  auto resolve_path = [&](const std::string& s) -> fs::path {
    if (s.empty()) return {};
    fs::path p(s);
    return p.is_relative() ? dir / p : p;
  };
  Manifest m;
  while (csv::read_row(in, f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 3) throw Error(ErrorCode::kParseError, path.string() + ": manifest row needs 3 fields");
    m.rows.push_back({resolve_path(f[0]), resolve_path(f[1]), f[2]});
  }
  return m;
}

Manifest make_corpus(std::span<const NamedVideo> bases, std::span<const TransformSpec> transforms,
                     const fs::path& output_dir, std::uint64_t seed, std::span<const NamedVideo> distractors) {
  if (bases.empty()) throw Error(ErrorCode::kInvalidArgument, "make_corpus needs at least one base video");
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + output_dir.string() + ": " + ec.message());

  Manifest m;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const fs::path base_path = output_dir / (bases[b].name + ".y4m");
    write_y4m(bases[b].video, base_path);
    m.rows.push_back({base_path, {}, "base"});
    for (std::size_t t = 0; t < transforms.size(); ++t) {
      TransformSpec spec = transforms[t];
      if (auto* n = std::get_if<Noise>(&spec)) n->seed = hash_counter(seed ^ n->seed, b * transforms.size() + t);
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "__t%02zu", t);
      const fs::path copy_path = output_dir / (bases[b].name + suffix + ".y4m");
      write_y4m(vcd::apply(bases[b].video, spec), copy_path);
      m.rows.push_back({copy_path, base_path, to_string(spec)});
    }
  }
  for (const auto& d : distractors) {
    const fs::path p = output_dir / (d.name + ".y4m");
    write_y4m(d.video, p);
    m.rows.push_back({p, {}, "distractor"});
  }
  write_manifest(m, output_dir / kManifestName);
  return m;
}

}  // namespace vcd
