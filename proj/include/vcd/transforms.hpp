#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vcd/frame.hpp"

namespace vcd {

struct FlipH {  // mirror left-right
  friend bool operator==(const FlipH&, const FlipH&) = default;
};
struct FlipV {  // mirror top-bottom
  friend bool operator==(const FlipV&, const FlipV&) = default;
};
struct Brightness {
  double alpha = 1.0;  // gain, > 0
  double beta = 0.0;   // offset
  bool clamp = true;
  friend bool operator==(const Brightness&, const Brightness&) = default;
};
struct BoxBlur {
  std::size_t radius = 1;
  friend bool operator==(const BoxBlur&, const BoxBlur&) = default;
};
// Blacks out round(fraction * height) rows at the top and at the bottom.
struct Letterbox {
  double fraction = 0.1;
  friend bool operator==(const Letterbox&, const Letterbox&) = default;
};
// Removes round(fraction * height) rows top and bottom and
// round(fraction * width) columns left and right.
struct Crop {
  double fraction = 0.1;
  friend bool operator==(const Crop&, const Crop&) = default;
};
struct Rescale {
  std::size_t width = 132;
  friend bool operator==(const Rescale&, const Rescale&) = default;
};
// start/length are frame counts, or fractions of the video length when
// relative is set (written "subclip:25%,50%").
struct Subclip {
  double start = 0;
  double length = 0;
  bool relative = false;
  friend bool operator==(const Subclip&, const Subclip&) = default;
};
struct Noise {
  double sigma = 0.01;
  std::uint64_t seed = 0;
  friend bool operator==(const Noise&, const Noise&) = default;
};

using TransformSpec = std::variant<FlipH, FlipV, Brightness, BoxBlur, Letterbox, Crop, Rescale, Subclip, Noise>;

void validate(const TransformSpec& spec);

// "flip-h", "flip-v", "brightness:a,b", "blur:r", "letterbox:f", "crop:f",
// "rescale:w", "subclip:s,l", "noise:sigma,seed".
TransformSpec parse_transform(std::string_view text);
std::string to_string(const TransformSpec& spec);

Video apply(const Video& video, const TransformSpec& spec);

// Same as apply but also accepts Brightness{clamp=false}, whose output may
// leave [0,1]. Frames produced this way skip the range invariant; meant for
// property tests of the distance functions only.
Video apply_for_testing(const Video& video, const TransformSpec& spec);

struct NamedVideo {
  std::string name;
  Video video;
};

// One row per written file. Bases are tagged "base" and distractors
// "distractor", both with an empty source_path; every other row is a copy of
// source_path produced by transform_string.
struct ManifestRow {
  std::filesystem::path copy_path;
  std::filesystem::path source_path;
  std::string transform_string;

  bool is_base() const { return transform_string == "base"; }
  bool is_distractor() const { return transform_string == "distractor"; }
  bool is_copy() const { return !is_base() && !is_distractor(); }
};

struct Manifest {
  std::vector<ManifestRow> rows;

  std::size_t copy_count() const;
  std::vector<std::filesystem::path> bases() const;
};

inline constexpr std::string_view kManifestName = "manifest.csv";

// Paths are stored relative to the manifest's directory and resolved on read.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
// A directory argument reads the manifest.csv inside it.
Manifest read_manifest(const std::filesystem::path& path);

// Writes every base, every (base x transform) copy and every distractor as
// Y4M under output_dir, then output_dir/manifest.csv. The seed perturbs the
// Noise seeds per copy; equal inputs and seed give byte-identical output.
Manifest make_corpus(std::span<const NamedVideo> bases, std::span<const TransformSpec> transforms,
                     const std::filesystem::path& output_dir, std::uint64_t seed,
                     std::span<const NamedVideo> distractors = {});

}  // namespace vcd
