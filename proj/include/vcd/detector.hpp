#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcd/backend.hpp"
#include "vcd/descriptor.hpp"
#include "vcd/image_metrics.hpp"
#include "vcd/preprocess.hpp"
#include "vcd/video_distance.hpp"

namespace vcd {

inline constexpr double kDefaultThreshold = 0.3;

struct IndexConfig {
  PreprocessConfig preprocess;
  ImageMetricId metric;
  DistanceConfig distance;
};

// Descriptor provenance expected from a video preprocessed under `config`.
// The frame width may be smaller than the target for narrow sources.
bool matches_config(const Provenance& p, const IndexConfig& config);

// preprocess -> build_reduced -> rounded to file precision, so in-memory
// query descriptors compare exactly like descriptors loaded from disk.
ReducedDescriptor extract_descriptor(const Video& video, const IndexConfig& config,
                                     Backend backend = Backend::kOpenMP);

// The id a video gets in an index: its file name without extension.
std::string video_id(const std::filesystem::path& path);

struct IndexEntry {
  std::string id;
  std::filesystem::path descriptor_path;  // relative to the index directory
  std::filesystem::path source_path;
  std::size_t n = 0;
  double duration = 0.0;
  std::uintmax_t source_size = 0;
  std::int64_t source_mtime = 0;
};

struct IndexFailure {
  std::filesystem::path source_path;
  std::string error;
};

// Immutable after construction. Holds every descriptor in memory.
class CorpusIndex {
 public:
  CorpusIndex() = default;
  CorpusIndex(IndexConfig config, std::vector<IndexEntry> entries, std::vector<ReducedDescriptor> descriptors,
              std::vector<IndexFailure> failures = {});

  // Reads dir/index.json and every descriptor it lists; descriptors whose
  // provenance does not match the index config are rejected.
  static CorpusIndex load(const std::filesystem::path& dir);
  void save_manifest(const std::filesystem::path& dir) const;

  const IndexConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const IndexEntry> entries() const noexcept { return entries_; }
  std::span<const ReducedDescriptor> descriptors() const noexcept { return descriptors_; }
  std::span<const IndexFailure> failures() const noexcept { return failures_; }
  std::optional<std::size_t> find(std::string_view id) const;

 private:
  IndexConfig config_;
  std::vector<IndexEntry> entries_;
  std::vector<ReducedDescriptor> descriptors_;
  std::vector<IndexFailure> failures_;
};

inline constexpr std::string_view kIndexManifestName = "index.json";

struct BuildStats {
  std::size_t extracted = 0;
  std::size_t reused = 0;
  std::size_t failed = 0;
};

// Extracts one descriptor per video into output_dir and writes the manifest.
// Descriptors from a previous run with the same config are reused when the
// source's size and mtime are unchanged. Per-video failures are recorded in
// the manifest; an index with no entry at all raises EmptyIndex.
CorpusIndex build_index(std::span<const std::filesystem::path> videos, const IndexConfig& config,
                        const std::filesystem::path& output_dir, Backend backend = Backend::kOpenMP,
                        BuildStats* stats = nullptr);

struct Neighbor {
  std::size_t entry = 0;
  std::string id;
  double distance = 0.0;
  std::size_t best_offset = 0;
};

// Exhaustive scan under the windowed descriptor distance. Ties go to the
// lexicographically smallest id. exclude_id drops one entry (self-queries).
// Entries whose provenance is not compatible with the query (a source
// narrower than the target width) are not compared; if that leaves nothing,
// IncompatibleDescriptors.
Neighbor nearest_neighbor(const ReducedDescriptor& query, const CorpusIndex& index, const DistanceConfig& distance,
                          Backend backend = Backend::kOpenMP, std::optional<std::string_view> exclude_id = {});

struct Verdict {
  bool is_copy = false;
  std::string nearest_id;
  double distance = 0.0;
  std::size_t best_offset = 0;
  double threshold = 0.0;
};

// is_copy iff distance < threshold (strict).
Verdict make_verdict(const Neighbor& nearest, double threshold);

Verdict decide(const Video& query, const CorpusIndex& index, double threshold, const DistanceConfig& distance,
               Backend backend = Backend::kOpenMP);
Verdict decide(const std::string& query_source, const CorpusIndex& index, double threshold,
               const DistanceConfig& distance, Backend backend = Backend::kOpenMP);

}  // namespace vcd
