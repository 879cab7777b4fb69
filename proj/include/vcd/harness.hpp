#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcd/backend.hpp"
#include "vcd/detector.hpp"
#include "vcd/transforms.hpp"

namespace vcd {

inline constexpr std::string_view kNoSource = "NONE";

struct EvalRecord {
  std::string query_id;
  std::optional<std::string> true_source;  // nullopt for distractors
  std::string nearest_id;
  double distance = 0.0;
  std::size_t best_offset = 0;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct QuerySpec {
  std::string id;
  std::filesystem::path path;
  std::optional<std::string> true_source;
};

// Copies (with their source id) and distractors (no source). Base rows are
// corpus members, not queries.
std::vector<QuerySpec> queries_from_manifest(const Manifest& manifest);

// One record per query, in query order. A query whose id is also an index
// id is matched against the rest of the index only.
std::vector<EvalRecord> evaluate(std::span<const QuerySpec> queries, const CorpusIndex& index,
                                 Backend backend = Backend::kOpenMP);

struct DescriptorQuery {
  std::string id;
  const ReducedDescriptor* descriptor = nullptr;
  std::optional<std::string> true_source;
};

// Same, for queries that are already descriptors.
std::vector<EvalRecord> evaluate(std::span<const DescriptorQuery> queries, const CorpusIndex& index,
                                 Backend backend = Backend::kOpenMP);

enum class Outcome { kTruePositive, kFalsePositive, kTrueNegative, kFalseNegative };

// Positive iff distance < threshold. A positive is only true when the nearest
// neighbor is the query's actual source.
Outcome classify(const EvalRecord& record, double threshold);

struct SweepRow {
  double threshold = 0.0;
  double precision = 1.0;  // 1 when nothing is positive
  double accuracy = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};
using SweepReport = std::vector<SweepRow>;

SweepRow score(std::span<const EvalRecord> records, double threshold);
// Thresholds must be ascending.
SweepReport sweep(std::span<const EvalRecord> records, std::span<const double> thresholds);

// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_threshold_range(std::string_view text);

enum class CalibrationTarget { kMaxAccuracy, kZeroFpMaxRecall };
CalibrationTarget parse_calibration_target(std::string_view name);  // "max-accuracy" | "zero-fp-max-recall"
std::string_view calibration_target_name(CalibrationTarget target);

// Candidates: one value below every distance, the midpoints between
// consecutive distinct distances, and one value above all of them. Returns
// the candidate optimizing the target; ties go to the smallest.
double calibrate(std::span<const EvalRecord> records, CalibrationTarget target);

void write_records(std::ostream& out, std::span<const EvalRecord> records);
std::vector<EvalRecord> read_records(std::istream& in);
void write_sweep(std::ostream& out, const SweepReport& report);

struct GridCell {
  std::size_t width = 0;
  Fps fps;
  double score = 0.0;      // (tp + tn) / queries at the calibrated threshold
  double threshold = 0.0;  // max-accuracy calibration
  std::string error;       // non-empty when the cell failed
};

// For each (width, fps): rebuilds the base index in memory, evaluates every
// copy and distractor of the manifest, calibrates for accuracy and reports
// the fraction of correctly answered queries.
std::vector<GridCell> grid_run(const Manifest& manifest, std::span<const std::size_t> widths,
                               std::span<const Fps> fps_values, const ImageMetricId& metric,
                               const DistanceConfig& distance, Backend backend = Backend::kOpenMP);
void write_grid(std::ostream& out, std::span<const GridCell> cells);

struct BenchRow {
  std::string stage;        // extract | compare
  std::size_t videos = 0;
  std::size_t frames = 0;   // preprocessed frames across those videos
  std::size_t work = 0;     // descriptors built or pairs compared
  double seconds = 0.0;     // best of the repeats
  double rate = 0.0;        // descriptors/minute or comparisons/second
};

struct BenchReport {
  std::vector<BenchRow> rows;  // extract and compare on the first half, then on all videos
  double extract_time_ratio = 0.0, extract_frame_ratio = 0.0;
  double compare_time_ratio = 0.0, compare_pair_ratio = 0.0;
};

// Single-threaded, serial kernels. Videos are decoded and preprocessed
// before any timer starts.
BenchReport bench(std::span<const Video> videos, const IndexConfig& config, int repeats = 3);
void write_bench(std::ostream& out, const BenchReport& report);

}  // namespace vcd
