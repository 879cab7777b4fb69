#include "vcd/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "vcd/csv.hpp"
#include "vcd/error.hpp"
#include "vcd/media_io.hpp"

namespace vcd {

namespace fs = std::filesystem;

std::vector<QuerySpec> queries_from_manifest(const Manifest& manifest) {
  std::vector<QuerySpec> out;
  for (const auto& row : manifest.rows) {
    if (row.is_base()) continue;
    QuerySpec q{video_id(row.copy_path), row.copy_path, std::nullopt};
    if (row.is_copy()) q.true_source = video_id(row.source_path);
    out.push_back(std::move(q));
  }
  return out;
}

namespace {

EvalRecord record_for(const std::string& id, const std::optional<std::string>& truth, const ReducedDescriptor& d,
                      const CorpusIndex& index, Backend backend) {
  std::optional<std::string_view> exclude;
  if (index.find(id)) exclude = id;
  const Neighbor nn = nearest_neighbor(d, index, index.config().distance, backend, exclude);
  return {id, truth, nn.id, nn.distance, nn.best_offset};
}

// Runs body(i) for every query, in parallel when asked, and rethrows the
// first failure (lowest index) afterwards.
template <typename Body>
void for_each_query(std::size_t count, Backend backend, Body body) {
  std::vector<std::string> errors(count);
  std::vector<ErrorCode> codes(count, ErrorCode::kInvalidArgument);
  std::vector<char> failed(count, 0);
#pragma omp parallel for schedule(dynamic, 1) if (backend == Backend::kOpenMP)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      body(i);
    } catch (const Error& e) {
      failed[i] = 1;
      codes[i] = e.code();
      errors[i] = e.what();
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (failed[i]) throw Error(codes[i], errors[i]);
  }
}

}  // namespace

std::vector<EvalRecord> evaluate(std::span<const QuerySpec> queries, const CorpusIndex& index, Backend backend) {
  std::vector<EvalRecord> out(queries.size());
  const auto& config = index.config();
  for_each_query(queries.size(), backend, [&](std::size_t i) {
    const Video v = read_video(queries[i].path.string(), config.preprocess.target_fps);
    const auto d = extract_descriptor(v, config, Backend::kSerial);
    out[i] = record_for(queries[i].id, queries[i].true_source, d, index, Backend::kSerial);
  });
  return out;
}

std::vector<EvalRecord> evaluate(std::span<const DescriptorQuery> queries, const CorpusIndex& index,
                                 Backend backend) {
  std::vector<EvalRecord> out(queries.size());
  for_each_query(queries.size(), backend, [&](std::size_t i) {
    if (queries[i].descriptor == nullptr) throw Error(ErrorCode::kInvalidArgument, "null query descriptor");
    out[i] = record_for(queries[i].id, queries[i].true_source, *queries[i].descriptor, index, Backend::kSerial);
  });
  return out;
}

Outcome classify(const EvalRecord& r, double threshold) {
  const bool positive = r.distance < threshold;
  if (positive) {
    return r.true_source && r.nearest_id == *r.true_source ? Outcome::kTruePositive : Outcome::kFalsePositive;
  }
  return r.true_source ? Outcome::kFalseNegative : Outcome::kTrueNegative;
}

SweepRow score(std::span<const EvalRecord> records, double threshold) {
  SweepRow row;
  row.threshold = threshold;
  for (const auto& r : records) {
    switch (classify(r, threshold)) {
      case Outcome::kTruePositive: ++row.tp; break;
      case Outcome::kFalsePositive: ++row.fp; break;
      case Outcome::kTrueNegative: ++row.tn; break;
      case Outcome::kFalseNegative: ++row.fn; break;
    }
  }
  const std::size_t total = records.size();
  row.precision = row.tp + row.fp > 0 ? static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fp) : 1.0;
  row.accuracy = total > 0 ? static_cast<double>(row.tp + row.tn) / static_cast<double>(total) : 0.0;
  return row;
}

SweepReport sweep(std::span<const EvalRecord> records, std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorCode::kInvalidArgument, "sweep thresholds must be ascending");
  }
  SweepReport out;
  out.reserve(thresholds.size());
  for (double t : thresholds) out.push_back(score(records, t));
  return out;
}

namespace {

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParseError, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> parse_threshold_range(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw Error(ErrorCode::kParseError, "threshold range must be lo:hi:step");
  const double lo = parse_double(text.substr(0, c1), "threshold");
  const double hi = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "threshold");
  const double step = parse_double(text.substr(c2 + 1), "threshold step");
  if (!(step > 0.0) || hi < lo || lo < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "threshold range needs 0 <= lo <= hi and step > 0");
  }
  // lo + k*step rather than accumulation, so 0:0.4:0.01 ends at 0.4.
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw Error(ErrorCode::kInvalidArgument, "threshold range too long");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + static_cast<double>(k) * step;
  return out;
}

CalibrationTarget parse_calibration_target(std::string_view name) {
  if (name == "max-accuracy") return CalibrationTarget::kMaxAccuracy;
  if (name == "zero-fp-max-recall") return CalibrationTarget::kZeroFpMaxRecall;
  throw Error(ErrorCode::kParseError, "unknown calibration target '" + std::string(name) + "'");
}

std::string_view calibration_target_name(CalibrationTarget target) {
  return target == CalibrationTarget::kMaxAccuracy ? "max-accuracy" : "zero-fp-max-recall";
}

double calibrate(std::span<const EvalRecord> records, CalibrationTarget target) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot calibrate on zero records");
  std::vector<double> d;
  d.reserve(records.size());
  for (const auto& r : records) d.push_back(r.distance);
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());

  std::vector<double> candidates;
  candidates.push_back(d.front() / 2.0);
  for (std::size_t i = 0; i + 1 < d.size(); ++i) candidates.push_back(d[i] + (d[i + 1] - d[i]) / 2.0);
  candidates.push_back(d.back() + 1.0);

  // Candidates are ascending, so keeping the first strict improvement gives
  // the smallest optimizer.
  double best_t = candidates.front();
  std::size_t best = 0;
  bool have = false;
  for (double t : candidates) {
    const SweepRow row = score(records, t);
    std::size_t value = 0;
    if (target == CalibrationTarget::kMaxAccuracy) {
      value = row.tp + row.tn;
    } else {
      if (row.fp != 0) continue;
      value = row.tp;
    }
    if (!have || value > best) {
      best = value;
      best_t = t;
      have = true;
    }
  }
  return best_t;
}

void write_records(std::ostream& out, std::span<const EvalRecord> records) {
  csv::write_row(out, {"query_id", "true_source", "nearest_id", "distance", "best_offset"});
  for (const auto& r : records) {
    csv::write_row(out, {r.query_id, r.true_source.value_or(std::string(kNoSource)), r.nearest_id,
                         csv::fmt(r.distance), std::to_string(r.best_offset)});
  }
}

std::vector<EvalRecord> read_records(std::istream& in) {
  std::vector<std::string> f;
  if (!csv::read_row(in, f) || f.size() < 4 || f[0] != "query_id") {
    throw Error(ErrorCode::kParseError, "records CSV needs a query_id,true_source,nearest_id,distance header");
  }
  std::vector<EvalRecord> out;
  std::size_t line = 1;
  while (csv::read_row(in, f)) {
    ++line;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 4 && f.size() != 5) {
      throw Error(ErrorCode::kParseError, "records line " + std::to_string(line) + ": wrong field count");
    }
    EvalRecord r;
    r.query_id = f[0];
    if (f[1] != kNoSource) r.true_source = f[1];
    r.nearest_id = f[2];
    r.distance = parse_double(f[3], "distance");
    if (r.distance < 0.0) throw Error(ErrorCode::kParseError, "negative distance on line " + std::to_string(line));
    if (f.size() == 5) r.best_offset = parse_size(f[4], "offset");
    out.push_back(std::move(r));
  }
  return out;
}

void write_sweep(std::ostream& out, const SweepReport& report) {
  csv::write_row(out, {"threshold", "precision", "accuracy", "tp", "fp", "tn", "fn"});
  for (const auto& r : report) {
    csv::write_row(out, {csv::fmt(r.threshold), csv::fmt(r.precision), csv::fmt(r.accuracy), std::to_string(r.tp),
                         std::to_string(r.fp), std::to_string(r.tn), std::to_string(r.fn)});
  }
}

namespace {

struct Extracted {
  std::vector<std::string> ids;
  std::vector<ReducedDescriptor> descriptors;
};

Extracted extract_all(std::span<const fs::path> paths, const IndexConfig& config, Backend backend) {
  std::vector<ReducedDescriptor> out(paths.size());
  for_each_query(paths.size(), backend, [&](std::size_t i) {
    out[i] = extract_descriptor(read_video(paths[i].string(), config.preprocess.target_fps), config,
                                Backend::kSerial);
  });
  Extracted e;
  for (const auto& p : paths) e.ids.push_back(video_id(p));
  e.descriptors = std::move(out);
  return e;
}

}  // namespace

std::vector<GridCell> grid_run(const Manifest& manifest, std::span<const std::size_t> widths,
                               std::span<const Fps> fps_values, const ImageMetricId& metric,
                               const DistanceConfig& distance, Backend backend) {
  const auto bases = manifest.bases();
  const auto queries = queries_from_manifest(manifest);
  std::vector<fs::path> query_paths;
  for (const auto& q : queries) query_paths.push_back(q.path);

  std::vector<GridCell> cells;
  for (std::size_t w : widths) {
    for (const Fps& f : fps_values) {
      GridCell cell;
      cell.width = w;
      cell.fps = f;
      try {
        IndexConfig config;
        config.preprocess.target_width = w;
        config.preprocess.target_fps = f;
        config.metric = metric;
        config.distance = distance;
        validate(config.preprocess);

        Extracted corpus = extract_all(bases, config, backend);
        std::vector<IndexEntry> entries;
        for (std::size_t i = 0; i < bases.size(); ++i) {
          IndexEntry e;
          e.id = corpus.ids[i];
          e.source_path = bases[i];
          e.n = corpus.descriptors[i].n();
          entries.push_back(std::move(e));
        }
        const CorpusIndex index(config, std::move(entries), std::move(corpus.descriptors));
        if (index.empty()) throw Error(ErrorCode::kEmptyIndex, "manifest lists no base videos");

        const Extracted qd = extract_all(query_paths, config, backend);
        std::vector<DescriptorQuery> dq;
        for (std::size_t i = 0; i < queries.size(); ++i) {
          dq.push_back({queries[i].id, &qd.descriptors[i], queries[i].true_source});
        }
        const auto records = evaluate(std::span<const DescriptorQuery>(dq), index, backend);
        if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "manifest lists no queries");
        cell.threshold = calibrate(records, CalibrationTarget::kMaxAccuracy);
        cell.score = score(records, cell.threshold).accuracy;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_grid(std::ostream& out, std::span<const GridCell> cells) {
  csv::write_row(out, {"width", "fps", "score", "threshold", "error"});
  for (const auto& c : cells) {
    csv::write_row(out, {std::to_string(c.width), c.fps.to_string(), c.error.empty() ? csv::fmt(c.score) : "",
                         c.error.empty() ? csv::fmt(c.threshold) : "", c.error});
  }
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double best_seconds(int repeats, F&& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

BenchReport bench(std::span<const Video> videos, const IndexConfig& config, int repeats) {
  if (videos.size() < 4) throw Error(ErrorCode::kInvalidArgument, "bench needs at least 4 videos");
  validate(config.preprocess);
  const int saved_threads = max_threads();
  set_thread_count(1);

  BenchReport report;
  const std::size_t half = videos.size() / 2;
  std::vector<ReducedDescriptor> descriptors(videos.size());

  for (std::size_t count : {half, videos.size()}) {
    std::size_t frames = 0;
    for (std::size_t i = 0; i < count; ++i) frames += preprocess(videos[i], config.preprocess).size();
    const double s = best_seconds(repeats, [&] {
      for (std::size_t i = 0; i < count; ++i) {
        descriptors[i] = extract_descriptor(videos[i], config, Backend::kSerial);
      }
    });
    report.rows.push_back({"extract", count, frames, count, s, s > 0 ? 60.0 * static_cast<double>(count) / s : 0.0});
  }

  for (std::size_t count : {half, videos.size()}) {
    std::size_t frames = 0;
    for (std::size_t i = 0; i < count; ++i) frames += descriptors[i].n();
    const std::size_t pairs = count * (count - 1) / 2;
    double sink = 0.0;
    const double s = best_seconds(repeats, [&] {
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
          sink += windowed_distance(descriptors[i], descriptors[j], config.distance, Backend::kSerial).distance;
        }
      }
    });
    if (std::isnan(sink)) throw Error(ErrorCode::kRangeError, "non-finite distance during bench");
    report.rows.push_back({"compare", count, frames, pairs, s, s > 0 ? static_cast<double>(pairs) / s : 0.0});
  }
  set_thread_count(saved_threads);

  const auto& r = report.rows;
  report.extract_time_ratio = r[1].seconds / r[0].seconds;
  report.extract_frame_ratio = static_cast<double>(r[1].frames) / static_cast<double>(r[0].frames);
  report.compare_time_ratio = r[3].seconds / r[2].seconds;
  report.compare_pair_ratio = static_cast<double>(r[3].work) / static_cast<double>(r[2].work);
  return report;
}

void write_bench(std::ostream& out, const BenchReport& report) {
  csv::write_row(out, {"stage", "videos", "frames", "work", "seconds", "rate", "unit"});
  for (const auto& r : report.rows) {
    csv::write_row(out, {r.stage, std::to_string(r.videos), std::to_string(r.frames), std::to_string(r.work),
                         csv::fmt(r.seconds), csv::fmt(r.rate),
                         r.stage == "extract" ? "descriptors/minute" : "comparisons/second"});
  }
}

}  // namespace vcd
