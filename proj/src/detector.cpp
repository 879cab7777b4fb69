#include "vcd/detector.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "kernels/kernels.hpp"
#include "vcd/error.hpp"
#include "vcd/media_io.hpp"

namespace vcd {

namespace fs = std::filesystem;
using nlohmann::json;

bool matches_config(const Provenance& p, const IndexConfig& config) {
  return p.metric == config.metric.kind && p.diff_epsilon == static_cast<float>(config.metric.diff_epsilon) &&
         p.fps == static_cast<float>(config.preprocess.target_fps.value()) &&
         p.frame_width <= config.preprocess.target_width;
}

ReducedDescriptor extract_descriptor(const Video& video, const IndexConfig& config, Backend backend) {
  return build_reduced(preprocess(video, config.preprocess), config.metric, backend).rounded_to_file_precision();
}

std::string video_id(const fs::path& path) {
  // Directory-of-PGM inputs have no extension; the name is the id.
  return path.has_extension() ? path.stem().string() : path.filename().string();
}

CorpusIndex::CorpusIndex(IndexConfig config, std::vector<IndexEntry> entries,
                         std::vector<ReducedDescriptor> descriptors, std::vector<IndexFailure> failures)
    : config_(std::move(config)),
      entries_(std::move(entries)),
      descriptors_(std::move(descriptors)),
      failures_(std::move(failures)) {
  if (entries_.size() != descriptors_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one descriptor per index entry expected");
  }
  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!ids.insert(entries_[i].id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate index id '" + entries_[i].id + "'");
    }
    if (!matches_config(descriptors_[i].provenance(), config_)) {
      throw Error(ErrorCode::kIncompatibleDescriptors,
                  "descriptor of '" + entries_[i].id + "' was extracted under a different configuration");
    }
  }
}

std::optional<std::size_t> CorpusIndex::find(std::string_view id) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id == id) return i;
  }
  return std::nullopt;
}

namespace {

json config_to_json(const IndexConfig& c) {
  return {
      {"width", c.preprocess.target_width},
      {"fps", c.preprocess.target_fps.to_string()},
      {"metric", std::string(metric_name(c.metric.kind))},
      {"diff_epsilon", c.metric.diff_epsilon},
      {"mean_mode", std::string(mean_mode_name(c.distance.mean_mode))},
      {"norm_epsilon", c.distance.norm_epsilon},
      {"stride", c.distance.window_stride},
  };
}

IndexConfig config_from_json(const json& j) {
  IndexConfig c;
  c.preprocess.target_width = j.at("width").get<std::size_t>();
  c.preprocess.target_fps = Fps::parse(j.at("fps").get<std::string>());
  c.metric.kind = parse_metric(j.at("metric").get<std::string>());
  c.metric.diff_epsilon = j.at("diff_epsilon").get<double>();
  c.distance.mean_mode = parse_mean_mode(j.at("mean_mode").get<std::string>());
  c.distance.norm_epsilon = j.at("norm_epsilon").get<double>();
  c.distance.window_stride = j.at("stride").get<std::size_t>();
  return c;
}

bool same_extraction(const IndexConfig& a, const IndexConfig& b) {
  return a.preprocess.target_width == b.preprocess.target_width &&
         a.preprocess.target_fps == b.preprocess.target_fps && a.metric == b.metric;
}

std::int64_t mtime_of(const fs::path& p) {
  std::error_code ec;
  const auto t = fs::last_write_time(p, ec);
  if (ec) return 0;
  return std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
}

std::uintmax_t size_of(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) return 0;
  const auto s = fs::file_size(p, ec);
  return ec ? 0 : s;
}

struct Loaded {
  IndexConfig config;
  std::vector<IndexEntry> entries;
  std::vector<IndexFailure> failures;
};

Loaded read_manifest_json(const fs::path& dir) {
  const fs::path path = dir / kIndexManifestName;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Loaded out;
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != "vcd-index" || j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kFormatError, path.string() + ": not a version-1 index manifest");
    }
    out.config = config_from_json(j.at("config"));
    for (const auto& e : j.at("entries")) {
      IndexEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.descriptor_path = e.at("descriptor").get<std::string>();
      entry.source_path = e.at("source").get<std::string>();
      entry.n = e.at("n").get<std::size_t>();
      entry.duration = e.at("duration").get<double>();
      entry.source_size = e.at("source_size").get<std::uintmax_t>();
      entry.source_mtime = e.at("source_mtime").get<std::int64_t>();
      out.entries.push_back(std::move(entry));
    }
    for (const auto& f : j.at("failures")) {
      out.failures.push_back({f.at("source").get<std::string>(), f.at("error").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace

void CorpusIndex::save_manifest(const fs::path& dir) const {
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"id", e.id},
                       {"descriptor", e.descriptor_path.generic_string()},
                       {"source", e.source_path.string()},
                       {"n", e.n},
                       {"duration", e.duration},
                       {"source_size", e.source_size},
                       {"source_mtime", e.source_mtime}});
  }
  json failures = json::array();
  for (const auto& f : failures_) failures.push_back({{"source", f.source_path.string()}, {"error", f.error}});
  const json j = {{"format", "vcd-index"},
                  {"version", 1},
                  {"config", config_to_json(config_)},
                  {"entries", std::move(entries)},
                  {"failures", std::move(failures)}};
  const fs::path path = dir / kIndexManifestName;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

CorpusIndex CorpusIndex::load(const fs::path& dir) {
  Loaded m = read_manifest_json(dir);
  std::vector<ReducedDescriptor> descriptors;
  descriptors.reserve(m.entries.size());
  for (const auto& e : m.entries) {
    descriptors.push_back(load_descriptor(dir / e.descriptor_path));
    if (descriptors.back().n() != e.n) {
      throw Error(ErrorCode::kCorruptFile, "descriptor of '" + e.id + "' does not match its manifest row");
    }
  }
  return CorpusIndex(std::move(m.config), std::move(m.entries), std::move(descriptors), std::move(m.failures));
}

CorpusIndex build_index(std::span<const fs::path> videos, const IndexConfig& config, const fs::path& output_dir,
                        Backend backend, BuildStats* stats) {
  validate(config.preprocess);
  validate(config.metric);
  validate(config.distance);
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + output_dir.string() + ": " + ec.message());

  // Previous run, for restartability.
  std::map<std::string, IndexEntry> previous;
  if (fs::exists(output_dir / kIndexManifestName)) {
    try {
      Loaded old = read_manifest_json(output_dir);
      if (same_extraction(old.config, config)) {
        for (auto& e : old.entries) previous.emplace(e.source_path.string(), std::move(e));
      }
    } catch (const Error&) {
      // An unreadable manifest just means nothing is reused.
    }
  }

  const std::size_t count = videos.size();
  std::vector<std::optional<IndexEntry>> entries(count);
  std::vector<std::optional<ReducedDescriptor>> descriptors(count);
  std::vector<std::string> errors(count);
  std::vector<char> reused(count, 0);

  std::set<std::string> seen_ids;
  std::vector<char> duplicate(count, 0);
  for (std::size_t i = 0; i < count; ++i) duplicate[i] = !seen_ids.insert(video_id(videos[i])).second;

  // Videos are independent; the inner kernels run serially inside this loop.
  const Backend inner = backend == Backend::kOpenMP ? Backend::kSerial : backend;
#pragma omp parallel for schedule(dynamic, 1) if (backend == Backend::kOpenMP)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
    const auto i = static_cast<std::size_t>(k);
    const fs::path& src = videos[i];
    try {
      if (duplicate[i]) throw Error(ErrorCode::kInvalidArgument, "duplicate id '" + video_id(src) + "'");
      IndexEntry entry;
      entry.id = video_id(src);
      entry.descriptor_path = entry.id + ".ssm";
      entry.source_path = src;
      entry.source_size = size_of(src);
      entry.source_mtime = mtime_of(src);
      const fs::path desc_path = output_dir / entry.descriptor_path;

      if (auto it = previous.find(src.string()); it != previous.end() &&
                                                 it->second.source_size == entry.source_size &&
                                                 it->second.source_mtime == entry.source_mtime &&
                                                 it->second.id == entry.id) {
        try {
          auto d = load_descriptor(desc_path);
          if (matches_config(d.provenance(), config) && d.n() == it->second.n) {
            entries[i] = it->second;
            descriptors[i] = std::move(d);
            reused[i] = 1;
            continue;
          }
        } catch (const Error&) {
          // fall through to re-extraction
        }
      }

      const Video video = read_video(src.string(), config.preprocess.target_fps);
      auto d = extract_descriptor(video, config, inner);
      save_descriptor(d, desc_path);
      entry.n = d.n();
      entry.duration = video.duration_seconds();
      entries[i] = std::move(entry);
      descriptors[i] = std::move(d);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::vector<IndexEntry> ok_entries;
  std::vector<ReducedDescriptor> ok_descriptors;
  std::vector<IndexFailure> failures;
  BuildStats local;
  for (std::size_t i = 0; i < count; ++i) {
    if (entries[i]) {
      ok_entries.push_back(std::move(*entries[i]));
      ok_descriptors.push_back(std::move(*descriptors[i]));
      (reused[i] ? local.reused : local.extracted)++;
    } else {
      failures.push_back({videos[i], errors[i]});
      local.failed++;
    }
  }
  if (stats) *stats = local;
  CorpusIndex index(config, std::move(ok_entries), std::move(ok_descriptors), std::move(failures));
  index.save_manifest(output_dir);
  if (index.empty()) throw Error(ErrorCode::kEmptyIndex, "no video could be indexed");
  return index;
}

Neighbor nearest_neighbor(const ReducedDescriptor& query, const CorpusIndex& index, const DistanceConfig& distance,
                          Backend backend, std::optional<std::string_view> exclude_id) {
  std::vector<const ReducedDescriptor*> corpus;
  std::vector<std::size_t> slot;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (exclude_id && index.entries()[i].id == *exclude_id) continue;
    if (!compatible(query.provenance(), index.descriptors()[i].provenance())) continue;
    corpus.push_back(&index.descriptors()[i]);
    slot.push_back(i);
  }
  if (index.empty()) throw Error(ErrorCode::kEmptyIndex, "index is empty");
  if (corpus.empty()) {
    throw Error(ErrorCode::kIncompatibleDescriptors, "no index entry is comparable with the query");
  }
  const auto matches = backend == Backend::kSerial ? kernels::serial::scan_corpus(query, corpus, distance)
                                                   : kernels::omp::scan_corpus(query, corpus, distance);
  std::size_t best = 0;
  for (std::size_t k = 1; k < matches.size(); ++k) {
    const auto& cand = matches[k];
    const auto& cur = matches[best];
    if (cand.distance < cur.distance ||
        (cand.distance == cur.distance && index.entries()[slot[k]].id < index.entries()[slot[best]].id)) {
      best = k;
    }
  }
  const std::size_t e = slot[best];
  return {e, index.entries()[e].id, matches[best].distance, matches[best].best_offset};
}

Verdict make_verdict(const Neighbor& nearest, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be > 0");
  return {nearest.distance < threshold, nearest.id, nearest.distance, nearest.best_offset, threshold};
}

Verdict decide(const Video& query, const CorpusIndex& index, double threshold, const DistanceConfig& distance,
               Backend backend) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be > 0");
  const auto d = extract_descriptor(query, index.config(), backend);
  return make_verdict(nearest_neighbor(d, index, distance, backend), threshold);
}

Verdict decide(const std::string& query_source, const CorpusIndex& index, double threshold,
               const DistanceConfig& distance, Backend backend) {
  return decide(read_video(query_source, index.config().preprocess.target_fps), index, threshold, distance,
                backend);
}

}  // namespace vcd
