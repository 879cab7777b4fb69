// vcd: command line front end for descriptor extraction, comparison, corpus
// generation, indexing, querying and evaluation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vcd/csv.hpp"
#include "vcd/descriptor.hpp"
#include "vcd/detector.hpp"
#include "vcd/error.hpp"
#include "vcd/harness.hpp"
#include "vcd/media_io.hpp"
#include "vcd/synth.hpp"
#include "vcd/transforms.hpp"

namespace fs = std::filesystem;
using namespace vcd;

namespace {

struct ExtractFlags {
  std::size_t width = PreprocessConfig{}.target_width;
  std::string fps = "8";
  std::string metric = "diff-mean";
  double diff_epsilon = kDefaultDiffEpsilon;

  void add(CLI::App* app) {
    app->add_option("--width", width, "Target frame width in pixels")->capture_default_str();
    app->add_option("--fps", fps, "Target frame rate (e.g. 8, 25/2)")->capture_default_str();
    app->add_option("--metric", metric, "pixel-sum | mean | diff-mean")->capture_default_str();
    app->add_option("--diff-epsilon", diff_epsilon, "Pixel difference counted by diff-mean")->capture_default_str();
  }

  IndexConfig config() const {
    IndexConfig c;
    c.preprocess.target_width = width;
    c.preprocess.target_fps = Fps::parse(fps);
    c.metric.kind = parse_metric(metric);
    c.metric.diff_epsilon = diff_epsilon;
    validate(c.preprocess);
    validate(c.metric);
    return c;
  }
};

struct DistanceFlags {
  std::string mean_mode = "paper";
  std::size_t stride = 1;

  void add(CLI::App* app) {
    app->add_option("--mean-mode", mean_mode, "paper | per-entry")->capture_default_str();
    app->add_option("--stride", stride, "Window offset step")->capture_default_str();
  }

  DistanceConfig config() const {
    DistanceConfig c;
    c.mean_mode = parse_mean_mode(mean_mode);
    c.window_stride = stride;
    validate(c);
    return c;
  }
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return out;
}

// Writes a CSV either to a file or to stdout when path is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  auto out = open_out(path);
  write(out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::vector<EvalRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return read_records(in);
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_output_video(const Video& video, const fs::path& out) {
  if (out.extension() == ".y4m") {
    write_y4m(video, out);
  } else if (out.extension().empty()) {
    write_pgm_sequence(video, out);
  } else {
    throw Error(ErrorCode::kUnsupportedFormat, "output must be .y4m or a directory for PGM frames");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video copy detection with self-similarity descriptors"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  std::string pgm_fps = "8";
  app.add_option("--pgm-fps", pgm_fps, "Frame rate assumed for PGM sequences")->capture_default_str();

  // describe
  auto* describe = app.add_subcommand("describe", "Extract a reduced descriptor from a video");
  std::string describe_in, describe_out;
  ExtractFlags describe_flags;
  describe->add_option("--video", describe_in, "Y4M file, PGM file/list/glob or directory")->required();
  describe->add_option("--out", describe_out, "Descriptor output path")->required();
  describe_flags.add(describe);

  // compare
  auto* compare = app.add_subcommand("compare", "Windowed distance between two descriptor files");
  std::string compare_a, compare_b;
  DistanceFlags compare_flags;
  compare->add_option("--a", compare_a)->required();
  compare->add_option("--b", compare_b)->required();
  compare_flags.add(compare);

  // transform
  auto* transform = app.add_subcommand("transform", "Apply one copy transformation to a video");
  std::string transform_in, transform_op, transform_out;
  transform->add_option("--in", transform_in)->required();
  transform->add_option("--op", transform_op, "flip-h|flip-v|brightness:a,b|blur:r|letterbox:f|crop:f|"
                                              "rescale:w|subclip:s,l|noise:sigma,seed")
      ->required();
  transform->add_option("--out", transform_out, ".y4m file or directory of PGM frames")->required();

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Generate a synthetic base/copy/distractor corpus");
  std::string corpus_out;
  std::size_t corpus_bases = 20, corpus_distractors = 20, corpus_width = 132, corpus_height = 74;
  double corpus_seconds = 12.0;
  std::uint64_t corpus_seed = 1;
  std::string corpus_ops = "flip-h;flip-v;brightness:0.85;blur:1;letterbox:0.1;subclip:25%,50%";
  corpus->add_option("--out", corpus_out)->required();
  corpus->add_option("--bases", corpus_bases)->capture_default_str();
  corpus->add_option("--distractors", corpus_distractors)->capture_default_str();
  corpus->add_option("--seconds", corpus_seconds)->capture_default_str();
  corpus->add_option("--width", corpus_width)->capture_default_str();
  corpus->add_option("--height", corpus_height)->capture_default_str();
  corpus->add_option("--seed", corpus_seed)->capture_default_str();
  corpus->add_option("--ops", corpus_ops, "Semicolon-separated transforms")->capture_default_str();

  // index build
  auto* index = app.add_subcommand("index", "Corpus index operations");
  index->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Extract descriptors for a set of videos");
  std::string index_videos, index_out;
  ExtractFlags index_flags;
  DistanceFlags index_distance;
  index_build->add_option("--videos", index_videos, "Glob of input videos")->required();
  index_build->add_option("--out", index_out, "Index directory")->required();
  index_flags.add(index_build);
  index_distance.add(index_build);

  // query
  auto* query = app.add_subcommand("query", "Decide whether a video is a copy of an indexed one");
  std::string query_index, query_video;
  double query_threshold = kDefaultThreshold;
  std::size_t query_stride = 0;
  query->add_option("--index", query_index)->required();
  query->add_option("--video", query_video)->required();
  query->add_option("--threshold", query_threshold)->capture_default_str();
  query->add_option("--stride", query_stride, "Override the index's window stride");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluation harness");
  eval->require_subcommand(1);

  auto* eval_run = eval->add_subcommand("run", "Nearest-neighbor records for every manifest query");
  std::string run_index, run_queries, run_out;
  eval_run->add_option("--index", run_index)->required();
  eval_run->add_option("--queries", run_queries, "Corpus directory or its manifest CSV")->required();
  eval_run->add_option("--out", run_out, "Records CSV (default stdout)");

  auto* eval_sweep = eval->add_subcommand("sweep", "Precision/accuracy against threshold");
  std::string sweep_records, sweep_thresholds = "0:0.4:0.01", sweep_out;
  eval_sweep->add_option("--records", sweep_records)->required();
  eval_sweep->add_option("--thresholds", sweep_thresholds, "lo:hi:step")->capture_default_str();
  eval_sweep->add_option("--out", sweep_out);

  auto* eval_calibrate = eval->add_subcommand("calibrate", "Pick a threshold from records");
  std::string calibrate_records, calibrate_target = "zero-fp-max-recall";
  eval_calibrate->add_option("--records", calibrate_records)->required();
  eval_calibrate->add_option("--target", calibrate_target, "max-accuracy | zero-fp-max-recall")
      ->capture_default_str();

  auto* eval_grid = eval->add_subcommand("grid", "Detection score over a width x fps grid");
  std::string grid_corpus, grid_widths = "44,88,132,176,220", grid_fps = "1,3,5,8,10", grid_out;
  std::string grid_metric = "diff-mean";
  double grid_eps = kDefaultDiffEpsilon;
  DistanceFlags grid_distance;
  eval_grid->add_option("--corpus", grid_corpus, "Corpus directory or its manifest CSV")->required();
  eval_grid->add_option("--widths", grid_widths)->capture_default_str();
  eval_grid->add_option("--fps", grid_fps)->capture_default_str();
  eval_grid->add_option("--metric", grid_metric)->capture_default_str();
  eval_grid->add_option("--diff-epsilon", grid_eps)->capture_default_str();
  eval_grid->add_option("--out", grid_out);
  grid_distance.add(eval_grid);

  auto* eval_bench = eval->add_subcommand("bench", "Single-threaded extraction and comparison throughput");
  std::string bench_corpus, bench_out;
  int bench_repeats = 3;
  ExtractFlags bench_flags;
  DistanceFlags bench_distance;
  eval_bench->add_option("--corpus", bench_corpus, "Corpus directory or manifest CSV; every listed video is used");
  eval_bench->add_option("--repeats", bench_repeats)->capture_default_str();
  eval_bench->add_option("--out", bench_out);
  bench_flags.add(eval_bench);
  bench_distance.add(eval_bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    set_thread_count(threads);
    const Fps pgm_rate = Fps::parse(pgm_fps);

    if (*describe) {
      const auto config = describe_flags.config();
      const auto d = extract_descriptor(read_video(describe_in, pgm_rate), config);
      save_descriptor(d, describe_out);
      return 0;
    }

    if (*compare) {
      const auto a = load_descriptor(compare_a);
      const auto b = load_descriptor(compare_b);
      const auto m = windowed_distance(a, b, compare_flags.config());
      csv::write_row(std::cout, {"distance", "best_offset"});
      csv::write_row(std::cout, {csv::fmt(m.distance), std::to_string(m.best_offset)});
      return 0;
    }

    if (*transform) {
      const Video v = read_video(transform_in, pgm_rate);
      write_output_video(vcd::apply(v, parse_transform(transform_op)), transform_out);
      return 0;
    }

    if (*corpus) {
      std::vector<TransformSpec> ops;
      std::stringstream ss(corpus_ops);
      for (std::string item; std::getline(ss, item, ';');) {
        if (!item.empty()) ops.push_back(parse_transform(item));
      }
      auto make = [&](const std::string& prefix, std::size_t count, std::uint64_t seed_base) {
        std::vector<NamedVideo> out;
        for (std::size_t i = 0; i < count; ++i) {
          SynthConfig sc;
          sc.width = corpus_width;
          sc.height = corpus_height;
          sc.seconds = corpus_seconds;
          sc.seed = seed_base + i;
          char name[32];
          std::snprintf(name, sizeof name, "%s%03zu", prefix.c_str(), i);
          out.push_back({name, synthesize_video(sc)});
        }
        return out;
      };
      const auto bases = make("base", corpus_bases, corpus_seed * 1'000'003);
      const auto distractors = make("other", corpus_distractors, corpus_seed * 1'000'003 + 500'000);
      const auto m = make_corpus(bases, ops, corpus_out, corpus_seed, distractors);
      std::cout << m.rows.size() << " videos written to " << corpus_out << '\n';
      return 0;
    }

    if (*index_build) {
      auto config = index_flags.config();
      config.distance = index_distance.config();
      const auto videos = expand_glob(index_videos);
      if (videos.empty()) throw Error(ErrorCode::kIoError, "no files match " + index_videos);
      BuildStats stats;
      const auto idx = build_index(videos, config, index_out, Backend::kOpenMP, &stats);
      std::cerr << idx.size() << " indexed (" << stats.extracted << " extracted, " << stats.reused << " reused), "
                << stats.failed << " failed\n";
      for (const auto& f : idx.failures()) std::cerr << "  " << f.source_path.string() << ": " << f.error << '\n';
      return 0;
    }

    if (*query) {
      const auto idx = CorpusIndex::load(query_index);
      auto distance = idx.config().distance;
      if (query_stride != 0) distance.window_stride = query_stride;
      const Verdict v = decide(query_video, idx, query_threshold, distance);
      csv::write_row(std::cout,
                     {v.is_copy ? "true" : "false", v.nearest_id, csv::fmt(v.distance), std::to_string(v.best_offset)});
      return v.is_copy ? 0 : 1;
    }

    if (*eval_run) {
      const auto idx = CorpusIndex::load(run_index);
      const auto queries = queries_from_manifest(read_manifest(run_queries));
      const auto records = evaluate(std::span<const QuerySpec>(queries), idx);
      emit(run_out, [&](std::ostream& out) { write_records(out, records); });
      return 0;
    }

    if (*eval_sweep) {
      const auto records = load_records(sweep_records);
      const auto thresholds = parse_threshold_range(sweep_thresholds);
      emit(sweep_out, [&](std::ostream& out) { write_sweep(out, sweep(records, thresholds)); });
      return 0;
    }

    if (*eval_calibrate) {
      const auto records = load_records(calibrate_records);
      const auto target = parse_calibration_target(calibrate_target);
      const double t = calibrate(records, target);
      const auto row = score(records, t);
      csv::write_row(std::cout, {"target", "threshold", "precision", "accuracy", "tp", "fp", "tn", "fn"});
      csv::write_row(std::cout, {std::string(calibration_target_name(target)), csv::fmt(t), csv::fmt(row.precision),
                                 csv::fmt(row.accuracy), std::to_string(row.tp), std::to_string(row.fp),
                                 std::to_string(row.tn), std::to_string(row.fn)});
      return 0;
    }

    if (*eval_grid) {
      std::vector<std::size_t> widths;
      for (const auto& w : split(grid_widths)) widths.push_back(std::stoul(w));
      std::vector<Fps> rates;
      for (const auto& f : split(grid_fps)) rates.push_back(Fps::parse(f));
      ImageMetricId metric{parse_metric(grid_metric), grid_eps};
      validate(metric);
      const auto cells = grid_run(read_manifest(grid_corpus), widths, rates, metric, grid_distance.config());
      emit(grid_out, [&](std::ostream& out) { write_grid(out, cells); });
      return 0;
    }

    if (*eval_bench) {
      auto config = bench_flags.config();
      config.distance = bench_distance.config();
      std::vector<Video> videos;
      if (!bench_corpus.empty()) {
        for (const auto& row : read_manifest(bench_corpus).rows) {
          videos.push_back(read_video(row.copy_path.string(), pgm_rate));
        }
      } else {
        for (std::uint64_t s = 1; s <= 16; ++s) {
          SynthConfig sc;
          sc.seed = s;
          videos.push_back(synthesize_video(sc));
        }
      }
      const auto report = bench(videos, config, bench_repeats);
      emit(bench_out, [&](std::ostream& out) { write_bench(out, report); });
      std::cerr << "extraction: time x" << csv::fmt(report.extract_time_ratio) << " for frames x"
                << csv::fmt(report.extract_frame_ratio) << "; comparison: time x"
                << csv::fmt(report.compare_time_ratio) << " for pairs x" << csv::fmt(report.compare_pair_ratio)
                << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
