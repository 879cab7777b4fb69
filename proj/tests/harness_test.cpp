#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <tuple>

#include "support.hpp"
#include "vcd/error.hpp"
#include "vcd/harness.hpp"
#include "vcd/media_io.hpp"
#include "vcd/synth.hpp"

using namespace vcd;
namespace fs = std::filesystem;

namespace {

EvalRecord rec(std::string q, std::optional<std::string> truth, std::string nearest, double d) {
  return {std::move(q), std::move(truth), std::move(nearest), d, 0};
}

// The worked example: one record of each outcome at t = 0.2.
std::vector<EvalRecord> four_records() {
  return {rec("q_tp", "a", "a", 0.1), rec("q_fp", std::nullopt, "b", 0.15), rec("q_tn", std::nullopt, "c", 0.3),
          rec("q_fn", "d", "d", 0.25)};
}

std::vector<EvalRecord> random_records(std::uint64_t seed, std::size_t count) {
  CounterRng rng(seed);
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int kind = rng.integer(0, 2);
    const std::string src = "s" + std::to_string(rng.integer(0, 4));
    // distances on a 0.01 grid so the 1e-4 scan can resolve every gap
    const double d = rng.integer(0, 60) / 100.0;
    if (kind == 0) out.push_back(rec("q" + std::to_string(i), src, src, d));
    if (kind == 1) out.push_back(rec("q" + std::to_string(i), src, "s9", d));
    if (kind == 2) out.push_back(rec("q" + std::to_string(i), std::nullopt, src, d));
  }
  return out;
}

std::size_t objective(const SweepRow& r, CalibrationTarget t) {
  return t == CalibrationTarget::kMaxAccuracy ? r.tp + r.tn : r.tp;
}

}  // namespace

TEST(Sweep, FourRecordExample) {
  const auto recs = four_records();
  const SweepRow r = score(recs, 0.2);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.tn, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.accuracy, 0.5);
}

TEST(Sweep, Boundaries) {
  const auto recs = four_records();
  const SweepRow zero = score(recs, 0.0);
  EXPECT_EQ(zero.tp + zero.fp, 0u);
  EXPECT_EQ(zero.precision, 1.0);
  EXPECT_EQ(zero.accuracy, 2.0 / 4.0);

  std::vector<EvalRecord> copies{rec("a", "x", "x", 0.1), rec("b", "y", "y", 0.9)};
  const SweepRow all = score(copies, 1e9);
  EXPECT_EQ(all.precision, 1.0);
  EXPECT_EQ(all.accuracy, 1.0);

  // wrong-source hits are false positives
  std::vector<EvalRecord> wrong{rec("a", "x", "y", 0.1)};
  EXPECT_EQ(score(wrong, 0.2).fp, 1u);
  EXPECT_EQ(score(wrong, 0.05).fn, 1u);
  // strict comparison at the threshold
  EXPECT_EQ(score(copies, 0.1).tp, 0u);
}

TEST(Sweep, MatchesBruteForceReclassification) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto recs = random_records(seed, 50);
    const auto thresholds = parse_threshold_range("0:0.6:0.005");
    const SweepReport report = sweep(recs, thresholds);
    ASSERT_EQ(report.size(), thresholds.size());
    std::size_t previous_positives = 0;
    for (std::size_t k = 0; k < report.size(); ++k) {
      const double t = thresholds[k];
      std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
      for (const auto& r : recs) {
        const bool pos = r.distance < t;
        const bool has = r.true_source.has_value();
        if (pos && has && r.nearest_id == *r.true_source) ++tp;
        else if (pos) ++fp;
        else if (!has) ++tn;
        else ++fn;
      }
      const auto& row = report[k];
      ASSERT_EQ(row.tp, tp);
      ASSERT_EQ(row.fp, fp);
      ASSERT_EQ(row.tn, tn);
      ASSERT_EQ(row.fn, fn);
      ASSERT_EQ(row.tp + row.fp + row.tn + row.fn, recs.size());
      ASSERT_GE(row.tp + row.fp, previous_positives);
      previous_positives = row.tp + row.fp;
      ASSERT_TRUE(row.precision >= 0.0 && row.precision <= 1.0);
      ASSERT_TRUE(row.accuracy >= 0.0 && row.accuracy <= 1.0);
    }
  }
  const std::vector<double> descending{0.3, 0.1};
  EXPECT_THROW(sweep(four_records(), descending), Error);
}

TEST(ThresholdRange, Parse) {
  const auto r = parse_threshold_range("0:0.4:0.01");
  ASSERT_EQ(r.size(), 41u);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_NEAR(r.back(), 0.4, 1e-12);
  EXPECT_EQ(parse_threshold_range("0.2:0.2:1").size(), 1u);
  EXPECT_THROW(parse_threshold_range("0:1"), Error);
  EXPECT_THROW(parse_threshold_range("0:1:0"), Error);
  EXPECT_THROW(parse_threshold_range("1:0:0.1"), Error);
}

TEST(Calibrate, SeparableCase) {
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 5; ++i) recs.push_back(rec("c" + std::to_string(i), "s", "s", 0.0));
  for (int i = 0; i < 5; ++i) recs.push_back(rec("d" + std::to_string(i), std::nullopt, "s", 0.5 + 0.1 * i));
  EXPECT_EQ(calibrate(recs, CalibrationTarget::kZeroFpMaxRecall), 0.25);
  EXPECT_EQ(calibrate(recs, CalibrationTarget::kMaxAccuracy), 0.25);
}

TEST(Calibrate, SingleRecord) {
  const std::vector<EvalRecord> copy{rec("c", "s", "s", 0.2)};
  EXPECT_GT(calibrate(copy, CalibrationTarget::kMaxAccuracy), 0.2);
  EXPECT_GT(calibrate(copy, CalibrationTarget::kZeroFpMaxRecall), 0.2);
  const std::vector<EvalRecord> distractor{rec("d", std::nullopt, "s", 0.2)};
  EXPECT_LT(calibrate(distractor, CalibrationTarget::kMaxAccuracy), 0.2);
  EXPECT_LT(calibrate(distractor, CalibrationTarget::kZeroFpMaxRecall), 0.2);
  EXPECT_THROW(calibrate(std::vector<EvalRecord>{}, CalibrationTarget::kMaxAccuracy), Error);
}

TEST(Calibrate, AgreesWithGridScan) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto recs = random_records(seed + 100, 40);
    for (auto target : {CalibrationTarget::kMaxAccuracy, CalibrationTarget::kZeroFpMaxRecall}) {
      // brute force over a 1e-4 grid
      std::size_t best = 0;
      double best_t = -1;
      bool found = false;
      for (int k = 0; k <= 7000; ++k) {
        const double t = k * 1e-4;
        const SweepRow r = score(recs, t);
        if (target == CalibrationTarget::kZeroFpMaxRecall && r.fp != 0) continue;
        if (!found || objective(r, target) > best) {
          best = objective(r, target);
          best_t = t;
          found = true;
        }
      }
      ASSERT_TRUE(found);
      const double t = calibrate(recs, target);
      const SweepRow r = score(recs, t);
      if (target == CalibrationTarget::kZeroFpMaxRecall) ASSERT_EQ(r.fp, 0u);
      ASSERT_EQ(objective(r, target), best) << "seed " << seed;
      // both sit in the same gap between consecutive distances
      const SweepRow grid = score(recs, best_t);
      ASSERT_EQ(std::tie(r.tp, r.fp, r.tn, r.fn), std::tie(grid.tp, grid.fp, grid.tn, grid.fn)) << "seed " << seed;
    }
  }
}

TEST(Records, CsvRoundTrip) {
  auto recs = four_records();
  recs[0].best_offset = 17;
  recs[1].query_id = "has,comma";
  std::stringstream ss;
  write_records(ss, recs);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "query_id,true_source,nearest_id,distance,best_offset");
  const auto back = read_records(ss);
  EXPECT_EQ(back, recs);

  std::stringstream out;
  write_sweep(out, sweep(recs, std::vector<double>{0.2}));
  EXPECT_EQ(out.str(), "threshold,precision,accuracy,tp,fp,tn,fn\n0.2,0.5,0.5,1,1,1,1\n");

  std::stringstream bad("nope\n");
  EXPECT_THROW(read_records(bad), Error);
}

class CorpusFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir("harness");
    std::vector<NamedVideo> bases, distractors;
    for (int i = 0; i < 4; ++i) {
      SynthConfig c;
      c.width = 48;
      c.height = 27;
      c.seconds = 6;
      c.seed = 10 + static_cast<std::uint64_t>(i);
      bases.push_back({"base" + std::to_string(i), synthesize_video(c)});
      c.seed = 90 + static_cast<std::uint64_t>(i);
      distractors.push_back({"other" + std::to_string(i), synthesize_video(c)});
    }
    const std::vector<TransformSpec> ops{FlipV{}, BoxBlur{1}, Subclip{0.25, 0.5, true}};
    manifest_ = new Manifest(make_corpus(bases, ops, dir_->path(), 1, distractors));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete dir_;
  }
  static IndexConfig config() {
    IndexConfig c;
    c.preprocess.target_width = 32;
    return c;
  }

  static test::TempDir* dir_;
  static Manifest* manifest_;
};

test::TempDir* CorpusFixture::dir_ = nullptr;
Manifest* CorpusFixture::manifest_ = nullptr;

TEST_F(CorpusFixture, EvaluateRecordsGroundTruth) {
  const auto idx = build_index(manifest_->bases(), config(), dir_->path() / "index");
  const auto queries = queries_from_manifest(*manifest_);
  ASSERT_EQ(queries.size(), 12u + 4u);
  const auto records = evaluate(std::span<const QuerySpec>(queries), idx);
  ASSERT_EQ(records.size(), queries.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].query_id, queries[i].id);
    EXPECT_EQ(records[i].true_source, queries[i].true_source);
    EXPECT_GE(records[i].distance, 0.0);
    if (queries[i].true_source) {
      EXPECT_EQ(records[i].nearest_id, *queries[i].true_source) << queries[i].id;
    }
    // distances are exactly those of the detector
    const auto d = extract_descriptor(read_video(queries[i].path.string()), idx.config());
    EXPECT_EQ(records[i].distance, nearest_neighbor(d, idx, idx.config().distance).distance);
  }
  // order and parallelism do not matter
  std::vector<QuerySpec> reversed(queries.rbegin(), queries.rend());
  auto back = evaluate(std::span<const QuerySpec>(reversed), idx, Backend::kSerial);
  std::reverse(back.begin(), back.end());
  EXPECT_EQ(back, records);
}

TEST_F(CorpusFixture, SelfQueriesExcludeThemselves) {
  const auto idx = build_index(manifest_->bases(), config(), dir_->path() / "index_self");
  std::vector<QuerySpec> self;
  for (const auto& e : idx.entries()) self.push_back({e.id, e.source_path, std::nullopt});
  for (const auto& r : evaluate(std::span<const QuerySpec>(self), idx)) {
    EXPECT_NE(r.nearest_id, r.query_id);
    EXPECT_GT(r.distance, 0.0);
  }
}

TEST_F(CorpusFixture, GridSingleCellEqualsEvaluateAndCalibrate) {
  const std::vector<std::size_t> widths{32};
  const std::vector<Fps> rates{Fps(8)};
  const auto cells = grid_run(*manifest_, widths, rates, ImageMetricId{}, DistanceConfig{});
  ASSERT_EQ(cells.size(), 1u);
  ASSERT_TRUE(cells[0].error.empty()) << cells[0].error;

  const auto idx = build_index(manifest_->bases(), config(), dir_->path() / "index_grid");
  const auto queries = queries_from_manifest(*manifest_);
  const auto records = evaluate(std::span<const QuerySpec>(queries), idx);
  const double t = calibrate(records, CalibrationTarget::kMaxAccuracy);
  EXPECT_EQ(cells[0].threshold, t);
  EXPECT_EQ(cells[0].score, score(records, t).accuracy);

  const std::vector<std::size_t> more{16, 0, 40};
  const std::vector<Fps> two{Fps(2), Fps(8)};
  const auto grid = grid_run(*manifest_, more, two, ImageMetricId{}, DistanceConfig{});
  ASSERT_EQ(grid.size(), 6u);
  for (const auto& c : grid) {
    if (c.width == 0) {
      EXPECT_FALSE(c.error.empty());  // failed cells are reported, not fatal
    } else {
      EXPECT_TRUE(c.error.empty()) << c.error;
      EXPECT_TRUE(c.score >= 0.0 && c.score <= 1.0);
    }
  }
}

TEST_F(CorpusFixture, BenchReportsPositiveRates) {
  std::vector<Video> videos;
  for (const auto& p : manifest_->bases()) videos.push_back(read_video(p.string()));
  for (const auto& row : manifest_->rows) {
    if (row.is_distractor()) videos.push_back(read_video(row.copy_path.string()));
  }
  const BenchReport r = bench(videos, config(), 1);
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) {
    EXPECT_GT(row.rate, 0.0);
    EXPECT_TRUE(std::isfinite(row.rate));
  }
  EXPECT_EQ(r.rows[3].work, 28u);
  std::stringstream ss;
  write_bench(ss, r);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "stage,videos,frames,work,seconds,rate,unit");
}
