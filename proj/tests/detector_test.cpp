#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "support.hpp"
#include "vcd/error.hpp"
#include "vcd/detector.hpp"
#include "vcd/media_io.hpp"
#include "vcd/transforms.hpp"

using namespace vcd;
namespace fs = std::filesystem;

namespace {

IndexConfig small_config() {
  IndexConfig c;
  c.preprocess.target_width = 16;
  c.preprocess.target_fps = Fps(8);
  return c;
}

std::vector<fs::path> write_videos(const test::TempDir& dir, std::size_t count, std::size_t n = 30) {
  std::vector<fs::path> out;
  for (std::size_t i = 0; i < count; ++i) {
    const fs::path p = dir / ("v" + std::to_string(i) + ".y4m");
    write_y4m(test::walk_video(100 + i, n + 3 * i, 24, 12), p);
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(BuildIndex, OneDescriptorPerVideo) {
  test::TempDir dir("idx_build");
  const auto videos = write_videos(dir, 5);
  BuildStats stats;
  const CorpusIndex idx = build_index(videos, small_config(), dir / "index", Backend::kOpenMP, &stats);
  EXPECT_EQ(idx.size(), 5u);
  EXPECT_EQ(stats.extracted, 5u);
  EXPECT_TRUE(fs::exists(dir / "index" / std::string(kIndexManifestName)));
  for (const auto& e : idx.entries()) EXPECT_TRUE(fs::exists(dir / "index" / e.descriptor_path));

  const CorpusIndex loaded = CorpusIndex::load(dir / "index");
  ASSERT_EQ(loaded.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(loaded.entries()[i].id, idx.entries()[i].id);
    EXPECT_EQ(loaded.descriptors()[i], idx.descriptors()[i]);
  }
}

TEST(BuildIndex, RerunReusesDescriptors) {
  test::TempDir dir("idx_rerun");
  const auto videos = write_videos(dir, 5);
  build_index(videos, small_config(), dir / "index");
  const auto stamp = fs::last_write_time(dir / "index" / "v0.ssm");
  BuildStats stats;
  const auto again = build_index(videos, small_config(), dir / "index", Backend::kOpenMP, &stats);
  EXPECT_EQ(stats.reused, 5u);
  EXPECT_EQ(stats.extracted, 0u);
  EXPECT_EQ(fs::last_write_time(dir / "index" / "v0.ssm"), stamp);

  // a changed config forces re-extraction
  auto other = small_config();
  other.preprocess.target_width = 12;
  build_index(videos, other, dir / "index", Backend::kOpenMP, &stats);
  EXPECT_EQ(stats.extracted, 5u);

  // a damaged descriptor is rebuilt rather than trusted
  build_index(videos, small_config(), dir / "index");
  { std::ofstream(dir / "index" / "v3.ssm", std::ios::trunc) << "junk"; }
  build_index(videos, small_config(), dir / "index", Backend::kOpenMP, &stats);
  EXPECT_EQ(stats.reused, 4u);
  EXPECT_EQ(stats.extracted, 1u);
}

TEST(BuildIndex, FailuresAreRecorded) {
  test::TempDir dir("idx_fail");
  auto videos = write_videos(dir, 4);
  { std::ofstream(dir / "broken.y4m") << "not a video"; }
  videos.insert(videos.begin() + 2, dir / "broken.y4m");
  BuildStats stats;
  const CorpusIndex idx = build_index(videos, small_config(), dir / "index", Backend::kOpenMP, &stats);
  EXPECT_EQ(idx.size(), 4u);
  ASSERT_EQ(idx.failures().size(), 1u);
  EXPECT_EQ(idx.failures()[0].source_path, dir / "broken.y4m");
  EXPECT_EQ(stats.failed, 1u);
  EXPECT_EQ(CorpusIndex::load(dir / "index").failures().size(), 1u);

  const std::vector<fs::path> only_bad{dir / "broken.y4m"};
  try {
    build_index(only_bad, small_config(), dir / "empty");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyIndex);
  }
}

TEST(CorpusIndex, LoadRejectsForeignDescriptors) {
  test::TempDir dir("idx_foreign");
  const auto videos = write_videos(dir, 2);
  build_index(videos, small_config(), dir / "index");
  // overwrite one descriptor with one extracted under another metric
  IndexConfig mean = small_config();
  mean.metric.kind = MetricKind::kMean;
  save_descriptor(extract_descriptor(read_video(videos[0].string()), mean), dir / "index" / "v0.ssm");
  try {
    CorpusIndex::load(dir / "index");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleDescriptors);
  }
}

TEST(CorpusIndex, UniqueIds) {
  const auto d = extract_descriptor(test::walk_video(1, 10, 4, 4), small_config());
  std::vector<IndexEntry> entries(2);
  entries[0].id = entries[1].id = "same";
  EXPECT_THROW(CorpusIndex(small_config(), entries, {d, d}), Error);
}

TEST(NearestNeighbor, IdenticalAndSubclipQueries) {
  test::TempDir dir("idx_nn");
  const auto videos = write_videos(dir, 5, 60);
  const CorpusIndex idx = build_index(videos, small_config(), dir / "index");
  const Video v3 = read_video(videos[3].string());
  const auto q = extract_descriptor(v3, idx.config());
  const Neighbor self = nearest_neighbor(q, idx, idx.config().distance);
  EXPECT_EQ(self.id, "v3");
  EXPECT_EQ(self.distance, 0.0);

  const auto clip = extract_descriptor(vcd::apply(v3, Subclip{17, 25}), idx.config());
  const Neighbor sub = nearest_neighbor(clip, idx, idx.config().distance);
  EXPECT_EQ(sub.id, "v3");
  EXPECT_EQ(sub.distance, 0.0);
  EXPECT_EQ(sub.best_offset, 17u);

  const Neighbor excluded = nearest_neighbor(q, idx, idx.config().distance, Backend::kOpenMP, "v3");
  EXPECT_NE(excluded.id, "v3");
  EXPECT_GT(excluded.distance, 0.0);
}

TEST(NearestNeighbor, MinimumOfPairwiseDistancesAndOrderInvariant) {
  const IndexConfig c = small_config();
  std::vector<IndexEntry> entries;
  std::vector<ReducedDescriptor> descs;
  for (int i = 0; i < 8; ++i) {
    IndexEntry e;
    e.id = "e" + std::to_string(i);
    descs.push_back(extract_descriptor(test::walk_video(200 + i, 20 + i, 16, 8), c));
    e.n = descs.back().n();
    entries.push_back(e);
  }
  // a duplicate under another id creates an exact tie
  entries.push_back(IndexEntry{"a_dup", {}, {}, descs[5].n(), 0, 0, 0});
  descs.push_back(descs[5]);

  const auto q = extract_descriptor(test::walk_video(205, 25, 16, 8), c);
  double best = 1e9;
  for (const auto& d : descs) best = std::min(best, windowed_distance(q, d, c.distance, Backend::kSerial).distance);

  const CorpusIndex idx(c, entries, descs);
  const Neighbor nn = nearest_neighbor(q, idx, c.distance);
  EXPECT_EQ(nn.distance, best);
  EXPECT_EQ(nn.id, "a_dup");  // tie with e5 goes to the smaller id
  EXPECT_EQ(nearest_neighbor(q, idx, c.distance, Backend::kSerial).id, "a_dup");

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::reverse(order.begin(), order.end());
  std::vector<IndexEntry> pe;
  std::vector<ReducedDescriptor> pd;
  for (auto i : order) {
    pe.push_back(entries[i]);
    pd.push_back(descs[i]);
  }
  const Neighbor permuted = nearest_neighbor(q, CorpusIndex(c, pe, pd), c.distance);
  EXPECT_EQ(permuted.id, nn.id);
  EXPECT_EQ(permuted.distance, nn.distance);
  EXPECT_EQ(permuted.best_offset, nn.best_offset);
}

TEST(NearestNeighbor, Errors) {
  const CorpusIndex empty(small_config(), {}, {});
  const auto q = extract_descriptor(test::walk_video(1, 10, 16, 8), small_config());
  try {
    nearest_neighbor(q, empty, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyIndex);
  }
  IndexEntry e;
  e.id = "x";
  const CorpusIndex one(small_config(), {e}, {q});
  const auto narrow = extract_descriptor(test::walk_video(1, 10, 8, 8), small_config());
  try {
    nearest_neighbor(narrow, one, {});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kIncompatibleDescriptors);
  }
}

TEST(Decide, StrictThreshold) {
  Neighbor n{0, "x", 0.25, 3};
  EXPECT_FALSE(make_verdict(n, 0.25).is_copy);
  EXPECT_TRUE(make_verdict(n, 0.2500001).is_copy);
  EXPECT_FALSE(make_verdict(n, 0.1).is_copy);
  EXPECT_THROW(make_verdict(n, 0.0), Error);
  const Verdict v = make_verdict(n, 0.3);
  EXPECT_EQ(v.nearest_id, "x");
  EXPECT_EQ(v.best_offset, 3u);
  EXPECT_EQ(v.threshold, 0.3);
}

TEST(Decide, ExactCopyIsFound) {
  test::TempDir dir("idx_decide");
  const auto videos = write_videos(dir, 3);
  const CorpusIndex idx = build_index(videos, small_config(), dir / "index");
  const Video copy = vcd::apply(read_video(videos[1].string()), FlipH{});
  for (double t : {1e-9, 0.3}) {
    const Verdict v = decide(copy, idx, t, idx.config().distance);
    EXPECT_TRUE(v.is_copy);
    EXPECT_EQ(v.nearest_id, "v1");
    EXPECT_EQ(v.is_copy, v.distance < v.threshold);
  }
  write_y4m(copy, dir / "copy.y4m");
  EXPECT_TRUE(decide((dir / "copy.y4m").string(), idx, 0.3, idx.config().distance).is_copy);
}
