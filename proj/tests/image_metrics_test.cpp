#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vcd/error.hpp"
#include "vcd/image_metrics.hpp"
#include "vcd/transforms.hpp"

using namespace vcd;

namespace {

const GrayFrame kA(2, 2, std::vector<Pixel>{0, 0, 0.5, 1});
const GrayFrame kB(2, 2, std::vector<Pixel>{0, 0, 0.7, 1});

GrayFrame flip(const GrayFrame& f, bool horizontal) {
  return vcd::apply(Video(Fps(1), {f}), horizontal ? TransformSpec{FlipH{}} : TransformSpec{FlipV{}})[0];
}

// Oracles straight from the definitions, in long double.
long double sum_oracle(const GrayFrame& a, const GrayFrame& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(static_cast<long double>(a.pixels()[i]) - b.pixels()[i]);
  return s;
}

long double diff_oracle(const GrayFrame& a, const GrayFrame& b, double eps) {
  long double s = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = std::fabs(static_cast<long double>(a.pixels()[i]) - b.pixels()[i]);
    if (d > eps) {
      s += d;
      ++count;
    }
  }
  return count ? s / count : 0;
}

}  // namespace

TEST(PixelSum, Examples) {
  EXPECT_EQ(pixel_sum_distance(kA, kA), 0.0);
  EXPECT_EQ(pixel_sum_distance(GrayFrame(2, 2, 0.0), GrayFrame(2, 2, 1.0)), 4.0);
  EXPECT_NEAR(pixel_sum_distance(kA, kB), 0.2, 1e-7);
}

TEST(MeanPixel, Examples) {
  for (std::size_t w : {1u, 3u, 17u}) {
    EXPECT_EQ(mean_pixel_distance(GrayFrame(w, w + 1, 0.0), GrayFrame(w, w + 1, 1.0)), 1.0);
  }
  EXPECT_EQ(mean_pixel_distance(kB, kB), 0.0);
  EXPECT_NEAR(mean_pixel_distance(kA, kB), 0.05, 1e-7);
}

TEST(DiffMean, Examples) {
  EXPECT_EQ(diff_mean_distance(kA, kA, 0.001), 0.0);
  EXPECT_NEAR(diff_mean_distance(kA, kB, 0.001), 0.2, 1e-7);
  // a shared black border adds nothing to the differing set
  const GrayFrame a(2, 2, std::vector<Pixel>{0, 0, 0.3, 0.9});
  const GrayFrame b(2, 2, std::vector<Pixel>{0, 0, 0.6, 0.5});
  EXPECT_NEAR(diff_mean_distance(a, b, kDefaultDiffEpsilon), (0.3 + 0.4) / 2, 1e-7);
}

TEST(Metrics, DimensionMismatch) {
  const GrayFrame c(3, 1);
  for (auto kind : {MetricKind::kPixelSum, MetricKind::kMean, MetricKind::kDiffMean}) {
    try {
      image_distance(kA, c, {kind, kDefaultDiffEpsilon});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
    }
  }
}

TEST(Metrics, MatchDefinitionsOnRandomFrames) {
  CounterRng rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    const auto w = static_cast<std::size_t>(rng.integer(1, 70));
    const auto h = static_cast<std::size_t>(rng.integer(1, 40));
    const bool q = iter % 2 == 0;
    const GrayFrame a = test::random_frame(rng, w, h, q);
    const GrayFrame b = test::random_frame(rng, w, h, q);
    const double n = static_cast<double>(w * h);
    ASSERT_NEAR(pixel_sum_distance(a, b), static_cast<double>(sum_oracle(a, b)), 1e-12 * n + 1e-12);
    ASSERT_NEAR(mean_pixel_distance(a, b), static_cast<double>(sum_oracle(a, b)) / n, 1e-12);
    const double eps = rng.uniform(0.0, 0.5);
    ASSERT_NEAR(diff_mean_distance(a, b, eps), static_cast<double>(diff_oracle(a, b, eps)), 1e-12);
  }
}

TEST(Metrics, Axioms) {
  CounterRng rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    const auto w = static_cast<std::size_t>(rng.integer(1, 12));
    const auto h = static_cast<std::size_t>(rng.integer(1, 12));
    const GrayFrame a = test::random_frame(rng, w, h);
    const GrayFrame b = test::random_frame(rng, w, h);
    const GrayFrame c = test::random_frame(rng, w, h);
    for (auto kind : {MetricKind::kPixelSum, MetricKind::kMean, MetricKind::kDiffMean}) {
      const ImageMetricId m{kind, kDefaultDiffEpsilon};
      const double ab = image_distance(a, b, m);
      ASSERT_GE(ab, 0.0);
      ASSERT_EQ(ab, image_distance(b, a, m));
      ASSERT_EQ(image_distance(a, a, m), 0.0);
      if (kind != MetricKind::kDiffMean) {
        ASSERT_LE(ab, image_distance(a, c, m) + image_distance(c, b, m) + 1e-9);
      }
    }
    const double d2 = mean_pixel_distance(a, b);
    const double d3 = diff_mean_distance(a, b, kDefaultDiffEpsilon);
    if (d3 > 0) ASSERT_GE(d3, d2);
  }
}

TEST(Metrics, FlipInvarianceIsExact) {
  CounterRng rng(23);
  for (int iter = 0; iter < 100; ++iter) {
    const auto w = static_cast<std::size_t>(rng.integer(1, 600));
    const auto h = static_cast<std::size_t>(rng.integer(1, 6));
    const GrayFrame a = test::random_frame(rng, w, h);
    const GrayFrame b = test::random_frame(rng, w, h);
    for (bool horizontal : {true, false}) {
      for (auto kind : {MetricKind::kPixelSum, MetricKind::kMean, MetricKind::kDiffMean}) {
        const ImageMetricId m{kind, kDefaultDiffEpsilon};
        ASSERT_EQ(image_distance(flip(a, horizontal), flip(b, horizontal), m), image_distance(a, b, m));
      }
    }
  }
}

TEST(Metrics, NamesAndValidation) {
  for (auto kind : {MetricKind::kPixelSum, MetricKind::kMean, MetricKind::kDiffMean}) {
    EXPECT_EQ(parse_metric(metric_name(kind)), kind);
  }
  EXPECT_THROW(parse_metric("sift"), Error);
  EXPECT_THROW(validate(ImageMetricId{MetricKind::kDiffMean, 1.5}), Error);
  EXPECT_THROW(validate(ImageMetricId{MetricKind::kDiffMean, -0.1}), Error);
  EXPECT_NO_THROW(validate(ImageMetricId{}));
  EXPECT_DOUBLE_EQ(ImageMetricId{}.diff_epsilon, 0.5 / 255.0);
}
