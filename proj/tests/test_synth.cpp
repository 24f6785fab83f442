#include <gtest/gtest.h>

#include <set>

#include "pst/synth.hpp"
#include "support.hpp"

namespace {

using namespace pst;

TEST(SmoothPulse, ShapeAndHalfAmplitudeTruth) {
  const auto p = smooth_pulse(512, 256.0, 128.0, 0.6, 0.2, 2);
  ASSERT_EQ(p.samples.size(), 512u);
  EXPECT_DOUBLE_EQ(p.samples[0], 0.2);
  EXPECT_DOUBLE_EQ(p.samples[192], 0.2);
  EXPECT_NEAR(p.samples[256], 0.8, 1e-15);
  for (std::size_t d = 0; d < 64; ++d) EXPECT_NEAR(p.samples[256 - d], p.samples[256 + d], 1e-15);
  ASSERT_EQ(p.truth.edges.size(), 2u);
  for (const auto& e : p.truth.edges) {
    EXPECT_NEAR(p.samples[e.x], 0.5, 0.6 * 0.05);
    EXPECT_EQ(e.contrast, 0.6);
  }
  EXPECT_EQ(p.truth.edges[0].polarity, Polarity::rising);
  EXPECT_EQ(p.truth.edges[1].polarity, Polarity::falling);
  // power 1 half point lies at a quarter of the width from the center
  const auto p1 = smooth_pulse(512, 256.0, 128.0, 0.6, 0.2, 1);
  EXPECT_EQ(p1.truth.edges[0].x, 224u);
  EXPECT_EQ(p1.truth.edges[1].x, 288u);
}

TEST(SmoothPulse, ValidatesArguments) {
  EXPECT_THROW(smooth_pulse(64, 32.0, 0.0, 0.5, 0.2), Error);
  EXPECT_THROW(smooth_pulse(64, 32.0, 16.0, 0.9, 0.2), Error);
  EXPECT_THROW(smooth_pulse(64, 4.0, 16.0, 0.5, 0.2), Error);
  EXPECT_THROW(smooth_pulse(64, 32.0, 16.0, 0.5, 0.2, 0), Error);
}

TEST(Staircase, PlateausAndEdges) {
  const std::vector<double> c{0.05, 0.1, 0.2};
  const auto s = staircase(600, c, 0.3, 1.0);
  ASSERT_EQ(s.truth.edges.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& rise = s.truth.edges[2 * i];
    const auto& fall = s.truth.edges[2 * i + 1];
    EXPECT_EQ(rise.x, 200 * i + 50);
    EXPECT_EQ(fall.x, 200 * i + 150);
    EXPECT_EQ(rise.contrast, c[i]);
    EXPECT_EQ(rise.base, 0.3);
    EXPECT_NEAR(s.samples[200 * i + 100], 0.3 + c[i], 1e-12);
    EXPECT_NEAR(s.samples[200 * i + 5], 0.3, 1e-12);
    EXPECT_NEAR(s.samples[rise.x], 0.3 + c[i] / 2, 1e-12);
  }
  EXPECT_THROW(staircase(20, c, 0.3), Error);
  EXPECT_THROW(staircase(600, std::vector<double>{0.8}, 0.3), Error);
  EXPECT_EQ(staircase(16, std::vector<double>{}, 0.4).samples, std::vector<double>(16, 0.4));
}

TEST(HdrTestcard, LevelsTruthAndDynamicRange) {
  const auto card = hdr_testcard(256, 256);
  EXPECT_EQ(card.image.width(), 256u);
  EXPECT_EQ(card.image.max_code, 16383u);
  EXPECT_EQ(card.image.bit_depth(), 14);
  ASSERT_EQ(card.truth.edges.size(), 24u);

  const auto& px = card.image.pixels;
  EXPECT_NEAR(px(2, 10), 0.02, 1e-9);          // dark base
  EXPECT_NEAR(px(16, 10), 0.03, 1e-9);         // inside first dark bar (rises at 10, falls at 22)
  EXPECT_NEAR(px(130, 10), 0.9, 1e-9);         // bright base
  EXPECT_NEAR(px(144, 10), 0.95, 1e-9);        // bright bar
  EXPECT_DOUBLE_EQ(px(200, 200), 0.5);         // blank quadrant

  std::set<long> codes;
  for (double v : px) codes.insert(std::lround(v * 16383.0));
  EXPECT_GE(codes.size(), 4096u);

  std::size_t dark = 0, bright = 0, ramp = 0;
  for (const auto& e : card.truth.edges) {
    dark += e.region == Region::dark;
    bright += e.region == Region::bright;
    ramp += e.region == Region::ramp;
    EXPECT_EQ(e.y_end - e.y_begin, 128u);
  }
  EXPECT_EQ(dark, 8u);
  EXPECT_EQ(bright, 8u);
  EXPECT_EQ(ramp, 8u);
  EXPECT_THROW(hdr_testcard(32, 256), Error);
}

TEST(LineScan, RoundTripsThroughWriteRow) {
  auto card = hdr_testcard(64, 64);
  auto row = line_scan(card.image, 5);
  ASSERT_EQ(row.size(), 64u);
  for (double& v : row) v *= 0.5;
  write_row(card.image, 5, row);
  EXPECT_EQ(line_scan(card.image, 5), row);
  EXPECT_THROW(line_scan(card.image, 64), Error);
  EXPECT_THROW(write_row(card.image, 1, std::vector<double>(3)), Error);
}

TEST(Scoring, PeaksAndProportionality) {
  std::vector<double> r(50, 0.0);
  r[10] = -0.4;
  r[12] = 0.1;
  r[40] = 0.8;
  EdgeGroundTruth truth;
  truth.edges.push_back({11, 0, 1, 0.1, 0.0, Polarity::rising, Region::none});
  truth.edges.push_back({44, 0, 1, 0.2, 0.0, Polarity::rising, Region::none});
  const auto peaks = edge_peaks(r, truth);
  EXPECT_EQ(peaks, (std::vector<double>{0.4, 0.8}));
  EXPECT_EQ(proportionality_deviation(peaks, std::vector<double>{0.1, 0.2}), 0.0);
  EXPECT_NEAR(proportionality_deviation(std::vector<double>{1.0, 1.5}, std::vector<double>{1.0, 1.0}), 0.5, 1e-15);
  EXPECT_THROW(proportionality_deviation(std::vector<double>{}, std::vector<double>{}), Error);

  Field map(20, 30, 0.0);
  map(7, 12) = 3.0;
  EdgeGroundTruth t2;
  t2.edges.push_back({5, 0, 30, 0.1, 0.0, Polarity::rising, Region::dark});
  const auto px = edge_pixel_responses(map, t2, 3, 8);
  ASSERT_EQ(px.size(), 14u);
  EXPECT_EQ(px[4].value, 3.0);
  EXPECT_EQ(px[0].value, 0.0);
  EXPECT_EQ(px[0].region, Region::dark);
}

}  // namespace
