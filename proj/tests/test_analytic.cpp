#include <gtest/gtest.h>

#include "pst/analytic.hpp"
#include "pst/synth.hpp"
#include "pst/transform.hpp"
#include "support.hpp"

namespace {

using namespace pst;
using pst::testing::max_abs_diff;

std::vector<double> cosine_on_pedestal(std::size_t n, double a, double b, double f) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + b * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(i));
  return x;
}

TEST(PstQuadratic, SingleToneClosedForm) {
  // x = a + b cos(2 pi f i): D2 x = -(2 pi f)^2 b cos, so -D2 / (2 pi)^2 / x = f^2 b cos / x.
  const std::size_t n = 128;
  const double f = 5.0 / 128.0;
  const auto x = cosine_on_pedestal(n, 1.0, 0.3, f);
  const auto out = pst_quadratic(x);
  EXPECT_EQ(out.valid_count(), n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(2.0 * std::numbers::pi * f * static_cast<double>(i));
    EXPECT_NEAR(out.values[i], f * f * 0.3 * c / x[i], 1e-15);
  }
}

TEST(PstSmallphase, OrderTwoIsScaledQuadratic) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = pst::testing::smooth_random_signal(200, rng, 20, 0.8);
    const auto coeffs = taylor_coeffs(12.5, 0.3, 0.5, 2);
    const auto a = pst_smallphase(x, coeffs);
    const auto q = pst_quadratic(x);
    const double scale = coeffs.coefficient(2) / 2.0;
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(a.values[i], scale * q.values[i], 1e-10);
  }
}

TEST(PstSmallphase, RoutesAgree) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<std::size_t> len(16, 400);
  for (int trial = 0; trial < 20; ++trial) {
    const Field x = pst::testing::random_field(len(rng), 1, rng, 0.05, 1.0);
    const auto coeffs = taylor_coeffs(12.15, 0.48, 0.5, 6);
    const auto a = pst_smallphase(x.values(), coeffs, 1e-6, SmallPhaseRoute::derivative_sum);
    const auto b = pst_smallphase(x.values(), coeffs, 1e-6, SmallPhaseRoute::filtered_spectrum);
    EXPECT_EQ(a.valid, b.valid);
    EXPECT_LT(max_abs_diff(a.values, b.values), 1e-10);
  }
}

TEST(PstSmallphase, MatchesNumericalTransformOnSmoothPulse) {
  const auto pulse = smooth_pulse(512, 256.0, 128.0, 0.6, 0.2, 2);
  PstConfig cfg;
  cfg.warp = 12.5;
  cfg.strength = 0.05;
  cfg.lpf.reset();
  const auto numerical = pst1d(pulse.samples, cfg);
  const auto coeffs = taylor_coeffs(cfg.warp, cfg.strength, pst1d_r_max(512, cfg), 6);
  const auto report = compare_oracle(numerical, pst_smallphase(pulse.samples, coeffs));
  EXPECT_GE(report.correlation, 0.99);
  EXPECT_LE(report.normalized_deviation, 0.05);
  EXPECT_EQ(report.samples, 512u);
}

TEST(PstQuadraticOrder3, AgreesOnBandLimitedSignals) {
  std::mt19937_64 rng(23);
  const std::size_t n = 400;  // harmonics up to 20 keep |u| <= 0.05
  const auto x = pst::testing::smooth_random_signal(n, rng, 20, 1.0);
  const auto q = pst_quadratic(x);
  const auto q3 = pst_quadratic_order3(x);
  const auto report = compare_oracle(q3.values, q);
  EXPECT_LT(report.normalized_deviation, 0.01);
}

TEST(PstQuadraticOrder3, DisagreesOnABroadbandStep) {
  std::vector<double> x(256, 0.1);
  for (std::size_t i = 64; i < 192; ++i) x[i] = 0.9;
  const auto q = pst_quadratic(x);
  const auto q3 = pst_quadratic_order3(x);
  std::vector<std::uint8_t> both(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) both[i] = q.valid[i] && q3.valid[i];
  EXPECT_GT(compare_oracle(q3.values, q.values, both).normalized_deviation, 0.01);
}

TEST(Masking, ExcludesDarkSamples) {
  std::vector<double> x(64, 0.5);
  for (std::size_t i = 20; i < 30; ++i) x[i] = 0.0;
  const auto out = pst_quadratic(x, 1e-6);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(out.valid[i], i >= 20 && i < 30 ? 0 : 1) << i;
    if (!out.valid[i]) {
      EXPECT_EQ(out.values[i], 0.0);
    }
  }
  try {
    pst_quadratic(std::vector<double>(16, 0.0));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_domain);
  }
  EXPECT_THROW(pst_quadratic(x, 0.0), Error);
}

TEST(CompareOracle, StatisticsOnMask) {
  const std::vector<double> a{1, 2, 3, 100};
  const std::vector<double> b{2, 4, 6, -50};
  const std::vector<std::uint8_t> mask{1, 1, 1, 0};
  const auto r = compare_oracle(a, b, mask);
  EXPECT_EQ(r.samples, 3u);
  EXPECT_NEAR(r.correlation, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.max_abs_deviation, 3.0);
  EXPECT_DOUBLE_EQ(r.normalized_deviation, 0.5);

  const auto neg = compare_oracle(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1},
                                  std::vector<std::uint8_t>{1, 1, 1});
  EXPECT_NEAR(neg.correlation, -1.0, 1e-15);
}

TEST(CompareOracle, DegenerateInputs) {
  const std::vector<std::uint8_t> all{1, 1, 1};
  const auto same = compare_oracle(std::vector<double>{2, 2, 2}, std::vector<double>{2, 2, 2}, all);
  EXPECT_EQ(same.correlation, 1.0);
  EXPECT_EQ(same.normalized_deviation, 0.0);
  const auto flat = compare_oracle(std::vector<double>{1, 2, 3}, std::vector<double>{2, 2, 2}, all);
  EXPECT_EQ(flat.correlation, 0.0);
  const auto zero = compare_oracle(std::vector<double>{1, 0, 0}, std::vector<double>{0, 0, 0}, all);
  EXPECT_TRUE(std::isinf(zero.normalized_deviation));
  EXPECT_THROW(compare_oracle(std::vector<double>{1}, std::vector<double>{1}, std::vector<std::uint8_t>{0}), Error);
  EXPECT_THROW(compare_oracle(std::vector<double>{1, 2}, std::vector<double>{1}, std::vector<std::uint8_t>{1}), Error);
}

}  // namespace
