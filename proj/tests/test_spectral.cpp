#include <gtest/gtest.h>

#include <thread>

#include "pst/spectral.hpp"
#include "support.hpp"

namespace {

using namespace pst;
using pst::testing::dense_dft;
using pst::testing::max_abs_diff;

TEST(FrequencyAxis, EvenAndOddLengths) {
  EXPECT_EQ(frequency_axis(4), (std::vector<double>{0.0, 0.25, -0.5, -0.25}));
  EXPECT_EQ(frequency_axis(5), (std::vector<double>{0.0, 0.2, 0.4, -0.4, -0.2}));
  const auto axis = frequency_axis(257);
  for (std::size_t k = 0; k < axis.size(); ++k) EXPECT_EQ(axis[k], pst::testing::bin_frequency(k, 257));
}

TEST(FrequencyGrid, ShapesAndRadius) {
  const auto g1 = freq_grid_1d(8);
  EXPECT_TRUE(g1.is_1d());
  EXPECT_EQ(g1.width(), 8u);
  EXPECT_DOUBLE_EQ(g1.max_radius(), 0.5);

  const auto g2 = freq_grid_2d(8, 6);
  EXPECT_FALSE(g2.is_1d());
  EXPECT_EQ(g2.width(), 8u);
  EXPECT_EQ(g2.height(), 6u);
  EXPECT_DOUBLE_EQ(g2.max_radius(), std::hypot(0.5, 0.5));
  EXPECT_DOUBLE_EQ(g2.radius(1, 2), std::hypot(0.125, 2.0 / 6.0));

  const auto odd = freq_grid_2d(5, 3);
  EXPECT_DOUBLE_EQ(odd.max_radius(), std::hypot(0.4, 1.0 / 3.0));
}

TEST(FrequencyGrid, RejectsDegenerateSizes) {
  EXPECT_THROW(freq_grid_1d(1), Error);
  EXPECT_THROW(freq_grid_2d(1, 4), Error);
  EXPECT_THROW(freq_grid_2d(4, 1), Error);
  try {
    freq_grid_1d(0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_size);
  }
}

TEST(Forward, MatchesDenseDft1d) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {2u, 3u, 7u, 16u, 31u, 64u}) {
    const auto x = pst::testing::random_complex(n, 1, rng);
    const auto got = forward(x);
    const auto want = dense_dft(x);
    EXPECT_LT(max_abs_diff(got.bins, want), 1e-10 * static_cast<double>(n)) << "n=" << n;
  }
}

TEST(Forward, MatchesDenseDft2d) {
  std::mt19937_64 rng(2);
  for (auto [w, h] : {std::pair{4u, 3u}, {5u, 7u}, {16u, 8u}, {9u, 12u}}) {
    const auto x = pst::testing::random_complex(w, h, rng);
    EXPECT_LT(max_abs_diff(forward(x).bins, dense_dft(x)), 1e-9) << w << "x" << h;
  }
}

TEST(Forward, RealOverloadsAgree) {
  std::mt19937_64 rng(3);
  const Field x = pst::testing::random_field(12, 1, rng);
  const auto a = forward(x);
  const auto b = forward(std::span<const double>(x.data(), x.size()));
  const auto c = forward(pst::testing::to_complex(x));
  EXPECT_EQ(a.bins, b.bins);
  EXPECT_EQ(a.bins, c.bins);
}

TEST(Forward, RoundTripAndParseval) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> size(2, 257);
  std::uniform_int_distribution<std::size_t> hsize(1, 129);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t w = size(rng);
    const std::size_t h = std::max<std::size_t>(hsize(rng), trial % 4 == 0 ? 1 : 2);
    const auto x = pst::testing::random_complex(w, h, rng);
    const auto spectrum = forward(x);
    const auto back = inverse(spectrum);
    EXPECT_LT(max_abs_diff(back, x), 1e-12) << w << "x" << h;

    double ex = 0.0;
    double es = 0.0;
    for (const auto& z : x) ex += std::norm(z);
    for (const auto& z : spectrum.bins) es += std::norm(z);
    es /= static_cast<double>(x.size());
    EXPECT_LT(std::abs(es - ex) / ex, 1e-10);
  }
}

TEST(Forward, Linearity) {
  std::mt19937_64 rng(5);
  const auto a = pst::testing::random_complex(10, 6, rng);
  const auto b = pst::testing::random_complex(10, 6, rng);
  const Complex alpha(0.3, -1.7);
  ComplexField mix(10, 6);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * a[i] + b[i];
  const auto fa = forward(a);
  const auto fb = forward(b);
  const auto fm = forward(mix);
  for (std::size_t i = 0; i < mix.size(); ++i) EXPECT_LT(std::abs(fm.bins[i] - (alpha * fa.bins[i] + fb.bins[i])), 1e-12);
}

TEST(Forward, RealInputIsConjugateSymmetric) {
  std::mt19937_64 rng(6);
  const Field x = pst::testing::random_field(9, 8, rng);
  const auto s = forward(x);
  for (std::size_t l = 0; l < 8; ++l) {
    for (std::size_t k = 0; k < 9; ++k) {
      EXPECT_LT(std::abs(s(k, l) - std::conj(s((9 - k) % 9, (8 - l) % 8))), 1e-12);
    }
  }
}

TEST(Forward, ImpulseAndConstant) {
  ComplexField impulse(6, 4, Complex(0.0));
  impulse(0, 0) = 1.0;
  for (const auto& z : forward(impulse).bins) EXPECT_EQ(z, Complex(1.0));

  const auto c = forward(Field(6, 4, 2.0));
  EXPECT_DOUBLE_EQ(c(0, 0).real(), 48.0);
  for (std::size_t i = 1; i < c.bins.size(); ++i) EXPECT_LT(std::abs(c.bins[i]), 1e-13);
}

TEST(Inverse, ChecksGridAndShape) {
  const auto s = forward(Field(4, 4, 1.0));
  EXPECT_THROW(inverse(s, freq_grid_2d(4, 5)), Error);
  EXPECT_NO_THROW(inverse(s, freq_grid_2d(4, 4)));
  EXPECT_THROW(forward(ComplexField(1, 1)), Error);
}

TEST(ApplyGain, MultipliesByGridFrequency) {
  std::mt19937_64 rng(7);
  const auto x = pst::testing::random_complex(6, 5, rng);
  auto s = forward(x);
  const auto before = s.bins;
  const auto grid = freq_grid_2d(6, 5);
  apply_gain(s, grid, [](double u, double v) { return Complex(u, v); });
  for (std::size_t l = 0; l < 5; ++l) {
    for (std::size_t k = 0; k < 6; ++k) {
      const Complex g(pst::testing::bin_frequency(k, 6), pst::testing::bin_frequency(l, 5));
      EXPECT_EQ(s(k, l), before(k, l) * g);
    }
  }
  EXPECT_THROW(apply_gain(s, freq_grid_2d(5, 5), [](double, double) { return 1.0; }), Error);
}

TEST(SpectralDerivative, SinusoidsMatchAnalyticDerivatives) {
  for (std::size_t n : {64u, 65u, 256u}) {
    for (int m : {2, 4, 6}) {
      for (std::size_t f : {1u, 3u, 7u}) {
        std::vector<double> x(n);
        std::vector<double> want(n);
        const double w = 2.0 * std::numbers::pi * static_cast<double>(f) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double t = w * static_cast<double>(i) + 0.3;
          x[i] = std::sin(t);
          // d^m/di^m sin(w i + 0.3) = (-1)^(m/2) w^m sin(...)
          want[i] = ((m / 2) % 2 ? -1.0 : 1.0) * std::pow(w, m) * std::sin(t);
        }
        EXPECT_LT(max_abs_diff(spectral_derivative(x, m), want), 1e-9) << n << " " << m << " " << f;
      }
    }
  }
}

TEST(SpectralDerivative, MatchesDenseOracle) {
  std::mt19937_64 rng(8);
  for (std::size_t n : {2u, 5u, 16u, 33u, 64u}) {
    const Field x = pst::testing::random_field(n, 1, rng);
    const auto spectrum = dense_dft(pst::testing::to_complex(x));
    for (int m : {2, 4, 6}) {
      ComplexField scaled(n, 1);
      for (std::size_t k = 0; k < n; ++k) {
        const Complex j2piu(0.0, 2.0 * std::numbers::pi * pst::testing::bin_frequency(k, n));
        scaled[k] = spectrum[k] * std::pow(j2piu, m);
      }
      const auto back = dense_dft(scaled, +1);
      std::vector<double> want(n);
      for (std::size_t i = 0; i < n; ++i) want[i] = back[i].real() / static_cast<double>(n);
      const auto got = spectral_derivative(x.values(), m);
      double scale = 1.0;
      for (double v : want) scale = std::max(scale, std::abs(v));
      EXPECT_LT(max_abs_diff(got, want) / scale, 1e-10) << n << " " << m;
    }
  }
}

TEST(SpectralDerivative, RejectsOddOrders) {
  const std::vector<double> x{1, 2, 3, 4};
  for (int m : {-2, 0, 1, 3}) {
    try {
      spectral_derivative(x, m);
      ADD_FAILURE() << "order " << m;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::unsupported_order);
    }
  }
}

TEST(FftPlans, ConcurrentTransformsAgree) {
  std::mt19937_64 rng(9);
  std::vector<ComplexField> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back(pst::testing::random_complex(48 + i % 3, 40, rng));
  std::vector<Spectrum> serial;
  for (const auto& x : inputs) serial.push_back(forward(x));

  std::vector<Spectrum> parallel(inputs.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    threads.emplace_back([&, i] {
      for (int rep = 0; rep < 20; ++rep) parallel[i] = forward(inputs[i]);
    });
  }
  for (auto& t : threads) t.join();
  for (std::size_t i = 0; i < inputs.size(); ++i) EXPECT_EQ(parallel[i].bins, serial[i].bins);
}

}  // namespace
