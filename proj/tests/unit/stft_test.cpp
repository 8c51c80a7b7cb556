#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "plc/error.hpp"
#include "plc/stft.hpp"

namespace plc {
namespace {

TimeSeriesBatch one_signal(std::vector<double> x) {
  const auto t = x.size();
  return {1, 1, t, std::move(x), 50.0};
}

TEST(Stft, ConstantSignalRectWindow) {
  const StftConfig cfg{32, 16, Window::kRect};
  const auto out = stft_tensorize(one_signal(std::vector<double>(128, 2.5)), cfg);
  ASSERT_EQ(out.dims(), (std::vector<std::size_t>{1, 1, 17, 7}));
  for (std::size_t f = 0; f < 7; ++f) {
    EXPECT_NEAR(out.at({0, 0, 0, f}), 2.5 * 32, 1e-9);
    for (std::size_t k = 1; k < 17; ++k) EXPECT_LE(out.at({0, 0, k, f}), 1e-9);
  }
}

TEST(Stft, BinCenteredSinusoidPeak) {
  const std::size_t len = 64, bin = 5;
  std::vector<double> x(256);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::cos(2.0 * std::numbers::pi * double(bin) * double(i) / double(len));
  const auto out = stft_tensorize(one_signal(x), {len, 32, Window::kRect});
  for (std::size_t f = 0; f < out.dims()[3]; ++f) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k <= len / 2; ++k)
      if (out.at({0, 0, k, f}) > out.at({0, 0, arg, f})) arg = k;
    EXPECT_EQ(arg, bin);
    EXPECT_NEAR(out.at({0, 0, bin, f}), len / 2.0, 0.01 * len / 2.0);
  }
}

TEST(Stft, ZeroSignalZeroTensor) {
  const auto out = stft_tensorize(one_signal(std::vector<double>(100, 0.0)), StftConfig{});
  EXPECT_EQ(out.squared_norm(), 0.0);
}

TEST(Stft, MatchesNaiveDftAndIsNonnegative) {
  std::mt19937_64 rng(1);
  TimeSeriesBatch b{2, 3, 90, testing::random_vector(2 * 3 * 90, rng), 50.0};
  const StftConfig cfg{16, 8, Window::kHann};
  const auto out = stft_tensorize(b, cfg);
  const std::size_t frames = (90 - 16) / 8 + 1;
  ASSERT_EQ(out.dims(), (std::vector<std::size_t>{2, 3, 9, frames}));
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t k = 0; k < 9; ++k) {
          std::complex<double> acc = 0.0;
          for (std::size_t t = 0; t < 16; ++t) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(t) / 16.0);
            acc += w * b.channel(n, c)[f * 8 + t] *
                   std::polar(1.0, -2.0 * std::numbers::pi * double(k * t) / 16.0);
          }
          EXPECT_NEAR(out.at({n, c, k, f}), std::abs(acc), 1e-10);
          EXPECT_GE(out.at({n, c, k, f}), 0.0);
        }
}

TEST(Stft, ParsevalRectWindow) {
  std::mt19937_64 rng(2);
  const std::size_t len = 32, hop = 8;
  const auto x = testing::random_vector(200, rng);
  const auto out = stft_tensorize(one_signal(x), {len, hop, Window::kRect});
  for (std::size_t f = 0; f < out.dims()[3]; ++f) {
    double power = 0.0;
    for (std::size_t k = 0; k <= len / 2; ++k) {
      const double m = out.at({0, 0, k, f});
      power += (k == 0 || k == len / 2 ? 1.0 : 2.0) * m * m;
    }
    double energy = 0.0;
    for (std::size_t t = 0; t < len; ++t) energy += x[f * hop + t] * x[f * hop + t];
    EXPECT_NEAR(power, len * energy, 1e-6 * len * energy);
  }
}

TEST(Stft, FrameCountAndValidation) {
  EXPECT_EQ(stft_frame_count(128, {64, 32, Window::kHann}), 3u);
  EXPECT_EQ(stft_frame_count(64, {64, 32, Window::kHann}), 1u);
  EXPECT_THROW(stft_frame_count(63, {64, 32, Window::kHann}), ConfigError);
  EXPECT_THROW(stft_frame_count(128, {64, 0, Window::kHann}), ConfigError);
  EXPECT_THROW(stft_frame_count(128, {16, 32, Window::kHann}), ConfigError);
  EXPECT_THROW(stft_tensorize(one_signal(std::vector<double>(10, 1.0)), {}), ConfigError);
}

TEST(Stft, PeriodicHannWindow) {
  const auto w = make_window(Window::kHann, 8);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_NEAR(w[4], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  EXPECT_NEAR(w[1], w[7], 1e-15);
  for (double v : make_window(Window::kRect, 5)) EXPECT_EQ(v, 1.0);
}

}  // namespace
}  // namespace plc
