#include "plc/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "plc/error.hpp"

namespace plc {

std::vector<double> make_window(Window w, std::size_t len) {
  std::vector<double> out(len, 1.0);
  if (w == Window::kHann) {
    for (std::size_t i = 0; i < len; ++i)
      out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(len));
  }
  return out;
}

std::size_t stft_frame_count(std::size_t n_timesteps, const StftConfig& cfg) {
  if (cfg.window_len == 0 || cfg.hop == 0) throw ConfigError("stft: window_len and hop must be positive");
  if (cfg.hop > cfg.window_len) throw ConfigError("stft: hop must not exceed window_len");
  if (cfg.window_len > n_timesteps) {
    throw ConfigError("stft: window_len " + std::to_string(cfg.window_len) +
                      " exceeds signal length " + std::to_string(n_timesteps));
  }
  return (n_timesteps - cfg.window_len) / cfg.hop + 1;
}

DenseTensor stft_tensorize(const TimeSeriesBatch& b, const StftConfig& cfg) {
  b.validate();
  const std::size_t frames = stft_frame_count(b.n_timesteps, cfg);
  const std::size_t len = cfg.window_len;
  const std::size_t bins = len / 2 + 1;
  const auto window = make_window(cfg.window, len);

  // Twiddle table indexed by (k * t) mod len keeps every phase exact to one rounding.
  std::vector<double> cos_t(len), sin_t(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double ang = 2.0 * std::numbers::pi * double(i) / double(len);
    cos_t[i] = std::cos(ang);
    sin_t[i] = std::sin(ang);
  }

  DenseTensor out({b.n_samples, b.n_channels, bins, frames});
  auto dst = out.data();
  std::vector<double> frame(len);
  for (std::size_t n = 0; n < b.n_samples; ++n) {
    for (std::size_t c = 0; c < b.n_channels; ++c) {
      const auto ch = b.channel(n, c);
      const std::size_t base = (n * b.n_channels + c) * bins * frames;
      for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t t = 0; t < len; ++t) frame[t] = ch[f * cfg.hop + t] * window[t];
        for (std::size_t k = 0; k < bins; ++k) {
          double re = 0.0, im = 0.0;
          for (std::size_t t = 0; t < len; ++t) {
            const std::size_t idx = (k * t) % len;
            re += frame[t] * cos_t[idx];
            im -= frame[t] * sin_t[idx];
          }
          dst[base + k * frames + f] = std::hypot(re, im);
        }
      }
    }
  }
  return out;
}

}  // namespace plc
