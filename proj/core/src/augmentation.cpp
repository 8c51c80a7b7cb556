#include "plc/augmentation.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "plc/error.hpp"
#include "plc/random.hpp"

namespace plc {
namespace {

struct FirstOrder {
  double b0, b1, a1;  // y[n] = b0 x[n] + b1 x[n-1] - a1 y[n-1]

  void run(std::span<double> x) const {
    double x_prev = 0.0;
    double y_prev = 0.0;
    for (auto& v : x) {
      const double y = b0 * v + b1 * x_prev - a1 * y_prev;
      x_prev = v;
      y_prev = y;
      v = y;
    }
  }
};

// Prewarped bilinear transform of wc/(s+wc) and s/(s+wc).
FirstOrder lowpass_section(double fc, double fs) {
  const double k = std::tan(std::numbers::pi * fc / fs);
  return {k / (1.0 + k), k / (1.0 + k), (k - 1.0) / (k + 1.0)};
}

FirstOrder highpass_section(double fc, double fs) {
  const double k = std::tan(std::numbers::pi * fc / fs);
  return {1.0 / (1.0 + k), -1.0 / (1.0 + k), (k - 1.0) / (k + 1.0)};
}

double resolved_high(const AugmentConfig& cfg, double fs) {
  return cfg.band_high_hz > 0.0 ? cfg.band_high_hz : 0.45 * (fs / 2.0);
}

void validate_triplets(const TimeSeriesBatch& b, std::span<const AxisTriplet> triplets) {
  std::vector<bool> used(b.n_channels, false);
  for (const auto& t : triplets) {
    for (auto c : t) {
      if (c >= b.n_channels) {
        throw ConfigError("rotate3d: triplet channel " + std::to_string(c) + " out of range (" +
                          std::to_string(b.n_channels) + " channels)");
      }
      if (used[c]) throw ConfigError("rotate3d: channel " + std::to_string(c) + " used twice");
      used[c] = true;
    }
  }
}

}  // namespace

void TimeSeriesBatch::validate() const {
  if (data.size() != n_samples * n_channels * n_timesteps) {
    throw DimensionError("TimeSeriesBatch: data length does not match extents");
  }
  if (!(sample_rate_hz > 0.0)) throw ConfigError("TimeSeriesBatch: sample rate must be positive");
}

TimeSeriesBatch batch_from_tensor(const DenseTensor& t, double sample_rate_hz) {
  if (t.order() < 3) throw DimensionError("batch_from_tensor: need order >= 3 ([N, C, T])");
  const auto& d = t.dims();
  TimeSeriesBatch b;
  b.n_samples = d.front();
  b.n_timesteps = d.back();
  b.n_channels = t.slice_size() / b.n_timesteps;
  b.data.assign(t.data().begin(), t.data().end());
  b.sample_rate_hz = sample_rate_hz;
  b.validate();
  return b;
}

DenseTensor tensor_from_batch(const TimeSeriesBatch& b, std::vector<std::size_t> dims) {
  return DenseTensor(std::move(dims), b.data);
}

TimeSeriesBatch jitter(const TimeSeriesBatch& b, double sigma, std::uint64_t seed) {
  b.validate();
  if (sigma < 0.0) throw ConfigError("jitter: sigma must be non-negative");
  TimeSeriesBatch out = b;
  if (sigma == 0.0 || b.n_timesteps == 0) return out;
  for (std::size_t n = 0; n < b.n_samples; ++n) {
    auto rng = make_rng(seed, Stream::kJitter, n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t c = 0; c < b.n_channels; ++c) {
      auto ch = out.channel(n, c);
      const double mean = std::accumulate(ch.begin(), ch.end(), 0.0) / double(ch.size());
      double var = 0.0;
      for (double v : ch) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / double(ch.size()));
      // Always draw, so a channel's noise does not depend on its neighbours' variance.
      for (auto& v : ch) {
        const double z = normal(rng);
        if (sd > 0.0) v += sigma * sd * z;
      }
    }
  }
  return out;
}

TimeSeriesBatch bandpass(const TimeSeriesBatch& b, double low_hz, double high_hz) {
  b.validate();
  const double nyquist = b.sample_rate_hz / 2.0;
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist)) {
    throw ConfigError("bandpass: need 0 < low_hz < high_hz < Nyquist (" + std::to_string(nyquist) +
                      " Hz), got low " + std::to_string(low_hz) + ", high " +
                      std::to_string(high_hz));
  }
  const auto hp = highpass_section(low_hz, b.sample_rate_hz);
  const auto lp = lowpass_section(high_hz, b.sample_rate_hz);
  TimeSeriesBatch out = b;
  for (std::size_t n = 0; n < b.n_samples; ++n) {
    for (std::size_t c = 0; c < b.n_channels; ++c) {
      auto ch = out.channel(n, c);
      hp.run(ch);
      lp.run(ch);
    }
  }
  return out;
}

double bandpass_analog_gain(double f_hz, double low_hz, double high_hz) {
  const double w = 2.0 * std::numbers::pi * f_hz;
  const double wl = 2.0 * std::numbers::pi * low_hz;
  const double wh = 2.0 * std::numbers::pi * high_hz;
  return w / std::hypot(w, wl) * wh / std::hypot(w, wh);
}

Rotation euler_zyx(double yaw_deg, double pitch_deg, double roll_deg) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double cz = std::cos(yaw_deg * deg), sz = std::sin(yaw_deg * deg);
  const double cy = std::cos(pitch_deg * deg), sy = std::sin(pitch_deg * deg);
  const double cx = std::cos(roll_deg * deg), sx = std::sin(roll_deg * deg);
  return {cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
          sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
          -sy,     cy * sx,                cy * cx};
}

TimeSeriesBatch apply_rotations(const TimeSeriesBatch& b, std::span<const AxisTriplet> triplets,
                                std::span<const Rotation> rotations) {
  b.validate();
  validate_triplets(b, triplets);
  if (rotations.size() != b.n_samples) {
    throw DimensionError("apply_rotations: need one rotation per sample");
  }
  TimeSeriesBatch out = b;
  for (std::size_t n = 0; n < b.n_samples; ++n) {
    const auto& r = rotations[n];
    for (const auto& t : triplets) {
      auto x = out.channel(n, t[0]);
      auto y = out.channel(n, t[1]);
      auto z = out.channel(n, t[2]);
      for (std::size_t i = 0; i < b.n_timesteps; ++i) {
        const double vx = x[i], vy = y[i], vz = z[i];
        x[i] = r[0] * vx + r[1] * vy + r[2] * vz;
        y[i] = r[3] * vx + r[4] * vy + r[5] * vz;
        z[i] = r[6] * vx + r[7] * vy + r[8] * vz;
      }
    }
  }
  return out;
}

TimeSeriesBatch rotate3d(const TimeSeriesBatch& b, std::span<const AxisTriplet> triplets,
                         double max_deg, std::uint64_t seed) {
  b.validate();
  validate_triplets(b, triplets);
  if (max_deg < 0.0) throw ConfigError("rotate3d: max_deg must be non-negative");
  if (max_deg == 0.0 || triplets.empty()) return b;
  std::vector<Rotation> rotations;
  rotations.reserve(b.n_samples);
  for (std::size_t n = 0; n < b.n_samples; ++n) {
    auto rng = make_rng(seed, Stream::kRotation, n);
    std::uniform_real_distribution<double> angle(-max_deg, max_deg);
    const double yaw = angle(rng);
    const double pitch = angle(rng);
    const double roll = angle(rng);
    rotations.push_back(euler_zyx(yaw, pitch, roll));
  }
  return apply_rotations(b, triplets, rotations);
}

void validate_augment_config(const AugmentConfig& cfg, const TimeSeriesBatch& b) {
  if (cfg.jitter_sigma < 0.0) throw ConfigError("augment: jitter_sigma must be non-negative");
  if (cfg.rotation_max_deg < 0.0) throw ConfigError("augment: rotation_max_deg must be non-negative");
  if (cfg.bandpass_enabled) {
    const double high = resolved_high(cfg, b.sample_rate_hz);
    if (!(cfg.band_low_hz > 0.0 && cfg.band_low_hz < high && high < b.sample_rate_hz / 2.0)) {
      throw ConfigError("augment: need 0 < band_low_hz < band_high_hz < Nyquist");
    }
  }
  validate_triplets(b, cfg.axis_triplets);
}

TimeSeriesBatch augment_pipeline(const TimeSeriesBatch& b, const AugmentConfig& cfg) {
  b.validate();
  validate_augment_config(cfg, b);
  TimeSeriesBatch out = jitter(b, cfg.jitter_sigma, cfg.seed);
  if (cfg.bandpass_enabled) {
    out = bandpass(out, cfg.band_low_hz, resolved_high(cfg, b.sample_rate_hz));
  }
  return rotate3d(out, cfg.axis_triplets, cfg.rotation_max_deg, cfg.seed);
}

}  // namespace plc
