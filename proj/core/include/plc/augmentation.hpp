#pragma once

// Class-preserving augmentations for multichannel time series, applied in the
// fixed order jitter -> bandpass -> 3D rotation. None of these functions sees
// labels; augmented samples inherit their source sample's class by position.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "plc/tensor.hpp"

namespace plc {

struct TimeSeriesBatch {
  std::size_t n_samples = 0;
  std::size_t n_channels = 0;
  std::size_t n_timesteps = 0;
  std::vector<double> data;  // [sample][channel][time]
  double sample_rate_hz = 1.0;

  // Throws DimensionError when data.size() does not match the extents.
  void validate() const;

  std::span<double> channel(std::size_t n, std::size_t c) {
    return std::span(data).subspan((n * n_channels + c) * n_timesteps, n_timesteps);
  }
  std::span<const double> channel(std::size_t n, std::size_t c) const {
    return std::span(data).subspan((n * n_channels + c) * n_timesteps, n_timesteps);
  }

  friend bool operator==(const TimeSeriesBatch&, const TimeSeriesBatch&) = default;
};

// A tensor with dims [N, C, T] maps to a batch directly. Higher orders fold
// every middle mode into the channel axis: [N, d1, ..., dk, T] -> [N, d1*...*dk, T].
TimeSeriesBatch batch_from_tensor(const DenseTensor& t, double sample_rate_hz);
DenseTensor tensor_from_batch(const TimeSeriesBatch& b, std::vector<std::size_t> dims);

using AxisTriplet = std::array<std::size_t, 3>;

struct AugmentConfig {
  double jitter_sigma = 0.05;
  bool bandpass_enabled = true;
  double band_low_hz = 0.3;
  // Non-positive means 0.45 x Nyquist of the batch being filtered.
  double band_high_hz = 0.0;
  double rotation_max_deg = 15.0;
  std::vector<AxisTriplet> axis_triplets;
  std::uint64_t seed = 0;

  friend bool operator==(const AugmentConfig&, const AugmentConfig&) = default;
};

// Adds N(0, (sigma * std_c)^2) noise, std_c being the population standard
// deviation of that sample's channel.
TimeSeriesBatch jitter(const TimeSeriesBatch& b, double sigma, std::uint64_t seed);

// First-order high-pass at low_hz cascaded with a first-order low-pass at
// high_hz, each discretized by the prewarped bilinear transform and run
// forward from a zero state. Throws ConfigError unless
// 0 < low_hz < high_hz < sample_rate / 2.
TimeSeriesBatch bandpass(const TimeSeriesBatch& b, double low_hz, double high_hz);

// |H(f)| of the analog prototype s/(s+wl) * wh/(s+wh).
double bandpass_analog_gain(double f_hz, double low_hz, double high_hz);

using Rotation = std::array<double, 9>;  // row-major 3x3

// Proper rotation Rz(yaw) * Ry(pitch) * Rx(roll), angles in degrees.
Rotation euler_zyx(double yaw_deg, double pitch_deg, double roll_deg);

// Applies rotations[n] to every listed triplet of sample n at every timestep.
TimeSeriesBatch apply_rotations(const TimeSeriesBatch& b, std::span<const AxisTriplet> triplets,
                                std::span<const Rotation> rotations);

// Per sample, draws z-y-x Euler angles uniformly in [-max_deg, max_deg] and
// rotates the listed channel triplets. Throws ConfigError on an invalid
// triplet (out of range or repeated channel).
TimeSeriesBatch rotate3d(const TimeSeriesBatch& b, std::span<const AxisTriplet> triplets,
                         double max_deg, std::uint64_t seed);

// Checks the config against a batch; throws ConfigError.
void validate_augment_config(const AugmentConfig& cfg, const TimeSeriesBatch& b);

TimeSeriesBatch augment_pipeline(const TimeSeriesBatch& b, const AugmentConfig& cfg);

}  // namespace plc
