#pragma once

#include <cstddef>
#include <vector>

#include "plc/augmentation.hpp"
#include "plc/tensor.hpp"

namespace plc {

enum class Window { kHann, kRect };

struct StftConfig {
  std::size_t window_len = 64;
  std::size_t hop = 32;
  Window window = Window::kHann;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

// Periodic Hann or rectangular window of the given length.
std::vector<double> make_window(Window w, std::size_t len);

std::size_t stft_frame_count(std::size_t n_timesteps, const StftConfig& cfg);

// Magnitude STFT of every (sample, channel): output dims
// [N, channels, window_len/2 + 1, n_frames] with
// n_frames = floor((T - window_len) / hop) + 1. Throws ConfigError when the
// window is longer than the signal, hop is zero, or hop > window_len.
DenseTensor stft_tensorize(const TimeSeriesBatch& b, const StftConfig& cfg);

}  // namespace plc
