#pragma once

// JSON run configuration shared by every CLI subcommand. All sections and
// keys are optional; unknown keys are rejected.
//
// {
//   "clusters": 3,
//   "sample_rate_hz": 50.0,
//   "hyperparams": {"alpha": 0.01, "beta": 1.0, "gamma": null, "rank": 32,
//                   "init_iters": 50, "outer_max_iters": 100,
//                   "inner_max_iters": 20, "outer_tol": 1e-3,
//                   "inner_tol": 1e-6, "seed": 0},
//   "augment": {"jitter_sigma": 0.05, "bandpass": true, "band_low_hz": 0.3,
//               "band_high_hz": null, "rotation_max_deg": 15.0,
//               "axis_triplets": [[0, 1, 2]], "seed": 0},
//   "stft": {"window_len": 64, "hop": 32, "window": "hann"},
//   "split": {"unlabeled": 0.7, "train": 0.15, "test": 0.15, "seed": 0},
//   "classifier": {"lr": 0.1, "epochs": 500, "l2": 1e-4, "seed": 0},
//   "synth": {"n_per_class": 50, "n_classes": 3, "rank": 8,
//             "dims": [12, 16, 16], "centroid_scale": 3.0,
//             "within_class_sigma": 0.3, "tensor_noise_sigma": 0.1, "seed": 0}
// }

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "plc/augmentation.hpp"
#include "plc/evaluation.hpp"
#include "plc/objective.hpp"
#include "plc/stft.hpp"
#include "plc/synthetic.hpp"

namespace plc {

struct RunConfig {
  Hyperparams hyperparams;
  std::size_t clusters = 3;
  double sample_rate_hz = 50.0;
  AugmentConfig augment;
  StftConfig stft;
  SplitSpec split;
  LogisticOptions classifier;
  SynthConfig synth;
};

// Throws ConfigError on malformed JSON, unknown keys, wrong types or values
// that fail validation.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Replaces every seed in the config (hyperparams, augment, split,
// classifier, synth). Throws ConfigError when `value` is not an unsigned integer.
void apply_seed_override(RunConfig& cfg, std::string_view value);

// Reads PLC_SEED from the environment and applies it when set.
void apply_env_overrides(RunConfig& cfg);

std::string to_json(const RunConfig& cfg);

}  // namespace plc
