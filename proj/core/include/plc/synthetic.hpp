#pragma once

// Class-structured Kruskal tensors with known labels, graph and factors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "plc/pseudo_graph.hpp"
#include "plc/tensor.hpp"

namespace plc {

struct SynthConfig {
  std::size_t n_per_class = 50;
  std::size_t n_classes = 3;
  std::size_t rank = 8;
  std::vector<std::size_t> dims{12, 16, 16};  // non-sample extents
  double centroid_scale = 3.0;
  double within_class_sigma = 0.3;
  double tensor_noise_sigma = 0.1;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

struct SynthData {
  DenseTensor tensor;
  Labels labels;
  SignedGraph true_graph;
  KruskalModel true_model;
};

// Factors: standard normal with unit-norm columns. Class centroids:
// centroid_scale * N(0, I_R). Feature rows: centroid + within_class_sigma *
// N(0, I_R). Samples are shuffled so classes are not contiguous, then
// X = [[W, A, B, C]] + tensor_noise_sigma * N(0, 1).
SynthData generate(const SynthConfig& cfg);

}  // namespace plc
