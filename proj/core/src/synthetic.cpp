#include "plc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "plc/error.hpp"
#include "plc/random.hpp"

namespace plc {

void SynthConfig::validate() const {
  if (n_per_class == 0 || n_classes == 0 || rank == 0) {
    throw ConfigError("synth: n_per_class, n_classes and rank must be positive");
  }
  if (dims.size() < 2) throw ConfigError("synth: need at least two non-sample dims");
  for (auto d : dims)
    if (d == 0) throw ConfigError("synth: dims must be positive");
  if (!(centroid_scale >= 0.0) || !(within_class_sigma >= 0.0) || !(tensor_noise_sigma >= 0.0)) {
    throw ConfigError("synth: scales and sigmas must be non-negative");
  }
}

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = cfg.n_per_class * cfg.n_classes;
  const std::size_t r = cfg.rank;

  KruskalModel model;
  auto frng = make_rng(cfg.seed, Stream::kSynthFactors);
  for (auto d : cfg.dims) {
    Matrix f(d, r);
    for (auto& v : f.data()) v = normal(frng);
    for (std::size_t c = 0; c < r; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += f(i, c) * f(i, c);
      s = std::sqrt(s);
      if (s > 0.0)
        for (std::size_t i = 0; i < d; ++i) f(i, c) /= s;
    }
    model.factors.push_back(std::move(f));
  }

  auto wrng = make_rng(cfg.seed, Stream::kSynthWeights);
  Matrix centroids(cfg.n_classes, r);
  for (auto& v : centroids.data()) v = cfg.centroid_scale * normal(wrng);

  Labels labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = int(i / cfg.n_per_class);
  auto srng = make_rng(cfg.seed, Stream::kSynthShuffle);
  std::shuffle(labels.begin(), labels.end(), srng);

  model.weights = Matrix(n, r);
  for (std::size_t i = 0; i < n; ++i) {
    auto mu = centroids.row(std::size_t(labels[i]));
    for (std::size_t c = 0; c < r; ++c) model.weights(i, c) = mu[c] + cfg.within_class_sigma * normal(wrng);
  }

  DenseTensor x = kruskal_reconstruct(model);
  if (cfg.tensor_noise_sigma > 0.0) {
    auto nrng = make_rng(cfg.seed, Stream::kSynthNoise);
    for (auto& v : x.data()) v += cfg.tensor_noise_sigma * normal(nrng);
  }
  SignedGraph graph = build_signed_graph(labels);
  return {std::move(x), std::move(labels), std::move(graph), std::move(model)};
}

}  // namespace plc
