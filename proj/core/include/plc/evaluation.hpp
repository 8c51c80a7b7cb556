#pragma once

// Downstream evaluation of learned features: a multinomial logistic head,
// accuracy and clustering metrics, graph agreement and a 2-D PCA export.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "plc/pseudo_graph.hpp"
#include "plc/tensor.hpp"

namespace plc {

struct SplitSpec {
  double unlabeled = 0.70;
  double train = 0.15;
  double test = 0.15;
  std::uint64_t seed = 0;

  // Throws ConfigError unless each fraction is in [0, 1] and they sum to 1.
  void validate() const;

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct SplitIndices {
  std::vector<std::size_t> unlabeled;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle of [0, n) cut into train, test and unlabeled blocks; the
// train and test sizes are round(fraction * n), the remainder is unlabeled.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct LogisticModel {
  Matrix weights;             // classes x R
  std::vector<double> bias;   // classes
};

struct LogisticOptions {
  double lr = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

// Mean softmax cross-entropy plus l2 * |weights|^2 on L2-normalized rows.
double logistic_loss(const LogisticModel& m, const Matrix& features, std::span<const int> labels,
                     double l2);

// Gradient of logistic_loss with respect to (weights, bias).
LogisticModel logistic_gradient(const LogisticModel& m, const Matrix& features,
                                std::span<const int> labels, double l2);

// Full-batch gradient descent on logistic_loss. Weights start from a seeded
// N(0, 1e-6) draw, biases from zero. Throws InputError when fewer than two
// distinct labels are present or a label is negative. When `loss_history` is
// given it receives the loss before every epoch and after the last one.
LogisticModel train_logistic(const Matrix& features, std::span<const int> labels,
                             const LogisticOptions& opts = {},
                             std::vector<double>* loss_history = nullptr);

// Argmax class per row; ties go to the lowest class index.
Labels predict(const LogisticModel& m, const Matrix& features);

double accuracy(const LogisticModel& m, const Matrix& features, std::span<const int> labels);

// Best matching fraction over all bijections between cluster ids and class
// ids. Supports at most 8 distinct ids (exhaustive search); throws InputError
// beyond that.
double clustering_accuracy(std::span<const int> predicted, std::span<const int> truth);

// Fraction of off-diagonal entries on which the two adjacencies agree.
double graph_agreement(const SignedGraph& a, const SignedGraph& b);

// Mean-centered projection onto the top two principal directions, ordered by
// decreasing variance, each direction signed so its largest-magnitude loading
// is positive. Rank-0 input yields zeros and a warning.
Matrix pca2d(const Matrix& features);

// Rows of `m` selected by `idx`.
Matrix select_rows(const Matrix& m, std::span<const std::size_t> idx);
Labels select_labels(std::span<const int> labels, std::span<const std::size_t> idx);

struct DownstreamResult {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// Trains the logistic head on split.train and scores it on split.test.
DownstreamResult downstream_accuracy(const Matrix& features, std::span<const int> labels,
                                     const SplitIndices& split, const LogisticOptions& opts = {});

}  // namespace plc
