#pragma once

// Pseudo labels from k-means on feature rows, the signed graph they induce,
// its degree-normalized signed Laplacian, and the effective Laplacian that
// folds transformation invariance into the cross-view penalty.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "plc/tensor.hpp"

namespace plc {

using Labels = std::vector<int>;

struct KMeansOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;  // stop when every centroid moves less than this
  // Independent k-means++ restarts; the lowest-inertia run wins.
  std::size_t restarts = 8;
  // Cluster on L2-normalized rows.
  bool normalize = true;
};

struct KMeansResult {
  // Cluster ids in [0, k), renumbered by order of first appearance.
  Labels labels;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::size_t reseeded = 0;  // empty clusters recovered from the farthest point
};

// Lloyd iterations from k-means++ seeding. Ties in the assignment step go to
// the lowest centroid index. Throws InputError when k < 2 or rows < k.
KMeansResult kmeans(const Matrix& features, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& opts = {});

// Sum of squared distances of each row to its cluster mean.
double kmeans_objective(const Matrix& points, std::span<const int> labels);

class SignedGraph {
 public:
  SignedGraph() = default;
  // Throws InputError unless adjacency is n*n, symmetric, zero-diagonal and
  // valued in {-1, 0, +1}.
  SignedGraph(std::size_t n, std::vector<std::int8_t> adjacency);

  std::size_t size() const noexcept { return n_; }
  int operator()(std::size_t i, std::size_t j) const { return adj_[i * n_ + j]; }
  std::span<const std::int8_t> adjacency() const noexcept { return adj_; }

  friend bool operator==(const SignedGraph&, const SignedGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::int8_t> adj_;
};

// S_ij = +1 for equal labels, -1 otherwise, 0 on the diagonal.
SignedGraph build_signed_graph(std::span<const int> labels);

struct SignedLaplacian {
  Matrix laplacian;             // I - D^{-1/2} S D^{-1/2}
  std::vector<double> degrees;  // d_i = sum_j |S_ij|
};

// Isolated nodes (d_i = 0) get a zero row/column in the normalized adjacency
// and L_ii = 1.
SignedLaplacian signed_laplacian(const SignedGraph& g);

// D^{-1/2} S D^{-1/2}, with zero rows for isolated nodes.
Matrix normalized_adjacency(const SignedGraph& g);

struct EffectiveLaplacian {
  Matrix laplacian;  // gamma * L - (1/n) I
  double gamma = 0.0;
};

EffectiveLaplacian effective_laplacian(const SignedLaplacian& l, double gamma, std::size_t n);

}  // namespace plc
