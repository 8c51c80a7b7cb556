#pragma once

// Loss terms of the pseudo-Laplacian-contrast objective
//
//   total = cp + alpha * reg + beta * plc,   plc = -trans_inv + gamma * cross_view
//
// plus InfoNCE and expanded-form diagnostics. Every Laplacian/contrastive
// term works on L2-normalized feature rows, so it is invariant to positive
// rescaling of any row of W or W~.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "plc/pseudo_graph.hpp"
#include "plc/tensor.hpp"

namespace plc {

struct Hyperparams {
  double alpha = 1e-2;
  double beta = 1.0;
  // Unset means 1 / (2N) for N samples.
  std::optional<double> gamma;
  std::size_t rank = 32;
  std::size_t init_iters = 50;
  std::size_t outer_max_iters = 100;
  std::size_t inner_max_iters = 20;
  double outer_tol = 1e-3;
  double inner_tol = 1e-6;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  double resolved_gamma(std::size_t n_samples) const;
  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct LossReport {
  double cp = 0.0;
  double reg = 0.0;
  double trans_inv = 0.0;
  double cross_view = 0.0;
  double plc = 0.0;
  double total = 0.0;
};

// Tr(W^T Lambda(W) M Lambda(W~) W~) = sum_ij M_ij <w_i/|w_i|, w~_j/|w~_j|>.
double laplacian_trace(const Matrix& w, const Matrix& w_tilde, const Matrix& m);

double same_view_laplacian(const Matrix& w, const Matrix& laplacian);
double cross_view_laplacian(const Matrix& w, const Matrix& w_tilde, const Matrix& laplacian);
// Mean cosine between each sample and its augmented counterpart.
double trans_inv(const Matrix& w, const Matrix& w_tilde);
double plc_loss(const Matrix& w, const Matrix& w_tilde, const Matrix& laplacian, double gamma);

// 0.5 ||X - [[W, A, B, C]]||^2 + 0.5 ||X~ - [[W~, A, B, C]]||^2
double cp_loss(const DenseTensor& x, const DenseTensor& x_tilde, const KruskalModel& model,
               const Matrix& w_tilde);
// 0.5 (|W|^2 + |W~|^2 + sum_k |U_k|^2)
double reg_loss(const KruskalModel& model, const Matrix& w_tilde);

LossReport total_loss(const DenseTensor& x, const DenseTensor& x_tilde, const KruskalModel& model,
                      const Matrix& w_tilde, const Matrix& laplacian, double alpha, double beta,
                      double gamma);

// InfoNCE with log-sum-exp stabilization; rows are normalized internally.
// Throws ConfigError for tau <= 0.
double infonce_loss(const Matrix& w, const Matrix& w_tilde, double tau);

// The trace form of plc_loss expanded into pairwise sums over the
// degree-normalized adjacency:
//   -(1/N) sum_i c_ii + gamma sum_i c_ii + gamma sum_ij (-Sbar_ij) c_ij,
// c_ij = <w_i/|w_i|, w~_j/|w~_j|>. Equal to plc_loss with L from `graph`.
double plc_expanded(const Matrix& w, const Matrix& w_tilde, const SignedGraph& graph, double gamma);

struct BlockPairwiseTerms {
  double block_term = 0.0;
  double pairwise_term = 0.0;
};

// Per sample i:
//   block    = -w_i^T (sum_{S_ij=1} w~_j + sum_{S_ij=-1} w~_j)
//   pairwise = -w_i^T (w~_i - sum_j |S_ij| w~_j)
// on normalized rows. Reported for inspection; no ordering between the two
// holds in general.
std::vector<BlockPairwiseTerms> block_pairwise_diagnostic(const Matrix& w, const Matrix& w_tilde,
                                                          const SignedGraph& graph);

}  // namespace plc
