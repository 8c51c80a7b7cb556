#pragma once

// Alternating optimization of the PLC objective: CP-ALS initialization,
// per-row fixed-point feature updates, shared-factor ridge updates and a
// pseudo-graph refresh every outer iteration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "plc/objective.hpp"
#include "plc/pseudo_graph.hpp"
#include "plc/tensor.hpp"

namespace plc {

struct FeatureRowResult {
  std::vector<double> w;
  std::size_t iters = 0;
  // ||w_{t+1} - w_t|| / ||w_t - w_{t-1}|| for every step after the first.
  std::vector<double> ratios;
  // Successive step norms ||w_{t+1} - w_t||, one per iteration.
  std::vector<double> steps;
  bool converged = false;
};

// Fixed-point iteration for one feature row:
//
//   w <- (x^T H1 - (beta/2) h2 (I - w w^T/|w|^2) / |w|) (H1^T H1 + alpha I)^{-1}
//
// until ||w_{t+1} - w_t|| < inner_tol or inner_max steps. The fixed point is
// a stationary point of feature_row_objective. Throws NumericalError when
// |w| drops below 1e-12 mid-iteration, InputError when w0 is zero.
FeatureRowResult update_feature_row(std::span<const double> x_row, const Matrix& h1,
                                    std::span<const double> h2, std::span<const double> w0,
                                    double alpha, double beta, double inner_tol,
                                    std::size_t inner_max);

// Same iteration with x^T H1 precomputed and (H1^T H1 + alpha I) already factored.
FeatureRowResult fixed_point_row(std::span<const double> projected, const Cholesky& system,
                                 std::span<const double> h2, std::span<const double> w0,
                                 double beta, double inner_tol, std::size_t inner_max);

// alpha |w|^2 + beta <w/|w|, h2> + |x - H1 w|^2
double feature_row_objective(std::span<const double> x_row, const Matrix& h1,
                             std::span<const double> h2, std::span<const double> w, double alpha,
                             double beta);

// beta (2m + M) |h2| |H1^T H1 + alpha I|_F / m^3 with m, M the smallest and
// largest iterate norms. Below 1 the feature iteration contracts.
double contraction_constant(double beta, std::span<const double> h2, const Matrix& gram,
                            double alpha, double min_norm, double max_norm);

// Seeded standard-normal factors refined by `iters` sweeps of ridge ALS on
// 0.5 |X - [[W, A, B, ...]]|^2 + 0.5 alpha sum |U|^2. Each sweep updates the
// sample mode first, then the other modes in order.
KruskalModel cp_als_init(const DenseTensor& x, std::size_t rank, double alpha, std::size_t iters,
                         std::uint64_t seed);

// beta = 0 feature solve for every row: X_(1) H1 (H1^T H1 + alpha I)^{-1}.
Matrix ridge_features(const DenseTensor& x, std::span<const Matrix> factors, double alpha);

// One Jacobi sweep of fixed-point row updates for the feature matrix of `x`.
// `partner` is the frozen feature matrix of the other view; row n uses
// h2 = l_eff.row(n) * Lambda(partner) * partner. Each row starts from its
// beta = 0 ridge solution (falling back to `current` when that is zero).
Matrix update_features(const DenseTensor& x, std::span<const Matrix> factors, const Matrix& current,
                       const Matrix& partner, const Matrix& l_eff, const Hyperparams& hp);

// Ridge ALS sweep over the non-sample modes of the stacked problem
// [X; X~] ~ [[ [W; W~], A, B, ... ]]. Every sub-update exactly minimizes
// the factor part of cp + alpha * reg, so that quantity never increases.
std::vector<Matrix> update_factors(const DenseTensor& x, const DenseTensor& x_tilde, const Matrix& w,
                                   const Matrix& w_tilde, std::vector<Matrix> factors, double alpha);

struct FitState {
  KruskalModel model;
  Matrix w_tilde;
  Labels labels;  // pseudo labels that defined `graph`
  SignedGraph graph;
  SignedLaplacian laplacian;
  std::vector<LossReport> loss_history;
  std::vector<double> iteration_seconds;
  std::size_t outer_iter = 0;
};

struct PhaseTimes {
  double init = 0.0;
  double graph = 0.0;
  double features = 0.0;
  double factors = 0.0;
  double loss = 0.0;
};

struct FitResult {
  FitState state;
  bool converged = false;
  Labels pseudo_labels;  // k-means on the final W
  PhaseTimes seconds;
  LossReport initial_loss;
};

// Called after every outer iteration with the updated state.
using IterationObserver = std::function<void(const FitState&)>;

// Alternates pseudo labeling (k-means on W -> signed graph -> effective
// Laplacian) with W, W~ and factor updates until |delta total| < outer_tol or
// outer_max_iters. Deterministic for fixed hp.seed regardless of hp.threads.
FitResult fit(const DenseTensor& x, const DenseTensor& x_tilde, const Hyperparams& hp,
              std::size_t k_clusters, const IterationObserver& observer = {});

}  // namespace plc
