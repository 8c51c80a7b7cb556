#include "plc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plc/error.hpp"

namespace plc {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": W and W~ differ in shape");
  }
}

// c_ij = <w_i_hat, w~_j_hat>
Matrix cosine_matrix(const Matrix& w, const Matrix& w_tilde) {
  return matmul_nt(normalize_rows(w).rows, normalize_rows(w_tilde).rows);
}

}  // namespace

double Hyperparams::resolved_gamma(std::size_t n_samples) const {
  if (gamma) return *gamma;
  return 1.0 / (2.0 * double(std::max<std::size_t>(1, n_samples)));
}

void Hyperparams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("hyperparams: alpha and beta must be >= 0");
  if (gamma && !(*gamma >= 0.0)) throw ConfigError("hyperparams: gamma must be >= 0");
  if (rank < 1) throw ConfigError("hyperparams: rank must be >= 1");
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) throw ConfigError("hyperparams: tolerances must be > 0");
  if (inner_max_iters < 1) throw ConfigError("hyperparams: inner_max_iters must be >= 1");
  if (beta > 0.0 && !(alpha > 0.0)) {
    throw ConfigError("hyperparams: the fixed-point feature update needs alpha > 0 when beta > 0");
  }
  if (threads < 1) throw ConfigError("hyperparams: threads must be >= 1");
}

double laplacian_trace(const Matrix& w, const Matrix& w_tilde, const Matrix& m) {
  require_same_shape(w, w_tilde, "laplacian_trace");
  if (m.rows() != w.rows() || m.cols() != w.rows()) {
    throw DimensionError("laplacian_trace: Laplacian must be N x N");
  }
  const Matrix c = cosine_matrix(w, w_tilde);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += m.data()[i] * c.data()[i];
  return s;
}

double same_view_laplacian(const Matrix& w, const Matrix& laplacian) {
  return laplacian_trace(w, w, laplacian);
}

double cross_view_laplacian(const Matrix& w, const Matrix& w_tilde, const Matrix& laplacian) {
  return laplacian_trace(w, w_tilde, laplacian);
}

double trans_inv(const Matrix& w, const Matrix& w_tilde) {
  require_same_shape(w, w_tilde, "trans_inv");
  const auto a = normalize_rows(w).rows;
  const auto b = normalize_rows(w_tilde).rows;
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += dot(a.row(i), b.row(i));
  return s / double(w.rows());
}

double plc_loss(const Matrix& w, const Matrix& w_tilde, const Matrix& laplacian, double gamma) {
  return -trans_inv(w, w_tilde) + gamma * cross_view_laplacian(w, w_tilde, laplacian);
}

double cp_loss(const DenseTensor& x, const DenseTensor& x_tilde, const KruskalModel& model,
               const Matrix& w_tilde) {
  require_same_shape(model.weights, w_tilde, "cp_loss");
  KruskalModel tilde{w_tilde, model.factors};
  return reconstruction_error(x, model) + reconstruction_error(x_tilde, tilde);
}

double reg_loss(const KruskalModel& model, const Matrix& w_tilde) {
  double s = model.weights.squared_norm() + w_tilde.squared_norm();
  for (const auto& f : model.factors) s += f.squared_norm();
  return 0.5 * s;
}

LossReport total_loss(const DenseTensor& x, const DenseTensor& x_tilde, const KruskalModel& model,
                      const Matrix& w_tilde, const Matrix& laplacian, double alpha, double beta,
                      double gamma) {
  LossReport r;
  r.cp = cp_loss(x, x_tilde, model, w_tilde);
  r.reg = reg_loss(model, w_tilde);
  r.trans_inv = trans_inv(model.weights, w_tilde);
  r.cross_view = cross_view_laplacian(model.weights, w_tilde, laplacian);
  r.plc = -r.trans_inv + gamma * r.cross_view;
  r.total = r.cp + alpha * r.reg + beta * r.plc;
  return r;
}

double infonce_loss(const Matrix& w, const Matrix& w_tilde, double tau) {
  if (!(tau > 0.0)) throw ConfigError("infonce_loss: tau must be positive");
  require_same_shape(w, w_tilde, "infonce_loss");
  const Matrix c = cosine_matrix(w, w_tilde);
  const std::size_t n = c.rows();
  double align = 0.0;
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    align += c(i, i);
    const auto row = c.row(i);
    const double peak = *std::max_element(row.begin(), row.end()) / tau;
    double acc = 0.0;
    for (double v : row) acc += std::exp(v / tau - peak);
    spread += peak + std::log(acc);
  }
  return -align / double(n) + tau * spread / double(n);
}

double plc_expanded(const Matrix& w, const Matrix& w_tilde, const SignedGraph& graph, double gamma) {
  require_same_shape(w, w_tilde, "plc_expanded");
  if (graph.size() != w.rows()) throw DimensionError("plc_expanded: graph size differs from N");
  const Matrix c = cosine_matrix(w, w_tilde);
  const Matrix s_bar = normalized_adjacency(graph);
  const std::size_t n = c.rows();
  double diag = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag += c(i, i);
    for (std::size_t j = 0; j < n; ++j) pairs += -s_bar(i, j) * c(i, j);
  }
  return -diag / double(n) + gamma * diag + gamma * pairs;
}

std::vector<BlockPairwiseTerms> block_pairwise_diagnostic(const Matrix& w, const Matrix& w_tilde,
                                                          const SignedGraph& graph) {
  require_same_shape(w, w_tilde, "block_pairwise_diagnostic");
  if (graph.size() != w.rows()) throw DimensionError("block_pairwise_diagnostic: graph size differs from N");
  const Matrix c = cosine_matrix(w, w_tilde);
  const std::size_t n = c.rows();
  std::vector<BlockPairwiseTerms> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double positive = 0.0;
    double negative = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const int s = graph(i, j);
      if (s == 1) positive += c(i, j);
      if (s == -1) negative += c(i, j);
      weighted += std::abs(s) * c(i, j);
    }
    out[i].block_term = -(positive + negative);
    out[i].pairwise_term = -(c(i, i) - weighted);
  }
  return out;
}

}  // namespace plc
