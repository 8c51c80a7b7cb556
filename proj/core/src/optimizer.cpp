#include "plc/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "plc/error.hpp"
#include "plc/log.hpp"
#include "plc/parallel.hpp"
#include "plc/random.hpp"

namespace plc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Matrix> with_weights(const Matrix& w, std::span<const Matrix> factors) {
  std::vector<Matrix> mats;
  mats.reserve(factors.size() + 1);
  mats.push_back(w);
  mats.insert(mats.end(), factors.begin(), factors.end());
  return mats;
}

void check_factors(const DenseTensor& x, std::span<const Matrix> factors) {
  if (x.order() != factors.size() + 1) {
    throw DimensionError("tensor order " + std::to_string(x.order()) + " does not match " +
                         std::to_string(factors.size()) + " factor matrices");
  }
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].rows() != x.dims()[k + 1]) {
      throw DimensionError("factor " + std::to_string(k) + " has " + std::to_string(factors[k].rows()) +
                           " rows, tensor extent is " + std::to_string(x.dims()[k + 1]));
    }
  }
}

Matrix random_normal(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = normal(rng);
  return m;
}

void check_finite(const Matrix& m, const char* what) {
  for (double v : m.data())
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite value");
}

}  // namespace

// ---------------------------------------------------------------------------
// Feature rows

FeatureRowResult fixed_point_row(std::span<const double> projected, const Cholesky& system,
                                 std::span<const double> h2, std::span<const double> w0,
                                 double beta, double inner_tol, std::size_t inner_max) {
  const std::size_t r = system.dim();
  if (projected.size() != r || h2.size() != r || w0.size() != r) {
    throw DimensionError("fixed_point_row: vectors must have length R");
  }
  FeatureRowResult res;
  res.w.assign(w0.begin(), w0.end());
  if (norm2(res.w) == 0.0) throw InputError("fixed_point_row: initial guess must be nonzero");

  std::vector<double> next(r);
  double prev_step = 0.0;
  for (std::size_t t = 0; t < inner_max; ++t) {
    const double nw = norm2(res.w);
    if (nw < 1e-12) throw NumericalError("fixed_point_row: feature norm underflow (" + std::to_string(nw) + ")");
    // h2 (I - w w^T / |w|^2) / |w|
    const double proj = dot(h2, res.w) / (nw * nw);
    for (std::size_t c = 0; c < r; ++c) {
      const double tangent = (h2[c] - proj * res.w[c]) / nw;
      next[c] = projected[c] - 0.5 * beta * tangent;
    }
    system.solve_row(next);

    double step = 0.0;
    for (std::size_t c = 0; c < r; ++c) step += (next[c] - res.w[c]) * (next[c] - res.w[c]);
    step = std::sqrt(step);
    res.steps.push_back(step);
    if (t > 0) res.ratios.push_back(prev_step > 0.0 ? step / prev_step : 0.0);
    prev_step = step;
    res.w.swap(next);
    res.iters = t + 1;
    if (beta == 0.0 || step < inner_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

FeatureRowResult update_feature_row(std::span<const double> x_row, const Matrix& h1,
                                    std::span<const double> h2, std::span<const double> w0,
                                    double alpha, double beta, double inner_tol,
                                    std::size_t inner_max) {
  if (x_row.size() != h1.rows()) throw DimensionError("update_feature_row: x_row length != rows of H1");
  const std::size_t r = h1.cols();
  std::vector<double> projected(r, 0.0);
  for (std::size_t p = 0; p < h1.rows(); ++p) {
    const double x = x_row[p];
    auto h = h1.row(p);
    for (std::size_t c = 0; c < r; ++c) projected[c] += x * h[c];
  }
  const Cholesky system(matmul_tn(h1, h1), alpha);
  return fixed_point_row(projected, system, h2, w0, beta, inner_tol, inner_max);
}

double feature_row_objective(std::span<const double> x_row, const Matrix& h1,
                             std::span<const double> h2, std::span<const double> w, double alpha,
                             double beta) {
  if (x_row.size() != h1.rows() || w.size() != h1.cols() || h2.size() != h1.cols()) {
    throw DimensionError("feature_row_objective: shape mismatch");
  }
  double fit = 0.0;
  for (std::size_t p = 0; p < h1.rows(); ++p) {
    const double e = x_row[p] - dot(h1.row(p), w);
    fit += e * e;
  }
  const double nw = norm2(w);
  return alpha * nw * nw + beta * dot(w, h2) / nw + fit;
}

double contraction_constant(double beta, std::span<const double> h2, const Matrix& gram,
                            double alpha, double min_norm, double max_norm) {
  double fro = 0.0;
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = 0; j < gram.cols(); ++j) {
      const double v = gram(i, j) + (i == j ? alpha : 0.0);
      fro += v * v;
    }
  return beta * (2.0 * min_norm + max_norm) * norm2(h2) * std::sqrt(fro) /
         (min_norm * min_norm * min_norm);
}

Matrix ridge_features(const DenseTensor& x, std::span<const Matrix> factors, double alpha) {
  check_factors(x, factors);
  const std::size_t r = factors.front().cols();
  const auto mats = with_weights(Matrix(x.dims()[0], r), factors);
  return solve_ridge(gram_hadamard(factors), mttkrp(x, mats, 0), alpha);
}

Matrix update_features(const DenseTensor& x, std::span<const Matrix> factors, const Matrix& current,
                       const Matrix& partner, const Matrix& l_eff, const Hyperparams& hp) {
  check_factors(x, factors);
  const std::size_t n = x.dims()[0];
  const std::size_t r = factors.front().cols();
  if (current.rows() != n || current.cols() != r || partner.rows() != n || partner.cols() != r) {
    throw DimensionError("update_features: feature matrices must be N x R");
  }
  if (l_eff.rows() != n || l_eff.cols() != n) throw DimensionError("update_features: Laplacian must be N x N");

  const Cholesky system(gram_hadamard(factors), hp.alpha);
  const Matrix projected = mttkrp(x, with_weights(current, factors), 0);
  Matrix out(n, r);

  if (hp.beta == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(projected.row(i).begin(), projected.row(i).end(), out.row(i).begin());
      system.solve_row(out.row(i));
    }
    check_finite(out, "update_features");
    return out;
  }

  const Matrix h2_all = matmul(l_eff, normalize_rows(partner).rows);
  std::vector<std::uint8_t> degenerate(n, 0);
  parallel_for(n, hp.threads, [&](std::size_t i) {
    std::vector<double> w0(projected.row(i).begin(), projected.row(i).end());
    system.solve_row(w0);
    if (norm2(w0) < 1e-12) {
      w0.assign(current.row(i).begin(), current.row(i).end());
      if (norm2(w0) < 1e-12) {
        degenerate[i] = 1;
        return;  // row stays zero; it carries no direction for the contrastive term
      }
    }
    auto res = fixed_point_row(projected.row(i), system, h2_all.row(i), w0, hp.beta, hp.inner_tol,
                               hp.inner_max_iters);
    std::copy(res.w.begin(), res.w.end(), out.row(i).begin());
  });
  std::size_t zero_rows = 0;
  for (auto d : degenerate) zero_rows += d;
  if (zero_rows) warn("update_features: " + std::to_string(zero_rows) + " zero feature row(s) left at zero");
  check_finite(out, "update_features");
  return out;
}

// ---------------------------------------------------------------------------
// Factors

std::vector<Matrix> update_factors(const DenseTensor& x, const DenseTensor& x_tilde, const Matrix& w,
                                   const Matrix& w_tilde, std::vector<Matrix> factors, double alpha) {
  check_factors(x, factors);
  check_factors(x_tilde, factors);
  if (w.rows() != x.dims()[0] || w_tilde.rows() != x_tilde.dims()[0]) {
    throw DimensionError("update_factors: feature rows do not match sample counts");
  }
  const Matrix w_gram = [&] {
    Matrix g = matmul_tn(w, w);
    const Matrix gt = matmul_tn(w_tilde, w_tilde);
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] += gt.data()[i];
    return g;
  }();

  for (std::size_t m = 0; m < factors.size(); ++m) {
    Matrix gram = w_gram;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k == m) continue;
      const Matrix g = matmul_tn(factors[k], factors[k]);
      for (std::size_t i = 0; i < gram.size(); ++i) gram.data()[i] *= g.data()[i];
    }
    Matrix rhs = mttkrp(x, with_weights(w, factors), m + 1);
    const Matrix rhs_tilde = mttkrp(x_tilde, with_weights(w_tilde, factors), m + 1);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.data()[i] += rhs_tilde.data()[i];
    factors[m] = solve_ridge(gram, rhs, alpha);
    check_finite(factors[m], "update_factors");
  }
  return factors;
}

KruskalModel cp_als_init(const DenseTensor& x, std::size_t rank, double alpha, std::size_t iters,
                         std::uint64_t seed) {
  if (rank < 1) throw ConfigError("cp_als_init: rank must be >= 1");
  if (x.order() < 3) throw DimensionError("cp_als_init: need a tensor of order >= 3");
  auto rng = make_rng(seed, Stream::kInit);
  KruskalModel m;
  m.weights = random_normal(x.dims()[0], rank, rng);
  for (std::size_t k = 1; k < x.order(); ++k) m.factors.push_back(random_normal(x.dims()[k], rank, rng));

  for (std::size_t it = 0; it < iters; ++it) {
    m.weights = ridge_features(x, m.factors, alpha);
    for (std::size_t f = 0; f < m.factors.size(); ++f) {
      Matrix gram = matmul_tn(m.weights, m.weights);
      for (std::size_t k = 0; k < m.factors.size(); ++k) {
        if (k == f) continue;
        const Matrix g = matmul_tn(m.factors[k], m.factors[k]);
        for (std::size_t i = 0; i < gram.size(); ++i) gram.data()[i] *= g.data()[i];
      }
      m.factors[f] = solve_ridge(gram, mttkrp(x, with_weights(m.weights, m.factors), f + 1), alpha);
    }
  }
  check_finite(m.weights, "cp_als_init");
  return m;
}

// ---------------------------------------------------------------------------
// Outer loop

FitResult fit(const DenseTensor& x, const DenseTensor& x_tilde, const Hyperparams& hp,
              std::size_t k_clusters, const IterationObserver& observer) {
  hp.validate();
  if (x.dims() != x_tilde.dims()) throw DimensionError("fit: X and X~ must have identical dims");
  if (x.order() < 3) throw DimensionError("fit: need a tensor of order >= 3");
  if (k_clusters < 2) throw ConfigError("fit: k_clusters must be >= 2");
  const std::size_t n = x.dims()[0];
  const double gamma = hp.resolved_gamma(n);

  FitResult result;
  auto t0 = Clock::now();
  FitState& st = result.state;
  st.model = cp_als_init(x, hp.rank, hp.alpha, hp.init_iters, hp.seed);
  st.w_tilde = ridge_features(x_tilde, st.model.factors, hp.alpha);
  result.seconds.init = seconds_since(t0);

  double prev_total = 0.0;
  for (std::size_t iter = 0; iter < hp.outer_max_iters; ++iter) {
    const auto iter_start = Clock::now();

    t0 = Clock::now();
    const auto km = kmeans(st.model.weights, k_clusters, derive_seed(hp.seed, Stream::kKmeans, iter));
    st.labels = km.labels;
    st.graph = build_signed_graph(st.labels);
    st.laplacian = signed_laplacian(st.graph);
    const auto l_eff = effective_laplacian(st.laplacian, gamma, n);
    result.seconds.graph += seconds_since(t0);

    if (iter == 0) {
      t0 = Clock::now();
      result.initial_loss = total_loss(x, x_tilde, st.model, st.w_tilde, st.laplacian.laplacian,
                                       hp.alpha, hp.beta, gamma);
      prev_total = result.initial_loss.total;
      result.seconds.loss += seconds_since(t0);
    }

    t0 = Clock::now();
    st.model.weights = update_features(x, st.model.factors, st.model.weights, st.w_tilde, l_eff.laplacian, hp);
    st.w_tilde = update_features(x_tilde, st.model.factors, st.w_tilde, st.model.weights, l_eff.laplacian, hp);
    result.seconds.features += seconds_since(t0);

    t0 = Clock::now();
    st.model.factors = update_factors(x, x_tilde, st.model.weights, st.w_tilde,
                                      std::move(st.model.factors), hp.alpha);
    result.seconds.factors += seconds_since(t0);

    t0 = Clock::now();
    const auto report = total_loss(x, x_tilde, st.model, st.w_tilde, st.laplacian.laplacian,
                                   hp.alpha, hp.beta, gamma);
    result.seconds.loss += seconds_since(t0);

    st.loss_history.push_back(report);
    st.iteration_seconds.push_back(seconds_since(iter_start));
    st.outer_iter = iter + 1;
    if (observer) observer(st);

    if (std::abs(report.total - prev_total) < hp.outer_tol) {
      result.converged = true;
      break;
    }
    prev_total = report.total;
  }

  t0 = Clock::now();
  result.pseudo_labels =
      kmeans(st.model.weights, k_clusters, derive_seed(hp.seed, Stream::kKmeans, st.outer_iter)).labels;
  result.seconds.graph += seconds_since(t0);
  return result;
}

}  // namespace plc
