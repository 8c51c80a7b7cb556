#include "plc/pseudo_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "plc/error.hpp"
#include "plc/log.hpp"
#include "plc/random.hpp"

namespace plc {
namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const Matrix& centroids, std::span<const double> p, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = sq_dist(centroids.row(c), p);
    if (d < best_d) {  // strict: lowest index wins ties
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

Matrix seed_plus_plus(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centroids(k, x.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += d2[i];
      if (total > 0.0) {
        std::discrete_distribution<std::size_t> dist(d2.begin(), d2.end());
        pick = dist(rng);
      } else {
        // Every point coincides with a chosen centroid.
        pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
        if (pick == n) pick = 0;
      }
    }
    chosen[pick] = true;
    std::copy_n(x.row(pick).begin(), x.cols(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x.row(i), centroids.row(c)));
  }
  return centroids;
}

KMeansResult lloyd(const Matrix& x, Matrix centroids, const KMeansOptions& opts) {
  const std::size_t n = x.rows();
  const std::size_t k = centroids.rows();
  const std::size_t dim = x.cols();
  KMeansResult res;
  res.labels.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) res.labels[i] = int(nearest(centroids, x.row(i), &dist[i]));

    Matrix next(k, dim);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = std::size_t(res.labels[i]);
      ++count[c];
      auto dst = next.row(c);
      auto src = x.row(i);
      for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) {
        // Reseed from the point farthest from its current centroid.
        const auto far = std::size_t(std::max_element(dist.begin(), dist.end()) - dist.begin());
        std::copy_n(x.row(far).begin(), dim, next.row(c).begin());
        dist[far] = 0.0;
        ++res.reseeded;
        continue;
      }
      for (auto& v : next.row(c)) v /= double(count[c]);
    }
    double move = 0.0;
    for (std::size_t c = 0; c < k; ++c) move = std::max(move, std::sqrt(sq_dist(next.row(c), centroids.row(c))));
    centroids = std::move(next);
    res.iterations = iter + 1;
    if (move < opts.tol) break;
  }
  for (std::size_t i = 0; i < n; ++i) res.labels[i] = int(nearest(centroids, x.row(i), nullptr));
  res.centroids = std::move(centroids);
  res.inertia = kmeans_objective(x, res.labels);
  return res;
}

void canonicalize(KMeansResult& r) {
  std::map<int, int> remap;
  for (int l : r.labels) remap.try_emplace(l, int(remap.size()));
  Matrix centroids(r.centroids.rows(), r.centroids.cols());
  int next = int(remap.size());
  for (std::size_t c = 0; c < r.centroids.rows(); ++c) {
    auto it = remap.find(int(c));
    const int to = it != remap.end() ? it->second : next++;
    std::copy_n(r.centroids.row(c).begin(), r.centroids.cols(), centroids.row(std::size_t(to)).begin());
  }
  for (int& l : r.labels) l = remap[l];
  r.centroids = std::move(centroids);
}

}  // namespace

double kmeans_objective(const Matrix& points, std::span<const int> labels) {
  if (labels.size() != points.rows()) throw DimensionError("kmeans_objective: label count mismatch");
  std::map<int, std::pair<std::vector<double>, std::size_t>> sums;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto& [s, c] = sums[labels[i]];
    s.resize(points.cols(), 0.0);
    for (std::size_t j = 0; j < points.cols(); ++j) s[j] += points(i, j);
    ++c;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto& [s, c] = sums[labels[i]];
    for (std::size_t j = 0; j < points.cols(); ++j) {
      const double d = points(i, j) - s[j] / double(c);
      total += d * d;
    }
  }
  return total;
}

KMeansResult kmeans(const Matrix& features, std::size_t k, std::uint64_t seed, const KMeansOptions& opts) {
  if (k < 2) throw InputError("kmeans: k must be at least 2");
  if (features.rows() < k) {
    throw InputError("kmeans: " + std::to_string(features.rows()) + " points for k = " + std::to_string(k));
  }
  const Matrix x = opts.normalize ? normalize_rows(features).rows : features;
  KMeansResult best;
  bool have = false;
  const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);
  for (std::size_t run = 0; run < restarts; ++run) {
    auto rng = make_rng(seed, Stream::kKmeans, run);
    KMeansResult r = lloyd(x, seed_plus_plus(x, k, rng), opts);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  if (best.reseeded) {
    warn("kmeans: reseeded " + std::to_string(best.reseeded) + " empty cluster(s) from the farthest point");
  }
  canonicalize(best);
  return best;
}

SignedGraph::SignedGraph(std::size_t n, std::vector<std::int8_t> adjacency)
    : n_(n), adj_(std::move(adjacency)) {
  if (adj_.size() != n_ * n_) throw InputError("SignedGraph: adjacency is not n x n");
  for (std::size_t i = 0; i < n_; ++i) {
    if (adj_[i * n_ + i] != 0) throw InputError("SignedGraph: nonzero diagonal");
    for (std::size_t j = 0; j < n_; ++j) {
      const int v = adj_[i * n_ + j];
      if (v < -1 || v > 1) throw InputError("SignedGraph: entries must be in {-1, 0, 1}");
      if (v != adj_[j * n_ + i]) throw InputError("SignedGraph: adjacency not symmetric");
    }
  }
}

SignedGraph build_signed_graph(std::span<const int> labels) {
  const std::size_t n = labels.size();
  std::vector<std::int8_t> adj(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) adj[i * n + j] = labels[i] == labels[j] ? 1 : -1;
  return SignedGraph(n, std::move(adj));
}

Matrix normalized_adjacency(const SignedGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += std::abs(g(i, j));
    inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = inv_sqrt[i] * double(g(i, j)) * inv_sqrt[j];
  return s;
}

SignedLaplacian signed_laplacian(const SignedGraph& g) {
  const std::size_t n = g.size();
  SignedLaplacian out{normalized_adjacency(g), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.degrees[i] += std::abs(g(i, j));
      out.laplacian(i, j) = (i == j ? 1.0 : 0.0) - out.laplacian(i, j);
    }
  }
  return out;
}

EffectiveLaplacian effective_laplacian(const SignedLaplacian& l, double gamma, std::size_t n) {
  if (gamma < 0.0) throw ConfigError("effective_laplacian: gamma must be non-negative");
  if (n == 0) throw InputError("effective_laplacian: n must be positive");
  const std::size_t m = l.laplacian.rows();
  EffectiveLaplacian out{Matrix(m, m), gamma};
  const double shift = 1.0 / double(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.laplacian(i, j) = gamma * l.laplacian(i, j) - (i == j ? shift : 0.0);
    }
  }
  return out;
}

}  // namespace plc
