#pragma once

// Random instances and deliberately naive reference implementations used as
// oracles by the unit and acceptance tests. Nothing here calls the library
// routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "plc/pseudo_graph.hpp"
#include "plc/tensor.hpp"

namespace plc::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = normal(rng);
  return m;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

inline DenseTensor random_tensor(std::vector<std::size_t> dims, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return DenseTensor(std::move(dims), random_vector(n, rng));
}

inline KruskalModel random_model(std::size_t n, const std::vector<std::size_t>& dims, std::size_t rank,
                                 std::mt19937_64& rng) {
  KruskalModel m;
  m.weights = random_matrix(n, rank, rng);
  for (auto d : dims) m.factors.push_back(random_matrix(d, rank, rng));
  return m;
}

inline Labels random_labels(std::size_t n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  Labels l(n);
  for (auto& v : l) v = pick(rng);
  return l;
}

// x[n,i,j,k] = sum_r W[n,r] A[i,r] B[j,r] C[k,r], four nested loops.
inline std::vector<double> brute_kruskal3(const KruskalModel& m) {
  const auto& a = m.factors.at(0);
  const auto& b = m.factors.at(1);
  const auto& c = m.factors.at(2);
  std::vector<double> out;
  for (std::size_t n = 0; n < m.weights.rows(); ++n)
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < b.rows(); ++j)
        for (std::size_t k = 0; k < c.rows(); ++k) {
          double s = 0.0;
          for (std::size_t r = 0; r < m.rank(); ++r) s += m.weights(n, r) * a(i, r) * b(j, r) * c(k, r);
          out.push_back(s);
        }
  return out;
}

inline double brute_half_sq_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return 0.5 * s;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

// Gauss-Jordan inverse with partial pivoting.
inline Matrix naive_inverse(Matrix a) {
  const std::size_t n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(col, c), a(piv, c));
      std::swap(inv(col, c), inv(piv, c));
    }
    const double p = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs_diff(a.data(), b.data()); }

inline std::vector<double> unit(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  std::vector<double> out(v.begin(), v.end());
  if (s > 0.0)
    for (auto& x : out) x /= s;
  return out;
}

// cos(w_i, w~_j) with zero rows contributing 0.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  const auto ua = unit(a);
  const auto ub = unit(b);
  double s = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) s += ua[i] * ub[i];
  return s;
}

// sum_ij M_ij cos(w_i, w~_j), double loop.
inline double naive_laplacian_sum(const Matrix& w, const Matrix& wt, const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < wt.rows(); ++j) s += m(i, j) * cosine(w.row(i), wt.row(j));
  return s;
}

// L = I - D^{-1/2} S D^{-1/2} entrywise from labels, straight from the definition.
inline Matrix naive_signed_laplacian(const Labels& labels) {
  const std::size_t n = labels.size();
  Matrix l(n, n);
  const double d = double(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        l(i, j) = 1.0;
        continue;
      }
      const double s = labels[i] == labels[j] ? 1.0 : -1.0;
      l(i, j) = d > 0.0 ? -s / d : 0.0;
    }
  return l;
}

}  // namespace plc::testing
