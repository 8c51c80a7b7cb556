#pragma once

// Dense tensors, row-major matrices and the multilinear primitives used by the
// CP model: sample-mode unfolding, Khatri-Rao products, Kruskal reconstruction,
// Gram-Hadamard products, ridge solves and row normalization.
//
// Index convention everywhere: row-major, last index fastest. The Khatri-Rao
// product of (A, B, C) puts A's index slowest, so for a sample tensor with
// dims [N, I, J, K] row n of the sample unfolding is the contiguous slice of
// sample n and matches the rows of khatri_rao({A, B, C}).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace plc {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws DimensionError when data.size() != rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  double squared_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

class DenseTensor {
 public:
  DenseTensor() = default;
  // Zero-filled tensor. Every extent must be positive.
  explicit DenseTensor(std::vector<std::size_t> dims);
  // Throws DimensionError on a length mismatch and NumericalError on a
  // non-finite entry.
  DenseTensor(std::vector<std::size_t> dims, std::vector<double> data);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  // Product of all extents after the first.
  std::size_t slice_size() const noexcept;
  std::span<const double> sample(std::size_t n) const;
  std::span<double> sample(std::size_t n);

  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  double squared_norm() const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

// CP model of a sample tensor: one feature row per sample in `weights` plus a
// factor matrix per non-sample mode. All matrices share the column count R.
struct KruskalModel {
  Matrix weights;
  std::vector<Matrix> factors;

  std::size_t rank() const noexcept { return weights.cols(); }
  // dims [N, I, J, ...] of the tensor this model reconstructs.
  std::vector<std::size_t> dims() const;
  // Throws DimensionError when the column counts disagree or fewer than two
  // factors are present.
  void validate() const;

  friend bool operator==(const KruskalModel&, const KruskalModel&) = default;
};

// N x (product of remaining dims). Requires order >= 3.
Matrix unfold_samples(const DenseTensor& t);

Matrix khatri_rao(std::span<const Matrix> ms);

DenseTensor kruskal_reconstruct(const KruskalModel& m);

// 0.5 * ||t - [[W, A, B, C]]||_F^2
double reconstruction_error(const DenseTensor& t, const KruskalModel& m);

// Elementwise product of the Gram matrices m^T m.
Matrix gram_hadamard(std::span<const Matrix> ms);

// Matricized tensor times Khatri-Rao product for one mode. `mats` holds one
// matrix per tensor mode (the sample-mode entry is the weight matrix); the
// entry for `mode` is ignored. Equals X_(mode) * khatri_rao(other mats in
// mode order) without materializing either operand.
Matrix mttkrp(const DenseTensor& t, std::span<const Matrix> mats, std::size_t mode);

// Cholesky factor of an SPD matrix, reusable across right-hand sides.
class Cholesky {
 public:
  // Factors g + shift * I. Throws NumericalError with a pivot diagnostic when
  // the shifted matrix is not positive definite.
  explicit Cholesky(const Matrix& g, double shift = 0.0);

  std::size_t dim() const noexcept { return n_; }
  // Solves x * (G + shift I) = rhs for the row vector x, in place.
  void solve_row(std::span<double> x) const;
  // Ratio of extreme squared pivots, a cheap lower bound on the condition number.
  double pivot_ratio() const noexcept { return pivot_ratio_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> lower_;
  double pivot_ratio_ = 1.0;
};

// rhs * (g + alpha I)^{-1} through a Cholesky factorization.
Matrix solve_ridge(const Matrix& g, const Matrix& rhs, double alpha);

struct NormalizedRows {
  Matrix rows;
  // 1/||row||, or 0 for a zero row.
  std::vector<double> scales;
};

// Scales each nonzero row to unit Euclidean norm. Zero rows stay zero with a
// reported scale of 0 and a warning.
NormalizedRows normalize_rows(const Matrix& m);

}  // namespace plc
