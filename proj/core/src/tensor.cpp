#include "plc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "plc/error.hpp"
#include "plc/log.hpp"

namespace plc {
namespace {

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::string dims_string(std::span<const std::size_t> dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
  os << ']';
  return os.str();
}

void require_same_cols(std::span<const Matrix> ms, const char* what) {
  if (ms.empty()) throw DimensionError(std::string(what) + ": empty matrix list");
  for (const auto& m : ms) {
    if (m.cols() != ms.front().cols()) {
      throw DimensionError(std::string(what) + ": column counts differ (" +
                           std::to_string(m.cols()) + " vs " +
                           std::to_string(ms.front().cols()) + ")");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::squared_norm() const {
  return std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto out = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("matmul_nt: column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// DenseTensor

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(product(dims_), 0.0) {
  for (auto d : dims_)
    if (d == 0) throw DimensionError("DenseTensor: zero extent in " + dims_string(dims_));
}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  for (auto d : dims_)
    if (d == 0) throw DimensionError("DenseTensor: zero extent in " + dims_string(dims_));
  if (data_.size() != product(dims_)) {
    throw DimensionError("DenseTensor: data length " + std::to_string(data_.size()) +
                         " does not match dims " + dims_string(dims_));
  }
  for (double v : data_)
    if (!std::isfinite(v)) throw NumericalError("DenseTensor: non-finite entry");
}

std::size_t DenseTensor::slice_size() const noexcept {
  return dims_.empty() ? 0 : product(std::span(dims_).subspan(1));
}

std::span<const double> DenseTensor::sample(std::size_t n) const {
  const auto s = slice_size();
  return std::span(data_).subspan(n * s, s);
}

std::span<double> DenseTensor::sample(std::size_t n) {
  const auto s = slice_size();
  return std::span(data_).subspan(n * s, s);
}

std::size_t DenseTensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != dims_.size()) throw DimensionError("DenseTensor::at: wrong index order");
  std::size_t off = 0;
  std::size_t k = 0;
  for (auto i : index) {
    if (i >= dims_[k]) throw DimensionError("DenseTensor::at: index out of range");
    off = off * dims_[k++] + i;
  }
  return off;
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
double DenseTensor::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

double DenseTensor::squared_norm() const {
  return std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0);
}

// ---------------------------------------------------------------------------
// KruskalModel

std::vector<std::size_t> KruskalModel::dims() const {
  std::vector<std::size_t> d{weights.rows()};
  for (const auto& f : factors) d.push_back(f.rows());
  return d;
}

void KruskalModel::validate() const {
  if (factors.size() < 2) throw DimensionError("KruskalModel: need at least two factor matrices");
  for (const auto& f : factors) {
    if (f.cols() != weights.cols()) {
      throw DimensionError("KruskalModel: factor has " + std::to_string(f.cols()) +
                           " columns, weights have " + std::to_string(weights.cols()));
    }
  }
}

// ---------------------------------------------------------------------------
// Multilinear primitives

Matrix unfold_samples(const DenseTensor& t) {
  if (t.order() < 3) {
    throw DimensionError("unfold_samples: tensor order " + std::to_string(t.order()) + " < 3");
  }
  const auto d = t.data();
  return Matrix(t.dims()[0], t.slice_size(), std::vector<double>(d.begin(), d.end()));
}

Matrix khatri_rao(std::span<const Matrix> ms) {
  require_same_cols(ms, "khatri_rao");
  const std::size_t r = ms.front().cols();
  Matrix acc = ms.front();
  for (std::size_t m = 1; m < ms.size(); ++m) {
    const Matrix& next = ms[m];
    Matrix out(acc.rows() * next.rows(), r);
    for (std::size_t p = 0; p < acc.rows(); ++p) {
      for (std::size_t q = 0; q < next.rows(); ++q) {
        auto dst = out.row(p * next.rows() + q);
        auto lhs = acc.row(p);
        auto rhs = next.row(q);
        for (std::size_t c = 0; c < r; ++c) dst[c] = lhs[c] * rhs[c];
      }
    }
    acc = std::move(out);
  }
  return acc;
}

DenseTensor kruskal_reconstruct(const KruskalModel& m) {
  m.validate();
  const Matrix kr = khatri_rao(m.factors);
  Matrix flat = matmul_nt(m.weights, kr);
  const auto d = flat.data();
  return DenseTensor(m.dims(), std::vector<double>(d.begin(), d.end()));
}

double reconstruction_error(const DenseTensor& t, const KruskalModel& m) {
  m.validate();
  if (t.dims() != m.dims()) {
    throw DimensionError("reconstruction_error: tensor dims " + dims_string(t.dims()) +
                         " vs model dims " + dims_string(m.dims()));
  }
  const Matrix kr = khatri_rao(m.factors);
  const std::size_t slice = t.slice_size();
  const std::size_t r = m.rank();
  double sum = 0.0;
  for (std::size_t n = 0; n < t.dims()[0]; ++n) {
    auto w = m.weights.row(n);
    auto x = t.sample(n);
    for (std::size_t p = 0; p < slice; ++p) {
      auto h = kr.row(p);
      double fit = 0.0;
      for (std::size_t c = 0; c < r; ++c) fit += w[c] * h[c];
      const double e = x[p] - fit;
      sum += e * e;
    }
  }
  return 0.5 * sum;
}

Matrix gram_hadamard(std::span<const Matrix> ms) {
  require_same_cols(ms, "gram_hadamard");
  const std::size_t r = ms.front().cols();
  Matrix acc(r, r, 1.0);
  for (const auto& m : ms) {
    const Matrix g = matmul_tn(m, m);
    for (std::size_t i = 0; i < r * r; ++i) acc.data()[i] *= g.data()[i];
  }
  return acc;
}

Matrix mttkrp(const DenseTensor& t, std::span<const Matrix> mats, std::size_t mode) {
  const std::size_t order = t.order();
  if (mats.size() != order) throw DimensionError("mttkrp: need one matrix per tensor mode");
  if (mode >= order) throw DimensionError("mttkrp: mode out of range");
  const std::size_t r = mats[mode == 0 ? 1 : 0].cols();
  for (std::size_t k = 0; k < order; ++k) {
    if (k == mode) continue;
    if (mats[k].cols() != r) throw DimensionError("mttkrp: column counts differ");
    if (mats[k].rows() != t.dims()[k]) {
      throw DimensionError("mttkrp: matrix for mode " + std::to_string(k) + " has " +
                           std::to_string(mats[k].rows()) + " rows, tensor extent is " +
                           std::to_string(t.dims()[k]));
    }
  }

  Matrix out(t.dims()[mode], r);
  // partial[level] holds the running Hadamard product of the factor rows of
  // modes [0, level), skipping `mode`.
  std::vector<std::vector<double>> partial(order + 1, std::vector<double>(r, 1.0));
  const auto data = t.data();
  const auto& dims = t.dims();

  std::function<void(std::size_t, std::size_t, std::size_t)> visit =
      [&](std::size_t level, std::size_t offset, std::size_t target) {
        const std::size_t extent = dims[level];
        const bool last = level + 1 == order;
        for (std::size_t i = 0; i < extent; ++i) {
          const std::size_t off = offset * extent + i;
          const std::size_t tgt = level == mode ? i : target;
          auto& cur = partial[level + 1];
          const auto& prev = partial[level];
          if (level == mode) {
            cur = prev;
          } else {
            auto row = mats[level].row(i);
            for (std::size_t c = 0; c < r; ++c) cur[c] = prev[c] * row[c];
          }
          if (last) {
            const double x = data[off];
            if (x == 0.0) continue;
            auto dst = out.row(tgt);
            for (std::size_t c = 0; c < r; ++c) dst[c] += x * cur[c];
          } else {
            visit(level + 1, off, tgt);
          }
        }
      };
  visit(0, 0, 0);
  return out;
}

// ---------------------------------------------------------------------------
// SPD solves

Cholesky::Cholesky(const Matrix& g, double shift) : n_(g.rows()), lower_(n_ * n_, 0.0) {
  if (g.rows() != g.cols()) throw DimensionError("Cholesky: matrix is not square");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::abs(g(i, i) + shift));
  double min_pivot = std::numeric_limits<double>::infinity();
  double max_pivot = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double d = g(j, j) + shift;
    for (std::size_t k = 0; k < j; ++k) d -= lower_[j * n_ + k] * lower_[j * n_ + k];
    if (!(d > 0.0) || !std::isfinite(d)) {
      std::ostringstream os;
      os << "Cholesky: matrix + " << shift << "*I is not positive definite (pivot " << j
         << " = " << d << ", largest diagonal " << max_diag;
      if (min_pivot < std::numeric_limits<double>::infinity())
        os << ", pivot ratio so far " << max_pivot / min_pivot;
      os << ")";
      throw NumericalError(os.str());
    }
    min_pivot = std::min(min_pivot, d);
    max_pivot = std::max(max_pivot, d);
    const double ljj = std::sqrt(d);
    lower_[j * n_ + j] = ljj;
    for (std::size_t i = j + 1; i < n_; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower_[i * n_ + k] * lower_[j * n_ + k];
      lower_[i * n_ + j] = s / ljj;
    }
  }
  pivot_ratio_ = n_ ? max_pivot / min_pivot : 1.0;
}

void Cholesky::solve_row(std::span<double> x) const {
  if (x.size() != n_) throw DimensionError("Cholesky::solve_row: length mismatch");
  // (G + sI) is symmetric, so x (G + sI) = b  <=>  L L^T x^T = b^T.
  for (std::size_t i = 0; i < n_; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * x[k];
    x[i] = s / lower_[i * n_ + i];
  }
  for (std::size_t i = n_; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < n_; ++k) s -= lower_[k * n_ + i] * x[k];
    x[i] = s / lower_[i * n_ + i];
  }
}

Matrix solve_ridge(const Matrix& g, const Matrix& rhs, double alpha) {
  if (alpha < 0.0) throw ConfigError("solve_ridge: alpha must be non-negative");
  if (g.rows() != g.cols() || rhs.cols() != g.rows()) {
    throw DimensionError("solve_ridge: expected G RxR and RHS mxR");
  }
  const Cholesky chol(g, alpha);
  Matrix x = rhs;
  for (std::size_t i = 0; i < x.rows(); ++i) chol.solve_row(x.row(i));
  return x;
}

NormalizedRows normalize_rows(const Matrix& m) {
  NormalizedRows out{m, std::vector<double>(m.rows(), 0.0)};
  std::size_t zero_rows = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = out.rows.row(i);
    const double n = norm2(row);
    if (n == 0.0) {
      ++zero_rows;
      continue;
    }
    // Rows already at unit norm (to rounding) are left bit-for-bit unchanged so
    // that normalization is idempotent.
    if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
      out.scales[i] = 1.0;
      continue;
    }
    const double s = 1.0 / n;
    for (auto& v : row) v *= s;
    out.scales[i] = s;
  }
  if (zero_rows) {
    warn("normalize_rows: " + std::to_string(zero_rows) +
         " zero row(s) left unnormalized with scale 0");
  }
  return out;
}

}  // namespace plc
