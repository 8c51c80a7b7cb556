#include "plc/evaluation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "plc/error.hpp"
#include "plc/log.hpp"
#include "plc/random.hpp"

namespace plc {
namespace {

std::size_t class_count(std::span<const int> labels) {
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw InputError("logistic: labels must be non-negative");
    max_label = std::max(max_label, l);
  }
  return std::size_t(max_label + 1);
}

// Softmax probabilities for one normalized feature row.
void softmax_row(const LogisticModel& m, std::span<const double> x, std::vector<double>& p) {
  const std::size_t c = m.weights.rows();
  p.resize(c);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c; ++k) {
    p[k] = dot(m.weights.row(k), x) + m.bias[k];
    peak = std::max(peak, p[k]);
  }
  double z = 0.0;
  for (auto& v : p) z += (v = std::exp(v - peak));
  for (auto& v : p) v /= z;
}

double normalized_loss(const LogisticModel& m, const Matrix& x, std::span<const int> labels, double l2) {
  std::vector<double> p;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    softmax_row(m, x.row(i), p);
    loss -= std::log(std::max(p[std::size_t(labels[i])], std::numeric_limits<double>::min()));
  }
  return loss / double(x.rows()) + l2 * m.weights.squared_norm();
}

LogisticModel normalized_gradient(const LogisticModel& m, const Matrix& x, std::span<const int> labels,
                                  double l2) {
  const std::size_t c = m.weights.rows();
  LogisticModel g{Matrix(c, m.weights.cols()), std::vector<double>(c, 0.0)};
  std::vector<double> p;
  const double inv_n = 1.0 / double(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    softmax_row(m, x.row(i), p);
    p[std::size_t(labels[i])] -= 1.0;
    auto xi = x.row(i);
    for (std::size_t k = 0; k < c; ++k) {
      auto gk = g.weights.row(k);
      for (std::size_t j = 0; j < xi.size(); ++j) gk[j] += inv_n * p[k] * xi[j];
      g.bias[k] += inv_n * p[k];
    }
  }
  for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights.data()[i] += 2.0 * l2 * m.weights.data()[i];
  return g;
}

}  // namespace

void SplitSpec::validate() const {
  for (double f : {unlabeled, train, test}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split: fractions must lie in [0, 1]");
  }
  if (std::abs(unlabeled + train + test - 1.0) > 1e-12) throw ConfigError("split: fractions must sum to 1");
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(spec.seed, Stream::kSplit);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = std::min(n, std::size_t(std::llround(spec.train * double(n))));
  const auto n_test = std::min(n - n_train, std::size_t(std::llround(spec.test * double(n))));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + std::ptrdiff_t(n_train));
  out.test.assign(order.begin() + std::ptrdiff_t(n_train), order.begin() + std::ptrdiff_t(n_train + n_test));
  out.unlabeled.assign(order.begin() + std::ptrdiff_t(n_train + n_test), order.end());
  return out;
}

double logistic_loss(const LogisticModel& m, const Matrix& features, std::span<const int> labels,
                     double l2) {
  if (labels.size() != features.rows()) throw DimensionError("logistic_loss: label count mismatch");
  return normalized_loss(m, normalize_rows(features).rows, labels, l2);
}

LogisticModel logistic_gradient(const LogisticModel& m, const Matrix& features,
                                std::span<const int> labels, double l2) {
  if (labels.size() != features.rows()) throw DimensionError("logistic_gradient: label count mismatch");
  return normalized_gradient(m, normalize_rows(features).rows, labels, l2);
}

LogisticModel train_logistic(const Matrix& features, std::span<const int> labels,
                             const LogisticOptions& opts, std::vector<double>* loss_history) {
  if (labels.size() != features.rows()) throw DimensionError("train_logistic: label count mismatch");
  const std::size_t c = class_count(labels);
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw InputError("train_logistic: need at least two distinct classes");
  }
  const Matrix x = normalize_rows(features).rows;
  auto rng = make_rng(opts.seed, Stream::kClassifier);
  std::normal_distribution<double> normal(0.0, 1e-6);
  LogisticModel m{Matrix(c, features.cols()), std::vector<double>(c, 0.0)};
  for (auto& v : m.weights.data()) v = normal(rng);

  for (std::size_t e = 0; e < opts.epochs; ++e) {
    if (loss_history) loss_history->push_back(normalized_loss(m, x, labels, opts.l2));
    const auto g = normalized_gradient(m, x, labels, opts.l2);
    for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights.data()[i] -= opts.lr * g.weights.data()[i];
    for (std::size_t k = 0; k < c; ++k) m.bias[k] -= opts.lr * g.bias[k];
  }
  if (loss_history) loss_history->push_back(normalized_loss(m, x, labels, opts.l2));
  return m;
}

Labels predict(const LogisticModel& m, const Matrix& features) {
  const Matrix x = normalize_rows(features).rows;
  Labels out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.weights.rows(); ++k) {
      const double s = dot(m.weights.row(k), x.row(i)) + m.bias[k];
      if (s > best) {
        best = s;
        out[i] = int(k);
      }
    }
  }
  return out;
}

double accuracy(const LogisticModel& m, const Matrix& features, std::span<const int> labels) {
  if (labels.size() != features.rows()) throw DimensionError("accuracy: label count mismatch");
  if (labels.empty()) return 0.0;
  const auto pred = predict(m, features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return double(hits) / double(labels.size());
}

double clustering_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DimensionError("clustering_accuracy: length mismatch");
  if (predicted.empty()) return 0.0;
  std::map<int, std::size_t> pid, tid;
  for (int l : predicted) pid.try_emplace(l, pid.size());
  for (int l : truth) tid.try_emplace(l, tid.size());
  const std::size_t k = std::max(pid.size(), tid.size());
  if (k > 8) throw InputError("clustering_accuracy: more than 8 distinct ids is unsupported");

  std::vector<std::size_t> counts(k * k, 0);  // [pred][true]
  for (std::size_t i = 0; i < predicted.size(); ++i) ++counts[pid[predicted[i]] * k + tid[truth[i]]];
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t p = 0; p < k; ++p) hits += counts[p * k + perm[p]];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return double(best) / double(predicted.size());
}

double graph_agreement(const SignedGraph& a, const SignedGraph& b) {
  if (a.size() != b.size()) throw DimensionError("graph_agreement: graph sizes differ");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && a(i, j) == b(i, j)) ++same;
  return double(same) / double(n * (n - 1));
}

Matrix pca2d(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n < 2) throw InputError("pca2d: need at least two rows");
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(Eigen::Index(i), Eigen::Index(j)) = features(i, j);
  x.rowwise() -= x.colwise().mean();

  Matrix out(n, 2);
  if (x.norm() == 0.0) {
    warn("pca2d: input has rank 0; projection is all zeros");
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.transpose() * x);
  const auto& vecs = eig.eigenvectors();  // ascending eigenvalues
  for (std::size_t comp = 0; comp < std::min<std::size_t>(2, d); ++comp) {
    Eigen::VectorXd dir = vecs.col(Eigen::Index(d - 1 - comp));
    Eigen::Index arg = 0;
    dir.cwiseAbs().maxCoeff(&arg);
    if (dir(arg) < 0.0) dir = -dir;
    const Eigen::VectorXd proj = x * dir;
    for (std::size_t i = 0; i < n; ++i) out(i, comp) = proj(Eigen::Index(i));
  }
  return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy(m.row(idx[i]).begin(), m.row(idx[i]).end(), out.row(i).begin());
  return out;
}

Labels select_labels(std::span<const int> labels, std::span<const std::size_t> idx) {
  Labels out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

DownstreamResult downstream_accuracy(const Matrix& features, std::span<const int> labels,
                                     const SplitIndices& split, const LogisticOptions& opts) {
  if (labels.size() != features.rows()) throw DimensionError("downstream_accuracy: label count mismatch");
  const Matrix xtr = select_rows(features, split.train);
  const Labels ytr = select_labels(labels, split.train);
  const Matrix xte = select_rows(features, split.test);
  const Labels yte = select_labels(labels, split.test);
  const auto model = train_logistic(xtr, ytr, opts);
  return {accuracy(model, xtr, ytr), accuracy(model, xte, yte), xtr.rows(), xte.rows()};
}

}  // namespace plc
