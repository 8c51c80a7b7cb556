#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "plc/error.hpp"
#include "plc/objective.hpp"

namespace plc {
namespace {

using testing::cosine;
using testing::naive_laplacian_sum;
using testing::random_matrix;

Matrix laplacian_of(const Labels& labels) { return signed_laplacian(build_signed_graph(labels)).laplacian; }

Matrix scale_rows(Matrix m, std::mt19937_64& rng, bool powers_of_two) {
  std::uniform_real_distribution<double> u(0.01, 100.0);
  std::uniform_int_distribution<int> e(-20, 20);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double s = powers_of_two ? std::ldexp(1.0, e(rng)) : u(rng);
    for (auto& v : m.row(i)) v *= s;
  }
  return m;
}

TEST(SameView, Examples) {
  const Matrix w = Matrix::from_rows({{1, 0}, {0, 1}});
  const Matrix l = laplacian_of({1, 2});
  EXPECT_EQ(l, Matrix::from_rows({{1, 1}, {1, 1}}));
  EXPECT_DOUBLE_EQ(same_view_laplacian(w, l), 2.0);
  EXPECT_EQ(same_view_laplacian(w, Matrix(2, 2)), 0.0);

  std::mt19937_64 rng(1);
  const Matrix r = random_matrix(9, 4, rng);
  const Matrix lr = laplacian_of(testing::random_labels(9, 3, rng));
  EXPECT_NEAR(same_view_laplacian(r, lr), naive_laplacian_sum(r, r, lr), 1e-12);
}

TEST(CrossView, Examples) {
  std::mt19937_64 rng(2);
  const Matrix w = random_matrix(7, 3, rng);
  const Matrix l = laplacian_of(testing::random_labels(7, 2, rng));
  EXPECT_EQ(cross_view_laplacian(w, w, l), same_view_laplacian(w, l));

  const Matrix e = Matrix::from_rows({{1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(cross_view_laplacian(e, e, laplacian_of({5, 5})), 2.0);

  const Matrix wt = random_matrix(7, 3, rng);
  EXPECT_NEAR(cross_view_laplacian(w, wt, l), naive_laplacian_sum(w, wt, l), 1e-12);
  EXPECT_THROW(cross_view_laplacian(w, random_matrix(6, 3, rng), l), DimensionError);
}

TEST(TransInv, ExamplesAndIdentityLaplacian) {
  std::mt19937_64 rng(3);
  const Matrix w = random_matrix(5, 3, rng);
  EXPECT_NEAR(trans_inv(w, w), 1.0, 1e-15);
  EXPECT_EQ(trans_inv(Matrix::from_rows({{1, 0}, {0, 2}}), Matrix::from_rows({{0, 3}, {-1, 0}})), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 20;
    const Matrix a = random_matrix(n, 1 + trial % 6, rng);
    const Matrix b = random_matrix(n, a.cols(), rng);
    const double t = trans_inv(a, b);
    EXPECT_NEAR(t, cross_view_laplacian(a, b, Matrix::identity(n)) / double(n), 1e-14);
    EXPECT_GE(t, -1.0);
    EXPECT_LE(t, 1.0);
  }
}

TEST(PlcLoss, ExamplesAndFoldIdentity) {
  std::mt19937_64 rng(4);
  const Matrix w = random_matrix(6, 3, rng);
  EXPECT_NEAR(plc_loss(w, w, laplacian_of(testing::random_labels(6, 3, rng)), 0.0), -1.0, 1e-15);

  const Matrix e = Matrix::from_rows({{1, 0}, {0, 1}});
  EXPECT_NEAR(plc_loss(e, e, laplacian_of({0, 0}), 0.2), -1.0 + 2.0 * 0.2, 1e-15);

  std::uniform_int_distribution<std::size_t> n_dist(1, 32), r_dist(1, 8);
  std::uniform_real_distribution<double> g_dist(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = n_dist(rng), r = r_dist(rng);
    const Matrix a = random_matrix(n, r, rng), b = random_matrix(n, r, rng);
    const auto lap = signed_laplacian(build_signed_graph(testing::random_labels(n, 3, rng)));
    const double gamma = g_dist(rng);
    const Matrix l_eff = effective_laplacian(lap, gamma, n).laplacian;
    EXPECT_NEAR(plc_loss(a, b, lap.laplacian, gamma), laplacian_trace(a, b, l_eff), 1e-12);
    EXPECT_NEAR(laplacian_trace(a, b, l_eff), naive_laplacian_sum(a, b, l_eff), 1e-12);
  }
}

TEST(CpLoss, Examples) {
  std::mt19937_64 rng(5);
  const auto m = testing::random_model(4, {3, 2, 2}, 2, rng);
  const Matrix wt = random_matrix(4, 2, rng);
  const auto x = kruskal_reconstruct(m);
  const auto xt = kruskal_reconstruct(KruskalModel{wt, m.factors});
  EXPECT_NEAR(cp_loss(x, xt, m, wt), 0.0, 1e-20);

  const auto noisy = testing::random_tensor({4, 3, 2, 2}, rng);
  EXPECT_EQ(cp_loss(noisy, noisy, m, m.weights), 2.0 * reconstruction_error(noisy, m));

  const auto noisy_t = testing::random_tensor({4, 3, 2, 2}, rng);
  const double oracle = testing::brute_half_sq_diff(noisy.data(), testing::brute_kruskal3(m)) +
                        testing::brute_half_sq_diff(noisy_t.data(),
                                                    testing::brute_kruskal3(KruskalModel{wt, m.factors}));
  EXPECT_NEAR(cp_loss(noisy, noisy_t, m, wt), oracle, 1e-10);
}

TEST(RegLoss, Examples) {
  KruskalModel zero{Matrix(3, 2), {Matrix(2, 2), Matrix(4, 2), Matrix(2, 2)}};
  EXPECT_EQ(reg_loss(zero, Matrix(3, 2)), 0.0);
  KruskalModel eye{Matrix::identity(2), {Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)}};
  EXPECT_EQ(reg_loss(eye, Matrix(2, 2)), 1.0);

  std::mt19937_64 rng(6);
  const auto m = testing::random_model(5, {3, 4, 2}, 3, rng);
  const Matrix wt = random_matrix(5, 3, rng);
  double s = 0.0;
  for (double v : m.weights.data()) s += v * v;
  for (double v : wt.data()) s += v * v;
  for (const auto& f : m.factors)
    for (double v : f.data()) s += v * v;
  EXPECT_NEAR(reg_loss(m, wt), 0.5 * s, 1e-12);
}

TEST(TotalLoss, ReductionsAndOracle) {
  std::mt19937_64 rng(7);
  const auto m = testing::random_model(6, {3, 2, 2}, 2, rng);
  const Matrix wt = random_matrix(6, 2, rng);
  const auto x = kruskal_reconstruct(m);
  const auto xt = kruskal_reconstruct(KruskalModel{wt, m.factors});
  const Matrix l = laplacian_of(testing::random_labels(6, 2, rng));
  EXPECT_NEAR(total_loss(x, xt, m, wt, l, 0.0, 0.0, 0.5).total, 0.0, 1e-20);

  const auto nx = testing::random_tensor({6, 3, 2, 2}, rng);
  const auto nxt = testing::random_tensor({6, 3, 2, 2}, rng);
  const auto r0 = total_loss(nx, nxt, m, wt, l, 0.3, 0.0, 0.5);
  EXPECT_EQ(r0.total, r0.cp + 0.3 * r0.reg);

  const double alpha = 0.03, beta = 2.0, gamma = 0.4;
  const auto r = total_loss(nx, nxt, m, wt, l, alpha, beta, gamma);
  const double cp = testing::brute_half_sq_diff(nx.data(), testing::brute_kruskal3(m)) +
                    testing::brute_half_sq_diff(nxt.data(), testing::brute_kruskal3(KruskalModel{wt, m.factors}));
  double reg = 0.0;
  for (const Matrix* p : {&m.weights, &wt, &m.factors[0], &m.factors[1], &m.factors[2]})
    for (double v : p->data()) reg += 0.5 * v * v;
  double ti = 0.0;
  for (std::size_t i = 0; i < 6; ++i) ti += cosine(m.weights.row(i), wt.row(i)) / 6.0;
  const double cv = naive_laplacian_sum(m.weights, wt, l);
  EXPECT_NEAR(r.total, cp + alpha * reg + beta * (-ti + gamma * cv), 1e-10);
  EXPECT_NEAR(r.total, r.cp + alpha * r.reg + beta * r.plc, 1e-12);
  EXPECT_NEAR(r.plc, -r.trans_inv + gamma * r.cross_view, 1e-12);
}

TEST(InfoNce, Examples) {
  std::mt19937_64 rng(8);
  const Matrix one = random_matrix(1, 4, rng);
  EXPECT_NEAR(infonce_loss(one, one, 0.5), 0.0, 1e-15);

  const Matrix w = random_matrix(4, 3, rng), wt = random_matrix(4, 3, rng);
  double naive = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < 4; ++j) z += std::exp(cosine(w.row(i), wt.row(j)));
    naive += -cosine(w.row(i), wt.row(i)) + std::log(z);
  }
  EXPECT_NEAR(infonce_loss(w, wt, 1.0), naive / 4.0, 1e-10);

  EXPECT_EQ(infonce_loss(scale_rows(w, rng, true), wt, 0.5), infonce_loss(w, wt, 0.5));
  EXPECT_THROW(infonce_loss(w, wt, 0.0), ConfigError);
  // Extreme temperature stays finite thanks to log-sum-exp.
  EXPECT_TRUE(std::isfinite(infonce_loss(w, wt, 1e-4)));
}

TEST(PlcExpanded, EqualsTraceForm) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> n_dist(1, 16);
  std::uniform_real_distribution<double> g_dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = n_dist(rng);
    const Matrix w = random_matrix(n, 3, rng), wt = random_matrix(n, 3, rng);
    const auto g = build_signed_graph(testing::random_labels(n, 3, rng));
    const double gamma = g_dist(rng);
    EXPECT_NEAR(plc_expanded(w, wt, g, gamma), plc_loss(w, wt, signed_laplacian(g).laplacian, gamma), 1e-12);
    EXPECT_NEAR(plc_expanded(w, wt, g, 0.0), -trans_inv(w, wt), 1e-15);
  }
}

TEST(PlcExpanded, EmptyGraph) {
  std::mt19937_64 rng(10);
  const Matrix w = random_matrix(5, 2, rng), wt = random_matrix(5, 2, rng);
  const SignedGraph empty(5, std::vector<std::int8_t>(25, 0));
  const double t = trans_inv(w, wt);
  EXPECT_NEAR(plc_expanded(w, wt, empty, 0.7), -t + 0.7 * 5.0 * t, 1e-14);
  EXPECT_NEAR(plc_expanded(w, wt, empty, 0.7), plc_loss(w, wt, signed_laplacian(empty).laplacian, 0.7), 1e-14);
}

TEST(BlockPairwise, Examples) {
  std::mt19937_64 rng(11);
  const Matrix w = random_matrix(4, 3, rng), wt = random_matrix(4, 3, rng);
  const auto none = block_pairwise_diagnostic(w, wt, SignedGraph(4, std::vector<std::int8_t>(16, 0)));
  ASSERT_EQ(none.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(none[i].block_term, 0.0);
    EXPECT_NEAR(none[i].pairwise_term, -cosine(w.row(i), wt.row(i)), 1e-15);
  }

  // Two same-class samples, orthonormal and identical views: the partner cosine is 0.
  const Matrix e = Matrix::from_rows({{1, 0}, {0, 1}});
  const auto two = block_pairwise_diagnostic(e, e, build_signed_graph(Labels{0, 0}));
  for (const auto& t : two) {
    EXPECT_EQ(t.block_term, 0.0);
    EXPECT_EQ(t.pairwise_term, -1.0);
  }
  const Matrix f = Matrix::from_rows({{1, 0}, {1, 1}});
  const auto skew = block_pairwise_diagnostic(f, f, build_signed_graph(Labels{0, 0}));
  EXPECT_NEAR(skew[0].block_term, -std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(skew[0].pairwise_term, -(1.0 - std::sqrt(0.5)), 1e-15);
  EXPECT_EQ(block_pairwise_diagnostic(random_matrix(9, 2, rng), random_matrix(9, 2, rng),
                                      build_signed_graph(testing::random_labels(9, 3, rng)))
                .size(),
            9u);
}

TEST(Properties, RowScaleInvariance) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 10;
    const Matrix w = random_matrix(n, 4, rng), wt = random_matrix(n, 4, rng);
    const Matrix sw = scale_rows(w, rng, false), swt = scale_rows(wt, rng, false);
    const auto g = build_signed_graph(testing::random_labels(n, 3, rng));
    const Matrix l = signed_laplacian(g).laplacian;
    EXPECT_NEAR(same_view_laplacian(sw, l), same_view_laplacian(w, l), 1e-12);
    EXPECT_NEAR(cross_view_laplacian(sw, swt, l), cross_view_laplacian(w, wt, l), 1e-12);
    EXPECT_NEAR(trans_inv(sw, swt), trans_inv(w, wt), 1e-12);
    EXPECT_NEAR(plc_loss(sw, swt, l, 0.3), plc_loss(w, wt, l, 0.3), 1e-12);
    EXPECT_NEAR(infonce_loss(sw, swt, 0.5), infonce_loss(w, wt, 0.5), 1e-12);
    EXPECT_NEAR(plc_expanded(sw, swt, g, 0.3), plc_expanded(w, wt, g, 0.3), 1e-12);
  }
}

TEST(Properties, SameClassSameViewCrossViewNonnegative) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const Matrix w = random_matrix(n, 3, rng);
    EXPECT_GE(cross_view_laplacian(w, w, laplacian_of(Labels(n, 0))), -1e-12);
  }
}

TEST(Hyperparams, DefaultsAndValidation) {
  Hyperparams hp;
  EXPECT_EQ(hp.rank, 32u);
  EXPECT_EQ(hp.alpha, 1e-2);
  EXPECT_EQ(hp.beta, 1.0);
  EXPECT_EQ(hp.resolved_gamma(50), 0.01);
  EXPECT_NO_THROW(hp.validate());
  hp.alpha = -1;
  EXPECT_THROW(hp.validate(), ConfigError);
  hp.alpha = 0;
  EXPECT_THROW(hp.validate(), ConfigError);  // beta > 0 needs alpha > 0
  hp.beta = 0;
  EXPECT_NO_THROW(hp.validate());
  hp.inner_tol = 0;
  EXPECT_THROW(hp.validate(), ConfigError);
}

}  // namespace
}  // namespace plc
