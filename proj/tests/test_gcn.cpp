#include <numeric>

#include "doctest.h"
#include "plap/gcn.hpp"
#include "oracles.hpp"

using namespace plap;
using plap::testing::random_matrix;
using plap::testing::random_weights;

namespace {

// Plain triple-loop product, independent of Eigen's kernels.
Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

Matrix naive_forward(const GcnParams& p, const Matrix& a, const Matrix& x) {
  Matrix h = naive_product(naive_product(a, x), p.w1);
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = h(i, j) > 0 ? h(i, j) : 0.0;
  return naive_product(naive_product(a, h), p.w2);
}

std::vector<std::size_t> all_nodes(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

Dataset separable(std::uint64_t seed) {
  SbmParams sp;
  sp.nodes_per_block = 50;
  sp.blocks = 2;
  sp.p_in = 0.2;
  sp.p_out = 0.01;
  sp.feature_dim = 8;
  sp.feature_signal = 4.0;
  sp.feature_noise = 0.2;
  return generate_sbm(sp, seed);
}

}  // namespace

TEST_CASE("normalize_adjacency") {
  Matrix two(2, 2);
  two << 0, 1, 1, 0;
  const Matrix a = normalize_adjacency(AdjacencyMatrix(two));
  CHECK(a.isApprox(Matrix::Constant(2, 2, 0.5)));
  CHECK(normalize_adjacency(AdjacencyMatrix(Matrix::Zero(2, 2))) == Matrix::Identity(2, 2));

  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(15);
    const Matrix ah = normalize_adjacency(adjacency_from_weights(random_weights(rng, n, 0.4)));
    CHECK(largest_eigenvalue(ah) <= 1.0 + 1e-9);
    CHECK((ah - ah.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ah.minCoeff() >= 0.0);
  }
}

TEST_CASE("forward pass") {
  Rng rng(2);
  const Matrix a_hat = normalize_adjacency(adjacency_from_weights(random_weights(rng, 6, 0.5)));
  const Matrix x = random_matrix(rng, 6, 4, -1, 1);
  GcnParams p = init_params(4, 3, 2, 5);
  CHECK((forward(p, a_hat, x) - naive_forward(p, a_hat, x)).cwiseAbs().maxCoeff() <= 1e-10);

  GcnParams dead = p;
  dead.w1.setZero();
  CHECK(forward(dead, a_hat, x).isZero(0.0));

  // One node, no propagation: relu(x W1) W2.
  const Matrix one = random_matrix(rng, 1, 4, -1, 1);
  const Matrix mlp = (one * p.w1).cwiseMax(0.0) * p.w2;
  CHECK(forward(p, Matrix::Identity(1, 1), one).isApprox(mlp));

  CHECK_THROWS_AS(forward(p, a_hat, random_matrix(rng, 6, 5, 0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(forward(p, Matrix::Identity(5, 5), x), std::invalid_argument);
  GcnParams inf = p;
  inf.w2(0, 0) = std::numeric_limits<double>::infinity();
  inf.w1.setConstant(1.0);
  CHECK_THROWS_AS(forward(inf, a_hat, Matrix::Constant(6, 4, 1.0)), std::runtime_error);
}

TEST_CASE("cross_entropy and softmax") {
  const std::vector<int> labels{0, 1, 2, 3};
  const auto mask = all_nodes(4);
  CHECK(cross_entropy(Matrix::Zero(4, 4), labels, mask) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  Matrix sharp = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) sharp(i, i) = 50.0;
  CHECK(cross_entropy(sharp, labels, mask) < 1e-9);

  Rng rng(3);
  const Matrix logits = random_matrix(rng, 4, 4, -5, 5);
  Matrix shifted = logits;
  for (Eigen::Index r = 0; r < 4; ++r) shifted.row(r).array() += rng.uniform(-100, 100);
  CHECK(std::abs(cross_entropy(logits, labels, mask) - cross_entropy(shifted, labels, mask)) <= 1e-12);

  const Matrix sm = softmax_rows(random_matrix(rng, 20, 7, -30, 30));
  for (Eigen::Index r = 0; r < sm.rows(); ++r) CHECK(std::abs(sm.row(r).sum() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(cross_entropy(logits, labels, std::vector<std::size_t>{}), std::invalid_argument);
}

TEST_CASE("accuracy") {
  const std::vector<int> labels{0, 2, 1, 1};
  const auto mask = all_nodes(4);
  Matrix onehot = Matrix::Zero(4, 3), wrong = Matrix::Zero(4, 3);
  for (int i = 0; i < 4; ++i) {
    onehot(i, labels[i]) = 1.0;
    wrong(i, (labels[i] + 1) % 3) = 1.0;
  }
  CHECK(accuracy(onehot, labels, mask) == 1.0);
  CHECK(accuracy(wrong, labels, mask) == 0.0);
  CHECK(accuracy(Matrix::Zero(4, 3), std::vector<int>{0, 0, 0, 0}, mask) == 1.0);
  CHECK(accuracy(onehot, labels, std::vector<std::size_t>{0, 1}) == 1.0);
  CHECK_THROWS_AS(accuracy(onehot, labels, std::vector<std::size_t>{}), std::invalid_argument);
}

TEST_CASE("analytic gradient matches finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(plap::testing::gcn_fd_error(seed) <= 1e-4);
}

TEST_CASE("training") {
  const Dataset ds = separable(3);
  const Split split = split_nodes(ds.n(), {0.8, 0.1, 0.1}, 9);
  const Matrix a_hat = normalize_adjacency(adjacency_from_weights(ds.graph));
  TrainConfig cfg;
  cfg.seed = 4;
  const TrainOutcome out = train(ds, a_hat, split, cfg);
  CHECK(out.report.test_accuracy > 0.9);
  CHECK(out.report.loss_trace.size() == 250);
  CHECK(out.report.val_accuracy_trace.size() == 250);
  CHECK(out.report.loss_trace.back() < out.report.loss_trace.front());
  // Best epoch is the earliest maximum.
  const auto& val = out.report.val_accuracy_trace;
  const auto best = std::max_element(val.begin(), val.end()) - val.begin();
  CHECK(out.report.best_val_epoch == best);

  const TrainOutcome again = train(ds, a_hat, split, cfg);
  CHECK(again.report.loss_trace == out.report.loss_trace);
  CHECK(again.report.val_accuracy_trace == out.report.val_accuracy_trace);
  CHECK(again.params.w1 == out.params.w1);

  TrainConfig frozen = cfg;
  frozen.learning_rate = 0.0;
  frozen.epochs = 20;
  const TrainOutcome still = train(ds, a_hat, split, frozen);
  const GcnParams init = init_params(ds.feature_dim(), cfg.hidden, ds.num_classes, cfg.seed);
  CHECK(still.params.w1 == init.w1);
  CHECK(still.params.w2 == init.w2);
  for (double l : still.report.loss_trace) CHECK(l == still.report.loss_trace.front());
}

TEST_CASE("training errors") {
  const Dataset ds = separable(5);
  const Split split = split_nodes(ds.n(), {0.8, 0.1, 0.1}, 1);
  const Matrix a_hat = normalize_adjacency(adjacency_from_weights(ds.graph));
  TrainConfig cfg;
  cfg.learning_rate = 1e200;
  cfg.epochs = 50;
  try {
    train(ds, a_hat, split, cfg);
    FAIL("expected divergence");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
  Split empty = split;
  empty.train.clear();
  CHECK_THROWS_AS(train(ds, a_hat, empty, TrainConfig{}), std::invalid_argument);
  TrainConfig zero;
  zero.epochs = 0;
  CHECK_THROWS_AS(train(ds, a_hat, split, zero), std::invalid_argument);
}
