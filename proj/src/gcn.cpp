#include "plap/gcn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "plap/rng.hpp"

namespace plap {

void TrainConfig::validate() const {
  if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden must be >= 1");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
}

Matrix normalize_adjacency(const AdjacencyMatrix& w) {
  const Eigen::Index n = static_cast<Eigen::Index>(w.n());
  Matrix a = w.matrix() + Matrix::Identity(n, n);
  const Vector inv_sqrt = a.rowwise().sum().cwiseSqrt().cwiseInverse();
  // s_i * s_j commutes exactly, so the result is bitwise symmetric.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  return a;
}

GcnParams init_params(std::size_t feature_dim, int hidden, int num_classes, std::uint64_t seed) {
  Rng rng(seed);
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-limit, limit);
    return m;
  };
  GcnParams p;
  p.w1 = glorot(static_cast<Eigen::Index>(feature_dim), hidden);
  p.w2 = glorot(hidden, num_classes);
  return p;
}

namespace {

void check_shapes(const GcnParams& params, const Matrix& a_hat, const Matrix& x) {
  if (a_hat.rows() != a_hat.cols() || a_hat.rows() != x.rows())
    throw std::invalid_argument("gcn: propagation matrix does not match node count");
  if (params.w1.rows() != x.cols()) throw std::invalid_argument("gcn: W1 rows do not match feature dim");
  if (params.w2.rows() != params.w1.cols()) throw std::invalid_argument("gcn: W2 rows do not match hidden width");
}

void check_mask(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> mask,
                const char* who) {
  if (mask.empty()) throw std::invalid_argument(std::string(who) + ": empty mask");
  if (labels.size() != static_cast<std::size_t>(logits.rows()))
    throw std::invalid_argument(std::string(who) + ": label count does not match logits");
  for (std::size_t v : mask) {
    if (v >= labels.size()) throw std::invalid_argument(std::string(who) + ": mask node out of range");
    if (labels[v] < 0 || labels[v] >= logits.cols())
      throw std::invalid_argument(std::string(who) + ": label out of range");
  }
}

// Forward and backward with a_hat * x precomputed.
LossAndGradient loss_and_gradient_ax(const GcnParams& params, const Matrix& a_hat, const Matrix& ax,
                                     std::span<const int> labels, std::span<const std::size_t> mask,
                                     double weight_decay) {
  const Matrix pre = ax * params.w1;
  const Matrix hidden = pre.cwiseMax(0.0);
  const Matrix ah = a_hat * hidden;
  LossAndGradient out;
  out.logits = ah * params.w2;
  check_mask(out.logits, labels, mask, "loss_and_gradient");

  // dL/dlogits is (softmax - onehot)/|mask| on masked rows, zero elsewhere.
  Matrix g = Matrix::Zero(out.logits.rows(), out.logits.cols());
  const double inv = 1.0 / static_cast<double>(mask.size());
  double ce = 0.0;
  for (std::size_t v : mask) {
    const auto r = static_cast<Eigen::Index>(v);
    const double mx = out.logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (out.logits.row(r).array() - mx).exp().matrix();
    const double z = e.sum();
    ce += std::log(z) + mx - out.logits(r, labels[v]);
    g.row(r) = e / z * inv;
    g(r, labels[v]) -= inv;
  }
  ce *= inv;
  out.loss = ce + 0.5 * weight_decay * (params.w1.squaredNorm() + params.w2.squaredNorm());

  out.grad.w2 = ah.transpose() * g + weight_decay * params.w2;
  // a_hat is symmetric.
  const Matrix d_hidden = a_hat * (g * params.w2.transpose());
  const Matrix d_pre = (pre.array() > 0.0).select(d_hidden, 0.0);
  out.grad.w1 = ax.transpose() * d_pre + weight_decay * params.w1;
  return out;
}

}  // namespace

Matrix forward(const GcnParams& params, const Matrix& a_hat, const Matrix& x) {
  check_shapes(params, a_hat, x);
  Matrix logits = a_hat * (a_hat * x * params.w1).cwiseMax(0.0) * params.w2;
  if (!logits.allFinite()) throw std::runtime_error("forward: non-finite logits");
  return logits;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Eigen::RowVectorXd e = (logits.row(r).array() - logits.row(r).maxCoeff()).exp().matrix();
    out.row(r) = e / e.sum();
  }
  return out;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> mask) {
  check_mask(logits, labels, mask, "cross_entropy");
  double total = 0.0;
  for (std::size_t v : mask) {
    const auto r = static_cast<Eigen::Index>(v);
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    total += lse - logits(r, labels[v]);
  }
  return total / static_cast<double>(mask.size());
}

double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> mask) {
  check_mask(logits, labels, mask, "accuracy");
  std::size_t hits = 0;
  for (std::size_t v : mask) {
    Eigen::Index best = 0;
    const auto row = logits.row(static_cast<Eigen::Index>(v));
    for (Eigen::Index c = 1; c < row.size(); ++c)
      if (row[c] > row[best]) best = c;
    if (best == labels[v]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(mask.size());
}

LossAndGradient loss_and_gradient(const GcnParams& params, const Matrix& a_hat, const Matrix& x,
                                  std::span<const int> labels, std::span<const std::size_t> mask,
                                  double weight_decay) {
  check_shapes(params, a_hat, x);
  return loss_and_gradient_ax(params, a_hat, a_hat * x, labels, mask, weight_decay);
}

TrainOutcome train(const Dataset& ds, const Matrix& a_hat, const Split& split, const TrainConfig& config) {
  config.validate();
  if (split.train.empty()) throw std::invalid_argument("train: empty training set");
  if (split.test.empty()) throw std::invalid_argument("train: empty test set");

  GcnParams params = init_params(ds.feature_dim(), config.hidden, ds.num_classes, config.seed);
  check_shapes(params, a_hat, ds.features);
  const Matrix ax = a_hat * ds.features;

  TrainOutcome out;
  GcnParams best = params;
  double best_val = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    LossAndGradient lg = loss_and_gradient_ax(params, a_hat, ax, ds.labels, split.train, config.weight_decay);
    if (!std::isfinite(lg.loss)) throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    out.report.loss_trace.push_back(lg.loss);
    if (!split.val.empty()) {
      const double val = accuracy(lg.logits, ds.labels, split.val);
      out.report.val_accuracy_trace.push_back(val);
      if (val > best_val) {
        best_val = val;
        best = params;
        out.report.best_val_epoch = epoch;
      }
    }
    params.w1 -= config.learning_rate * lg.grad.w1;
    params.w2 -= config.learning_rate * lg.grad.w2;
  }
  if (split.val.empty()) {
    best = params;
    out.report.best_val_epoch = config.epochs - 1;
  }

  out.report.test_accuracy = accuracy(forward(best, a_hat, ds.features), ds.labels, split.test);
  out.params = std::move(best);
  return out;
}

}  // namespace plap
