#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plap/datasets.hpp"
#include "plap/graph_core.hpp"

namespace plap {

struct GcnParams {
  Matrix w1;  // d x hidden
  Matrix w2;  // hidden x classes
};

struct TrainConfig {
  int hidden = 16;
  int epochs = 250;
  double learning_rate = 1e-2;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> loss_trace;          // training objective per epoch
  std::vector<double> val_accuracy_trace;  // validation accuracy per epoch
  int best_val_epoch = 0;                  // 0-based; earliest among ties
  double test_accuracy = 0.0;
};

// D^{-1/2} (W + I) D^{-1/2} with D the degree matrix of W + I.
Matrix normalize_adjacency(const AdjacencyMatrix& w);

// Glorot-uniform initialisation, one layer after the other, row-major draws.
GcnParams init_params(std::size_t feature_dim, int hidden, int num_classes, std::uint64_t seed);

// a_hat * relu(a_hat * x * w1) * w2. Throws std::invalid_argument on shape
// mismatch and std::runtime_error on a non-finite result.
Matrix forward(const GcnParams& params, const Matrix& a_hat, const Matrix& x);

// Row-wise softmax with max-subtraction.
Matrix softmax_rows(const Matrix& logits);

// Mean over `mask` of -log softmax(logits_i)[labels_i]. Throws
// std::invalid_argument for an empty mask.
double cross_entropy(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> mask);

// Fraction of masked nodes whose argmax (lowest index on ties) equals the label.
double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> mask);

// Training objective and its exact gradient:
//   cross_entropy(train) + weight_decay/2 * (||w1||^2 + ||w2||^2).
struct LossAndGradient {
  double loss = 0.0;
  GcnParams grad;
  Matrix logits;
};
LossAndGradient loss_and_gradient(const GcnParams& params, const Matrix& a_hat, const Matrix& x,
                                  std::span<const int> labels, std::span<const std::size_t> mask,
                                  double weight_decay);

struct TrainOutcome {
  GcnParams params;  // parameters of the best-validation epoch
  TrainReport report;
};

// Full-batch gradient descent. Throws std::runtime_error naming the epoch if
// the loss becomes non-finite.
TrainOutcome train(const Dataset& dataset, const Matrix& a_hat, const Split& split, const TrainConfig& config);

}  // namespace plap
