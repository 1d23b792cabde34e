#pragma once

#include <cstdint>
#include <vector>

#include "plap/graph_core.hpp"

namespace plap {

enum class StepMode { lipschitz, fixed };

struct DenoiseConfig {
  double alpha = 1.0;     // fidelity weight
  double beta = 0.5;      // feature-smoothness weight
  double p = 2.0;         // exponent of the feature distance
  int max_iters = 200;
  StepMode step_mode = StepMode::lipschitz;
  double step = 1e-3;     // used only in fixed mode
  double tol = 1e-12;     // stop when relative objective decrease falls below
  bool restrict_to_support = false;  // pin pairs absent from the input at 0
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when out of range.
  void validate() const;
};

struct DenoiseResult {
  WeightVector weights;
  std::vector<double> objective_trace;  // trace[0] is the objective at the start point
  int iterations_run = 0;
  bool converged = false;
};

// Entry k holds ||x_i - x_j||_p^p for the pair (i, j) of index k.
// Throws std::invalid_argument for p < 1.
Vector pairwise_p_distances(const Matrix& x, double p);

// c = 2 alpha L*(phi_n) - beta d_p.
Vector linear_coefficient(const Matrix& phi_n, const Vector& d_p, double alpha, double beta);

// alpha ||L w - phi_n||_F^2 + beta d_p^T w.
double objective(const Vector& w, const Matrix& phi_n, const Vector& d_p, double alpha, double beta);

// Gradient of objective() at w given c from linear_coefficient():
// 2 alpha L*(L w) - c. phi_n is used only for its shape.
Vector gradient(const Vector& w, const Matrix& phi_n, const Vector& c, double alpha);

// Start point: w0_k = max(0, -phi_n(i, j)).
Vector initial_weights(const Matrix& phi_n);

// Projected gradient / MM iteration w <- max(0, w - step * grad f(w)) with
// step 1/(4 alpha n) in lipschitz mode. phi_n need not be a valid Laplacian
// but must be symmetric. Throws std::invalid_argument on bad input and
// std::runtime_error (naming the iteration) on non-finite values.
DenoiseResult denoise(const Matrix& phi_n, const Matrix& x, const DenoiseConfig& config);

// Same, with d_p already computed (reused across beta sweeps).
DenoiseResult denoise_with_distances(const Matrix& phi_n, const Vector& d_p, const DenoiseConfig& config);

}  // namespace plap
