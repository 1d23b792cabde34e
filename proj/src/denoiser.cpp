#include "plap/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace plap {

void DenoiseConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("DenoiseConfig: alpha must be > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("DenoiseConfig: beta must be >= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("DenoiseConfig: p must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("DenoiseConfig: max_iters must be >= 1");
  if (step_mode == StepMode::fixed && !(step > 0.0))
    throw std::invalid_argument("DenoiseConfig: fixed step must be > 0");
  if (!(tol >= 0.0)) throw std::invalid_argument("DenoiseConfig: tol must be >= 0");
}

Vector pairwise_p_distances(const Matrix& x, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("pairwise_p_distances: p must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  Vector out(static_cast<Eigen::Index>(num_pairs(n)));
  // Row-major copy keeps each feature row contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = x;
  const Eigen::Index d = x.cols();
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    const double* a = rows.data() + static_cast<Eigen::Index>(i) * d;
    const double* b = rows.data() + static_cast<Eigen::Index>(j) * d;
    double s = 0.0;
    if (p == 2.0) {
      for (Eigen::Index m = 0; m < d; ++m) s += (a[m] - b[m]) * (a[m] - b[m]);
    } else if (p == 1.0) {
      for (Eigen::Index m = 0; m < d; ++m) s += std::abs(a[m] - b[m]);
    } else {
      for (Eigen::Index m = 0; m < d; ++m) {
        const double diff = std::abs(a[m] - b[m]);
        if (diff != 0.0) s += std::pow(diff, p);
      }
    }
    out[static_cast<Eigen::Index>(k)] = s;
  });
  return out;
}

namespace {

std::size_t checked_order(const Matrix& phi_n, const Vector& v, const char* who) {
  if (phi_n.rows() != phi_n.cols()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
  const auto n = static_cast<std::size_t>(phi_n.rows());
  if (static_cast<std::size_t>(v.size()) != num_pairs(n))
    throw std::invalid_argument(std::string(who) + ": vector length does not match n(n-1)/2");
  return n;
}

}  // namespace

Vector linear_coefficient(const Matrix& phi_n, const Vector& d_p, double alpha, double beta) {
  checked_order(phi_n, d_p, "linear_coefficient");
  return 2.0 * alpha * adjoint_of(phi_n) - beta * d_p;
}

double objective(const Vector& w, const Matrix& phi_n, const Vector& d_p, double alpha, double beta) {
  const std::size_t n = checked_order(phi_n, w, "objective");
  if (d_p.size() != w.size()) throw std::invalid_argument("objective: distance vector length mismatch");
  return alpha * (laplacian_operator(n, w) - phi_n).squaredNorm() + beta * d_p.dot(w);
}

Vector gradient(const Vector& w, const Matrix& phi_n, const Vector& c, double alpha) {
  const std::size_t n = checked_order(phi_n, w, "gradient");
  if (c.size() != w.size()) throw std::invalid_argument("gradient: coefficient vector length mismatch");
  return 2.0 * alpha * adjoint_laplacian(n, w) - c;
}

Vector initial_weights(const Matrix& phi_n) {
  if (phi_n.rows() != phi_n.cols()) throw std::invalid_argument("initial_weights: matrix is not square");
  const auto n = static_cast<std::size_t>(phi_n.rows());
  Vector w(static_cast<Eigen::Index>(num_pairs(n)));
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    w[static_cast<Eigen::Index>(k)] =
        std::max(0.0, -phi_n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  });
  return w;
}

DenoiseResult denoise(const Matrix& phi_n, const Matrix& x, const DenoiseConfig& config) {
  config.validate();
  if (x.rows() != phi_n.rows()) throw std::invalid_argument("denoise: feature rows do not match graph order");
  return denoise_with_distances(phi_n, pairwise_p_distances(x, config.p), config);
}

DenoiseResult denoise_with_distances(const Matrix& phi_n, const Vector& d_p, const DenoiseConfig& config) {
  config.validate();
  const std::size_t n = checked_order(phi_n, d_p, "denoise");
  if (n < 2) throw std::invalid_argument("denoise: need at least 2 nodes");
  if (!phi_n.allFinite()) throw std::invalid_argument("denoise: input has non-finite entries");
  const double scale = 1.0 + phi_n.cwiseAbs().maxCoeff();
  if ((phi_n - phi_n.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("denoise: input matrix is not symmetric");

  Vector w = initial_weights(phi_n);
  Vector support;
  if (config.restrict_to_support) support = (w.array() > 0.0).cast<double>();

  const Vector c = linear_coefficient(phi_n, d_p, config.alpha, config.beta);
  const double step = config.step_mode == StepMode::lipschitz
                          ? 1.0 / (4.0 * config.alpha * static_cast<double>(n))
                          : config.step;

  DenoiseResult result;
  double f = objective(w, phi_n, d_p, config.alpha, config.beta);
  result.objective_trace.push_back(f);

  for (int t = 1; t <= config.max_iters; ++t) {
    Vector next = (w - step * gradient(w, phi_n, c, config.alpha)).cwiseMax(0.0);
    if (config.restrict_to_support) next.array() *= support.array();
    const double f_next = objective(next, phi_n, d_p, config.alpha, config.beta);
    if (!next.allFinite() || !std::isfinite(f_next))
      throw std::runtime_error("denoise: non-finite value at iteration " + std::to_string(t));

    w = std::move(next);
    result.objective_trace.push_back(f_next);
    result.iterations_run = t;
    const double decrease = f - f_next;
    f = f_next;
    if (decrease >= 0.0 && decrease <= config.tol * std::abs(f + decrease)) {
      result.converged = true;
      break;
    }
  }
  result.weights = WeightVector(n, std::move(w));
  return result;
}

}  // namespace plap
