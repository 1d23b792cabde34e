#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace plap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Number of unordered node pairs, n(n-1)/2.
std::size_t num_pairs(std::size_t n);

// Column-major pair enumeration (2,1),(3,1),...,(n,1),(3,2),...,(n,n-1).
// Takes 1-based (i, j) with i > j and returns the 1-based index
//   k = i - j + (j-1)(2n-j)/2.
// Throws std::invalid_argument unless 1 <= j < i <= n.
std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);

// Inverse of pair_index: 1-based k -> 1-based (i, j), i > j.
std::pair<std::size_t, std::size_t> pair_nodes(std::size_t k, std::size_t n);

// Visit every pair in storage order: fn(k0, i0, j0) with 0-based indices,
// i0 > j0 and k0 = pair_index(i0+1, j0+1, n) - 1.
template <typename Fn>
void for_each_pair(std::size_t n, Fn&& fn) {
  std::size_t k = 0;
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) fn(k++, i, j);
}

// Non-negative edge weights over all node pairs, stored in pair_index order.
class WeightVector {
 public:
  WeightVector() = default;
  // Zero weights for n nodes.
  explicit WeightVector(std::size_t n);
  // Throws std::invalid_argument on length mismatch or a negative entry.
  WeightVector(std::size_t n, Vector values);

  std::size_t n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Vector& values() const { return values_; }

  double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }
  // Weight of the 0-based node pair {a, b}, a != b.
  double at(std::size_t a, std::size_t b) const;
  // Throws std::invalid_argument if w < 0.
  void set(std::size_t k, double w);

  // Pairs with strictly positive weight.
  std::size_t edge_count() const;

  bool operator==(const WeightVector& o) const {
    return n_ == o.n_ && values_ == o.values_;
  }

 private:
  std::size_t n_ = 0;
  Vector values_;
};

class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;
  explicit LaplacianMatrix(Matrix m) : m_(std::move(m)) {}
  std::size_t n() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  // Throws std::invalid_argument unless square, symmetric, non-negative with
  // zero diagonal.
  explicit AdjacencyMatrix(Matrix m);
  std::size_t n() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// The linear Laplacian operator on an arbitrary real pair vector (no sign
// requirement). Throws std::invalid_argument if w.size() != num_pairs(n).
Matrix laplacian_operator(std::size_t n, const Vector& w);

LaplacianMatrix laplacian_from_weights(const WeightVector& w);

// [L*Y]_k = Y_ii - Y_ij - Y_ji + Y_jj for the pair (i, j) of index k.
// Throws std::invalid_argument if Y is not square or n < 2.
Vector adjoint_of(const Matrix& y);

// L*(L w) without forming L w: entry k = deg_i + deg_j + 2 w_k.
Vector adjoint_laplacian(std::size_t n, const Vector& w);

AdjacencyMatrix adjacency_from_weights(const WeightVector& w);

struct CheckResult {
  bool passed = false;
  double violation = 0.0;  // measured magnitude; 0 when perfectly satisfied
};

struct LaplacianReport {
  CheckResult symmetry;       // max |M_ij - M_ji|
  CheckResult offdiag_sign;   // max positive off-diagonal entry
  CheckResult row_sums;       // max |row sum|
  CheckResult psd;            // max(0, -lambda_min)
  double min_eigenvalue = 0.0;

  bool all_passed() const {
    return symmetry.passed && offdiag_sign.passed && row_sums.passed && psd.passed;
  }
  std::string summary() const;
};

// Diagnostics for membership in the combinatorial Laplacian set. The PSD
// check estimates lambda_min by power iteration on (cI - M), c a Gershgorin
// bound, and compares against 1e-8. Throws only for a non-square matrix.
LaplacianReport validate_laplacian(const Matrix& m, double tol);

// Largest eigenvalue of a symmetric matrix by power iteration from a fixed
// start vector.
double largest_eigenvalue(const Matrix& m, int max_iters = 20000, double rel_tol = 1e-14);

// sum_k w_k |f_i - f_j|^p. Throws std::invalid_argument for p < 1 or a length
// mismatch.
double p_dirichlet_energy(const WeightVector& w, const Vector& f, double p);

}  // namespace plap
