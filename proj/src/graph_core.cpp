#include "plap/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "plap/rng.hpp"

namespace plap {

std::size_t num_pairs(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  if (j < 1 || i <= j || i > n) {
    std::ostringstream os;
    os << "pair_index: need 1 <= j < i <= n, got i=" << i << " j=" << j << " n=" << n;
    throw std::invalid_argument(os.str());
  }
  // (j-1)(2n-j) is always even.
  return i - j + (j - 1) * (2 * n - j) / 2;
}

std::pair<std::size_t, std::size_t> pair_nodes(std::size_t k, std::size_t n) {
  if (k < 1 || k > num_pairs(n))
    throw std::invalid_argument("pair_nodes: index out of range");
  // Column j holds n - j pairs.
  std::size_t j = 1;
  std::size_t offset = 0;
  while (offset + (n - j) < k) {
    offset += n - j;
    ++j;
  }
  return {j + (k - offset), j};
}

WeightVector::WeightVector(std::size_t n)
    : n_(n), values_(Vector::Zero(static_cast<Eigen::Index>(num_pairs(n)))) {}

WeightVector::WeightVector(std::size_t n, Vector values) : n_(n), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != num_pairs(n))
    throw std::invalid_argument("WeightVector: length " + std::to_string(values_.size()) +
                                " does not match n(n-1)/2 = " + std::to_string(num_pairs(n)));
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0))
      throw std::invalid_argument("WeightVector: entry " + std::to_string(k) +
                                  " is negative or NaN");
  }
}

double WeightVector::at(std::size_t a, std::size_t b) const {
  if (a == b) return 0.0;
  if (a < b) std::swap(a, b);
  return (*this)[pair_index(a + 1, b + 1, n_) - 1];
}

void WeightVector::set(std::size_t k, double w) {
  if (!(w >= 0.0)) throw std::invalid_argument("WeightVector::set: negative weight");
  values_[static_cast<Eigen::Index>(k)] = w;
}

std::size_t WeightVector::edge_count() const {
  return static_cast<std::size_t>((values_.array() > 0.0).count());
}

AdjacencyMatrix::AdjacencyMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("AdjacencyMatrix: not square");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (m_(i, i) != 0.0) throw std::invalid_argument("AdjacencyMatrix: non-zero diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (!(m_(i, j) >= 0.0)) throw std::invalid_argument("AdjacencyMatrix: negative weight");
      if (m_(i, j) != m_(j, i)) throw std::invalid_argument("AdjacencyMatrix: not symmetric");
    }
  }
}

Matrix laplacian_operator(std::size_t n, const Vector& w) {
  if (static_cast<std::size_t>(w.size()) != num_pairs(n))
    throw std::invalid_argument("laplacian_operator: weight length does not match n");
  const auto nn = static_cast<Eigen::Index>(n);
  Matrix l = Matrix::Zero(nn, nn);
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    const double v = w[static_cast<Eigen::Index>(k)];
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    l(a, b) = -v;
    l(b, a) = -v;
    l(a, a) += v;
    l(b, b) += v;
  });
  return l;
}

LaplacianMatrix laplacian_from_weights(const WeightVector& w) {
  return LaplacianMatrix(laplacian_operator(w.n(), w.values()));
}

Vector adjoint_of(const Matrix& y) {
  if (y.rows() != y.cols()) throw std::invalid_argument("adjoint_of: matrix is not square");
  if (y.rows() < 2) throw std::invalid_argument("adjoint_of: need n >= 2");
  const auto n = static_cast<std::size_t>(y.rows());
  Vector out(static_cast<Eigen::Index>(num_pairs(n)));
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    out[static_cast<Eigen::Index>(k)] = y(a, a) - y(a, b) - y(b, a) + y(b, b);
  });
  return out;
}

Vector adjoint_laplacian(std::size_t n, const Vector& w) {
  if (static_cast<std::size_t>(w.size()) != num_pairs(n))
    throw std::invalid_argument("adjoint_laplacian: weight length does not match n");
  Vector deg = Vector::Zero(static_cast<Eigen::Index>(n));
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    const double v = w[static_cast<Eigen::Index>(k)];
    deg[static_cast<Eigen::Index>(i)] += v;
    deg[static_cast<Eigen::Index>(j)] += v;
  });
  Vector out(w.size());
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    const auto kk = static_cast<Eigen::Index>(k);
    out[kk] = deg[static_cast<Eigen::Index>(i)] + deg[static_cast<Eigen::Index>(j)] + 2.0 * w[kk];
  });
  return out;
}

AdjacencyMatrix adjacency_from_weights(const WeightVector& w) {
  const auto n = static_cast<Eigen::Index>(w.n());
  Matrix a = Matrix::Zero(n, n);
  for_each_pair(w.n(), [&](std::size_t k, std::size_t i, std::size_t j) {
    const double v = w[k];
    if (v < 0.0) throw std::invalid_argument("adjacency_from_weights: negative weight");
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  });
  return AdjacencyMatrix(std::move(a));
}

double largest_eigenvalue(const Matrix& m, int max_iters, double rel_tol) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  Rng rng(0x5EEDF00DULL);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  v.normalize();
  double lambda = v.dot(m * v);
  for (int it = 0; it < max_iters; ++it) {
    Vector mv = m * v;
    const double norm = mv.norm();
    if (norm == 0.0) return 0.0;
    v = mv / norm;
    const double next = v.dot(m * v);
    if (std::abs(next - lambda) <= rel_tol * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

LaplacianReport validate_laplacian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("validate_laplacian: matrix is not square");
  const Eigen::Index n = m.rows();
  LaplacianReport r;

  double asym = 0.0, pos = 0.0, rowsum = 0.0, gersh = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0, radius = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s += m(i, j);
      if (j == i) continue;
      asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
      pos = std::max(pos, m(i, j));
      radius += std::abs(m(i, j));
    }
    rowsum = std::max(rowsum, std::abs(s));
    gersh = std::max(gersh, m(i, i) + radius);
  }
  r.symmetry = {asym <= tol, asym};
  r.offdiag_sign = {pos <= tol, pos};
  r.row_sums = {rowsum <= tol, rowsum};

  // Every eigenvalue of cI - S is >= 0 when c bounds lambda_max(S), so its
  // dominant eigenvalue is c - lambda_min(S).
  const Matrix sym = 0.5 * (m + m.transpose());
  const double c = std::max(gersh, 0.0);
  const Matrix shifted = c * Matrix::Identity(n, n) - sym;
  r.min_eigenvalue = n == 0 ? 0.0 : c - largest_eigenvalue(shifted, 5000, 1e-15);
  const double neg = std::max(0.0, -r.min_eigenvalue);
  r.psd = {r.min_eigenvalue >= -1e-8, neg};
  return r;
}

std::string LaplacianReport::summary() const {
  std::ostringstream os;
  auto line = [&](const char* name, const CheckResult& c) {
    os << name << ": " << (c.passed ? "pass" : "FAIL") << " (violation " << c.violation << ")\n";
  };
  line("symmetry", symmetry);
  line("off-diagonal sign", offdiag_sign);
  line("zero row sums", row_sums);
  line("positive semi-definite", psd);
  return os.str();
}

double p_dirichlet_energy(const WeightVector& w, const Vector& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p_dirichlet_energy: p must be >= 1");
  if (static_cast<std::size_t>(f.size()) != w.n())
    throw std::invalid_argument("p_dirichlet_energy: signal length does not match n");
  double e = 0.0;
  for_each_pair(w.n(), [&](std::size_t k, std::size_t i, std::size_t j) {
    const double wk = w[k];
    if (wk == 0.0) return;
    e += wk * std::pow(std::abs(f[static_cast<Eigen::Index>(i)] - f[static_cast<Eigen::Index>(j)]), p);
  });
  return e;
}

}  // namespace plap
