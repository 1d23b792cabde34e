#include <set>

#include "doctest.h"
#include "plap/graph_core.hpp"
#include "oracles.hpp"

using namespace plap;
using plap::testing::random_matrix;
using plap::testing::random_vector;
using plap::testing::random_weights;
using plap::testing::adjoint_by_basis;
using plap::testing::enumerated_index;
using plap::testing::gram_operator;


TEST_CASE("pair_index matches the closed form and the enumeration") {
  CHECK(pair_index(2, 1, 4) == 1);
  CHECK(pair_index(4, 3, 4) == 6);
  CHECK(pair_index(3, 2, 4) == enumerated_index(3, 2, 4));
  CHECK(pair_index(3, 2, 4) == 4);

  CHECK_THROWS_AS(pair_index(2, 2, 4), std::invalid_argument);
  CHECK_THROWS_AS(pair_index(1, 2, 4), std::invalid_argument);
  CHECK_THROWS_AS(pair_index(5, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(pair_index(2, 0, 4), std::invalid_argument);
}

TEST_CASE("pair_index is a bijection onto 1..n(n-1)/2") {
  for (std::size_t n = 2; n <= 12; ++n) {
    std::set<std::size_t> seen;
    for (std::size_t j = 1; j <= n; ++j)
      for (std::size_t i = j + 1; i <= n; ++i) {
        const std::size_t k = pair_index(i, j, n);
        CHECK(k == enumerated_index(i, j, n));
        CHECK(pair_nodes(k, n) == std::pair{i, j});
        seen.insert(k);
      }
    CHECK(seen.size() == num_pairs(n));
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == num_pairs(n));
  }
}

TEST_CASE("for_each_pair visits in storage order") {
  std::size_t expected = 0;
  for_each_pair(7, [&](std::size_t k, std::size_t i, std::size_t j) {
    CHECK(k == expected++);
    CHECK(pair_index(i + 1, j + 1, 7) == k + 1);
  });
  CHECK(expected == 21);
}

TEST_CASE("laplacian_from_weights on small graphs") {
  Matrix path(3, 3);
  path << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(laplacian_from_weights(WeightVector(3, Vector{{1.0, 0.0, 1.0}})).matrix() == path);

  CHECK(laplacian_from_weights(WeightVector(3)).matrix() == Matrix::Zero(3, 3));

  Matrix k3(3, 3);
  k3 << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK(laplacian_from_weights(WeightVector(3, Vector{{1.0, 1.0, 1.0}})).matrix() == k3);

  CHECK_THROWS_AS(laplacian_operator(3, Vector::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(3, Vector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(3, Vector{{1.0, -0.5, 0.0}}), std::invalid_argument);
}

TEST_CASE("laplacian equals degree minus adjacency") {
  Rng rng(11);
  for (std::size_t n = 2; n <= 9; ++n) {
    const WeightVector w = random_weights(rng, n, 0.5);
    const Matrix adj = adjacency_from_weights(w).matrix();
    const Matrix oracle = Matrix(adj.rowwise().sum().asDiagonal()) - adj;
    CHECK((laplacian_from_weights(w).matrix() - oracle).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("adjoint_of examples") {
  CHECK(adjoint_of(Matrix::Identity(3, 3)) == Vector{{2.0, 2.0, 2.0}});

  const Matrix y = laplacian_from_weights(WeightVector(3, Vector{{1.0, 0.0, 0.0}})).matrix();
  const Vector expected = adjoint_by_basis(y);
  CHECK(expected == Vector{{4.0, 1.0, 1.0}});
  CHECK(adjoint_of(y) == expected);

  CHECK_THROWS_AS(adjoint_of(Matrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(adjoint_of(Matrix::Zero(1, 1)), std::invalid_argument);
}

TEST_CASE("adjoint identity on random inputs") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(10);
    const auto m = static_cast<Eigen::Index>(num_pairs(n));
    const auto nn = static_cast<Eigen::Index>(n);
    const Vector w = random_vector(rng, m, -2.0, 2.0);
    const Matrix y = random_matrix(rng, nn, nn, -3.0, 3.0);
    const double lhs = (laplacian_operator(n, w).array() * y.array()).sum();
    const double rhs = w.dot(adjoint_of(y));
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
    CHECK((adjoint_of(y) - adjoint_by_basis(y)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("adjoint_laplacian matches the composed operators") {
  Rng rng(5);
  for (std::size_t n = 2; n <= 12; ++n) {
    const Vector w = random_vector(rng, static_cast<Eigen::Index>(num_pairs(n)), -1.0, 1.0);
    const Vector composed = adjoint_of(laplacian_operator(n, w));
    CHECK((adjoint_laplacian(n, w) - composed).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("operator norm of L*L is 2n") {
  for (std::size_t n = 3; n <= 12; ++n) {
    const double lambda = largest_eigenvalue(gram_operator(n));
    CHECK(lambda <= 2.0 * static_cast<double>(n) * (1.0 + 1e-9));
    // All-ones weights attain the bound.
    CHECK(lambda == doctest::Approx(2.0 * static_cast<double>(n)).epsilon(1e-6));
  }
}

TEST_CASE("adjacency_from_weights") {
  Matrix path(3, 3);
  path << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  CHECK(adjacency_from_weights(WeightVector(3, Vector{{1.0, 0.0, 1.0}})).matrix() == path);
  CHECK(adjacency_from_weights(WeightVector(2)).matrix() == Matrix::Zero(2, 2));

  Rng rng(3);
  const WeightVector w = random_weights(rng, 8, 0.4);
  const Matrix a = adjacency_from_weights(w).matrix();
  const Matrix l = laplacian_from_weights(w).matrix();
  CHECK((l.diagonal() - a.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-14);

  Matrix bad = path;
  bad(0, 1) = -1;
  bad(1, 0) = -1;
  CHECK_THROWS_AS(AdjacencyMatrix{bad}, std::invalid_argument);
}

TEST_CASE("validate_laplacian diagnostics") {
  const Matrix path = laplacian_from_weights(WeightVector(3, Vector{{1.0, 0.0, 1.0}})).matrix();
  const LaplacianReport ok = validate_laplacian(path, 1e-9);
  CHECK(ok.all_passed());
  CHECK(ok.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-8));

  Matrix bad = path;
  bad(0, 1) = 1.0;
  const LaplacianReport r = validate_laplacian(bad, 1e-9);
  CHECK_FALSE(r.offdiag_sign.passed);
  CHECK(r.offdiag_sign.violation == doctest::Approx(1.0));
  CHECK_FALSE(r.symmetry.passed);
  CHECK(r.symmetry.violation == doctest::Approx(2.0));

  const LaplacianReport neg = validate_laplacian(-Matrix::Identity(4, 4), 1e-9);
  CHECK_FALSE(neg.psd.passed);
  CHECK(neg.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK_FALSE(neg.row_sums.passed);
  CHECK(neg.offdiag_sign.passed);
  CHECK(!neg.summary().empty());

  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const WeightVector w = random_weights(rng, 3 + rng.below(10), 0.6);
    const LaplacianReport rep = validate_laplacian(laplacian_from_weights(w).matrix(), 1e-9);
    CHECK_MESSAGE(rep.all_passed(), rep.summary());
  }
  CHECK_THROWS_AS(validate_laplacian(Matrix::Zero(2, 3), 1e-9), std::invalid_argument);
}

TEST_CASE("p_dirichlet_energy") {
  const WeightVector path(3, Vector{{1.0, 0.0, 1.0}});
  const Vector f{{0.0, 1.0, 3.0}};
  CHECK(p_dirichlet_energy(path, f, 2.0) == doctest::Approx(5.0));
  CHECK(p_dirichlet_energy(path, f, 1.0) == doctest::Approx(3.0));
  CHECK(p_dirichlet_energy(path, Vector::Constant(3, 4.2), 1.7) == 0.0);
  CHECK_THROWS_AS(p_dirichlet_energy(path, f, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(p_dirichlet_energy(path, Vector::Zero(2), 2.0), std::invalid_argument);

  // Quadratic form identity at p = 2.
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    const WeightVector w = random_weights(rng, n, 0.5);
    const Vector x = random_vector(rng, static_cast<Eigen::Index>(n), -2.0, 2.0);
    const double quad = x.dot(laplacian_from_weights(w).matrix() * x);
    CHECK(p_dirichlet_energy(w, x, 2.0) == doctest::Approx(quad).epsilon(1e-9));
  }
}
