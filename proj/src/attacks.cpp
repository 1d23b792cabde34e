#include "plap/attacks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/rng.hpp"

namespace plap {

namespace {

// Picks `count` distinct pairs uniformly among those that are absent from
// `graph` and accepted by `eligible`, then sets them to weight 1. Rejection
// sampling is used while the eligible set is at most half full after the
// additions; denser cases enumerate candidates and partially shuffle.
template <typename Eligible>
WeightVector add_uniform(const WeightVector& graph, std::size_t count, std::size_t available,
                         Eligible&& eligible, Rng& rng) {
  WeightVector out = graph;
  if (count == 0) return out;
  const std::size_t pairs = graph.size();

  if (2 * count <= available && 2 * available >= pairs) {
    // Acceptance probability per draw stays >= 1/4.
    std::size_t placed = 0;
    while (placed < count) {
      const std::size_t k = rng.below(pairs);
      if (out[k] != 0.0 || !eligible(k)) continue;
      out.set(k, 1.0);
      ++placed;
    }
    return out;
  }

  std::vector<std::size_t> candidates;
  candidates.reserve(available);
  for (std::size_t k = 0; k < pairs; ++k)
    if (graph[k] == 0.0 && eligible(k)) candidates.push_back(k);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t pick = t + rng.below(candidates.size() - t);
    std::swap(candidates[t], candidates[pick]);
    out.set(candidates[t], 1.0);
  }
  return out;
}

double row_p_distance(const Matrix& x, std::size_t a, std::size_t b, double p) {
  const auto ra = x.row(static_cast<Eigen::Index>(a));
  const auto rb = x.row(static_cast<Eigen::Index>(b));
  if (p == 2.0) return (ra - rb).squaredNorm();
  return (ra - rb).array().abs().pow(p).sum();
}

}  // namespace

WeightVector random_add(const WeightVector& graph, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0)) throw std::invalid_argument("random_add: rate must be non-negative");
  const std::size_t edges = graph.edge_count();
  const auto count = static_cast<std::size_t>(std::floor(rate * static_cast<double>(edges) + 1e-9));
  const std::size_t absent = graph.size() - edges;
  if (count > absent)
    throw std::invalid_argument("random_add: " + std::to_string(count) + " additions requested but only " +
                                std::to_string(absent) + " absent pairs");
  Rng rng(seed);
  return add_uniform(graph, count, absent, [](std::size_t) { return true; }, rng);
}

WeightVector heterophilic_add(const Dataset& ds, std::size_t budget, std::uint64_t seed) {
  const std::size_t n = ds.n();
  std::vector<char> cross(ds.graph.size(), 0);
  std::size_t available = 0;
  for_each_pair(n, [&](std::size_t k, std::size_t i, std::size_t j) {
    if (ds.labels[i] != ds.labels[j]) {
      cross[k] = 1;
      if (ds.graph[k] == 0.0) ++available;
    }
  });
  if (budget > available)
    throw std::invalid_argument("heterophilic_add: budget " + std::to_string(budget) + " exceeds " +
                                std::to_string(available) + " absent cross-label pairs");
  Rng rng(seed);
  return add_uniform(ds.graph, budget, available, [&](std::size_t k) { return cross[k] != 0; }, rng);
}

PerturbationReport perturbation_report(const WeightVector& clean, const WeightVector& perturbed,
                                       const Dataset& ds, double p) {
  if (clean.n() != perturbed.n() || clean.n() != ds.n())
    throw std::invalid_argument("perturbation_report: node counts differ");
  PerturbationReport r;
  std::size_t cross_added = 0, original = 0;
  double sum_added = 0.0, sum_original = 0.0;
  for_each_pair(clean.n(), [&](std::size_t k, std::size_t i, std::size_t j) {
    const bool before = clean[k] > 0.0;
    const bool after = perturbed[k] > 0.0;
    if (before) {
      ++original;
      sum_original += row_p_distance(ds.features, i, j, p);
    }
    if (!before && after) {
      ++r.edges_added;
      if (ds.labels[i] != ds.labels[j]) ++cross_added;
      sum_added += row_p_distance(ds.features, i, j, p);
    } else if (before && !after) {
      ++r.edges_removed;
    }
  });
  if (r.edges_added) {
    r.added_cross_label_fraction = static_cast<double>(cross_added) / static_cast<double>(r.edges_added);
    r.mean_p_distance_added = sum_added / static_cast<double>(r.edges_added);
  }
  if (original) r.mean_p_distance_original = sum_original / static_cast<double>(original);
  return r;
}

}  // namespace plap
