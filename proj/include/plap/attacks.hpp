#pragma once

#include <cstdint>

#include "plap/datasets.hpp"
#include "plap/graph_core.hpp"

namespace plap {

struct PerturbationReport {
  std::size_t edges_added = 0;
  std::size_t edges_removed = 0;
  double added_cross_label_fraction = 0.0;  // 0 when nothing was added
  double mean_p_distance_added = 0.0;       // mean ||x_i - x_j||_p^p over added pairs
  double mean_p_distance_original = 0.0;    // same over edges of the clean graph
};

// Adds floor(rate * |E|) unit-weight edges uniformly among absent pairs.
// Throws std::invalid_argument for rate < 0 or too few absent pairs.
WeightVector random_add(const WeightVector& graph, double rate, std::uint64_t seed);

// Adds `budget` unit-weight edges uniformly among absent pairs whose endpoint
// labels differ. Throws std::invalid_argument if budget exceeds the number of
// such pairs.
WeightVector heterophilic_add(const Dataset& dataset, std::size_t budget, std::uint64_t seed);

PerturbationReport perturbation_report(const WeightVector& clean, const WeightVector& perturbed,
                                       const Dataset& dataset, double p);

}  // namespace plap
