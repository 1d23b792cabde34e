#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plap/graph_core.hpp"

namespace plap {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  bool operator==(const Split&) const = default;
};

struct Dataset {
  Matrix features;           // n x d
  std::vector<int> labels;   // n entries in [0, num_classes)
  WeightVector graph;
  int num_classes = 0;
  std::optional<Split> split;  // present when the bundle ships splits.json

  std::size_t n() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }

  // Throws std::invalid_argument if shapes or labels are inconsistent.
  void validate() const;
};

// Errors raised while reading a bundle; the message names file and row.
class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads edges.csv, features.csv, labels.csv and optional splits.json from
// `dir`. Node count comes from features.csv.
Dataset load_bundle(const std::filesystem::path& dir);

// Writes the bundle files (splits.json only if ds.split is set). Weights are
// written with round-trip precision.
void save_bundle(const Dataset& ds, const std::filesystem::path& dir);

// Writes only edges.csv for `graph`, emitting pairs with weight > threshold.
void save_edges(const WeightVector& graph, const std::filesystem::path& file,
                double threshold = 0.0);

struct SbmParams {
  std::size_t nodes_per_block = 50;
  std::size_t blocks = 2;
  double p_in = 0.2;
  double p_out = 0.01;
  std::size_t feature_dim = 16;
  double feature_signal = 2.0;
  double feature_noise = 0.5;
};

// Node v belongs to block v / nodes_per_block. Draw order: one uniform per
// pair in pair_index order (edge iff u < p_in or p_out), then n*d uniforms
// row-major for feature noise. Feature row of a class-c node is
// feature_signal * e_c + U[-feature_noise, feature_noise]^d.
Dataset generate_sbm(const SbmParams& params, std::uint64_t seed);

// Uniformly random disjoint train/val/test subsets with sizes from
// largest-remainder rounding of fractions * n. Throws std::invalid_argument
// for negative fractions or a sum above 1.
Split split_nodes(std::size_t n, std::array<double, 3> fractions, std::uint64_t seed);

// Sizes used by split_nodes.
std::array<std::size_t, 3> split_sizes(std::size_t n, std::array<double, 3> fractions);

}  // namespace plap
