#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plap/attacks.hpp"
#include "plap/datasets.hpp"
#include "plap/denoiser.hpp"
#include "plap/gcn.hpp"

namespace plap {

enum class AttackKind { none, random, heterophilic };

struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double rate = 0.0;                  // fraction of |E| to add
  std::optional<std::size_t> budget;  // heterophilic: absolute count, overrides rate

  // Number of edges this attack adds to a graph with `edges` edges.
  std::size_t additions(std::size_t edges) const;
};

struct ExperimentConfig {
  std::optional<std::filesystem::path> bundle;  // SBM when unset
  SbmParams sbm;
  AttackSpec attack;
  DenoiseConfig denoise;
  TrainConfig train;
  std::array<double, 3> split_fractions{0.8, 0.1, 0.1};
  int repetitions = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DenoiseSummary {
  int iterations = 0;
  bool converged = false;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::size_t recovered_edges = 0;      // learned weights above 1e-8
  double median_weight_added = 0.0;     // over pairs the attack injected
  double median_weight_intra = 0.0;     // over clean edges joining same-label nodes
};

struct RepetitionRecord {
  int repetition = 0;
  std::uint64_t seed = 0;
  std::size_t clean_edges = 0;
  double attack_fraction = 0.0;  // edges_added / clean_edges
  PerturbationReport attack;
  DenoiseSummary denoise;
  double clean_accuracy = 0.0;
  double poisoned_accuracy = 0.0;
  double denoised_accuracy = 0.0;
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RepetitionRecord> records;
  Aggregate clean;
  Aggregate poisoned;
  Aggregate denoised;
};

// Raised for any failure inside run_pipeline; names stage and repetition.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& stage, int repetition, const std::string& what);
  const std::string& stage() const { return stage_; }
  int repetition() const { return repetition_; }

 private:
  std::string stage_;
  int repetition_;
};

Aggregate aggregate(std::span<const double> values);

// Seed of repetition r under base seed s.
std::uint64_t repetition_seed(std::uint64_t base, int repetition);

// Median of an arbitrary set (mean of the two middle values for even size);
// 0 for an empty set.
double median(std::vector<double> values);

// Builds the dataset for one repetition (SBM regenerated per repetition).
Dataset build_dataset(const ExperimentConfig& config, std::uint64_t rep_seed);

// Applies the configured attack.
WeightVector apply_attack(const Dataset& ds, const AttackSpec& attack, std::uint64_t seed);

// Trains on `graph` and returns test accuracy.
double evaluate_arm(const Dataset& ds, const WeightVector& graph, const Split& split, const TrainConfig& config);

ExperimentReport run_pipeline(const ExperimentConfig& config);

enum class SweepParameter { rate, beta, p };

// One report per value; the base seed is shared so curves are paired.
std::vector<ExperimentReport> sweep(const ExperimentConfig& config, SweepParameter parameter,
                                    std::span<const double> values);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const DenoiseConfig& config);
nlohmann::json to_json(const TrainReport& report);
nlohmann::json to_json(const DenoiseResult& result, const DenoiseConfig& config);
nlohmann::json to_json(const PerturbationReport& report);
nlohmann::json to_json(const ExperimentReport& report);

// One row per (arm, repetition): value,arm,repetition,seed,test_accuracy.
// `value` is the sweep value, or empty for a plain pipeline run.
std::string to_csv(std::span<const ExperimentReport> reports, std::span<const double> values = {});

const char* to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string& s);
SweepParameter parse_sweep_parameter(const std::string& s);

}  // namespace plap
