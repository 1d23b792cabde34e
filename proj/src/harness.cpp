#include "plap/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "plap/rng.hpp"

namespace plap {

namespace {

// Stream tags for per-repetition seeds.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kAttackStream = 2;
constexpr std::uint64_t kSplitStream = 3;
constexpr std::uint64_t kTrainStream = 4;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::size_t AttackSpec::additions(std::size_t edges) const {
  switch (kind) {
    case AttackKind::none:
      return 0;
    case AttackKind::random:
      return static_cast<std::size_t>(std::floor(rate * static_cast<double>(edges) + 1e-9));
    case AttackKind::heterophilic:
      return budget ? *budget : static_cast<std::size_t>(std::floor(rate * static_cast<double>(edges) + 1e-9));
  }
  return 0;
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw std::invalid_argument("ExperimentConfig: repetitions must be >= 1");
  if (!(attack.rate >= 0.0)) throw std::invalid_argument("ExperimentConfig: attack rate must be >= 0");
  if (bundle && !std::filesystem::is_directory(*bundle))
    throw std::invalid_argument("ExperimentConfig: bundle directory " + bundle->string() + " does not exist");
  denoise.validate();
  train.validate();
  split_sizes(1, split_fractions);
}

PipelineError::PipelineError(const std::string& stage, int repetition, const std::string& what)
    : std::runtime_error("stage '" + stage + "', repetition " + std::to_string(repetition) + ": " + what),
      stage_(stage),
      repetition_(repetition) {}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return a;
}

std::uint64_t repetition_seed(std::uint64_t base, int repetition) {
  return derive_seed(base, 0x1000 + static_cast<std::uint64_t>(repetition));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

Dataset build_dataset(const ExperimentConfig& config, std::uint64_t rep_seed) {
  if (config.bundle) return load_bundle(*config.bundle);
  return generate_sbm(config.sbm, derive_seed(rep_seed, kDataStream));
}

WeightVector apply_attack(const Dataset& ds, const AttackSpec& attack, std::uint64_t seed) {
  switch (attack.kind) {
    case AttackKind::none:
      return ds.graph;
    case AttackKind::random:
      return random_add(ds.graph, attack.rate, seed);
    case AttackKind::heterophilic:
      return heterophilic_add(ds, attack.additions(ds.graph.edge_count()), seed);
  }
  return ds.graph;
}

double evaluate_arm(const Dataset& ds, const WeightVector& graph, const Split& split, const TrainConfig& config) {
  const Matrix a_hat = normalize_adjacency(adjacency_from_weights(graph));
  return train(ds, a_hat, split, config).report.test_accuracy;
}

ExperimentReport run_pipeline(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;

  for (int r = 0; r < config.repetitions; ++r) {
    RepetitionRecord rec;
    rec.repetition = r;
    rec.seed = repetition_seed(config.seed, r);
    std::string stage = "dataset";
    try {
      const Dataset ds = build_dataset(config, rec.seed);
      const Split split = ds.split ? *ds.split
                                   : split_nodes(ds.n(), config.split_fractions, derive_seed(rec.seed, kSplitStream));
      rec.clean_edges = ds.graph.edge_count();

      stage = "attack";
      const WeightVector poisoned = apply_attack(ds, config.attack, derive_seed(rec.seed, kAttackStream));
      rec.attack = perturbation_report(ds.graph, poisoned, ds, config.denoise.p);
      rec.attack_fraction =
          rec.clean_edges ? static_cast<double>(rec.attack.edges_added) / static_cast<double>(rec.clean_edges) : 0.0;

      stage = "denoise";
      const Matrix phi_n = laplacian_from_weights(poisoned).matrix();
      const DenoiseResult dn = denoise(phi_n, ds.features, config.denoise);
      rec.denoise.iterations = dn.iterations_run;
      rec.denoise.converged = dn.converged;
      rec.denoise.initial_objective = dn.objective_trace.front();
      rec.denoise.final_objective = dn.objective_trace.back();
      std::vector<double> added, intra;
      for_each_pair(ds.n(), [&](std::size_t k, std::size_t i, std::size_t j) {
        const double w = dn.weights[k];
        if (w > 1e-8) ++rec.denoise.recovered_edges;
        if (ds.graph[k] == 0.0 && poisoned[k] > 0.0) added.push_back(w);
        if (ds.graph[k] > 0.0 && ds.labels[i] == ds.labels[j]) intra.push_back(w);
      });
      rec.denoise.median_weight_added = median(std::move(added));
      rec.denoise.median_weight_intra = median(std::move(intra));

      TrainConfig tc = config.train;
      tc.seed = derive_seed(rec.seed, kTrainStream);
      stage = "train-clean";
      rec.clean_accuracy = evaluate_arm(ds, ds.graph, split, tc);
      stage = "train-poisoned";
      rec.poisoned_accuracy = evaluate_arm(ds, poisoned, split, tc);
      stage = "train-denoised";
      rec.denoised_accuracy = evaluate_arm(ds, dn.weights, split, tc);
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(stage, r, e.what());
    }
    report.records.push_back(rec);
  }

  std::vector<double> clean, poisoned, denoised;
  for (const auto& rec : report.records) {
    clean.push_back(rec.clean_accuracy);
    poisoned.push_back(rec.poisoned_accuracy);
    denoised.push_back(rec.denoised_accuracy);
  }
  report.clean = aggregate(clean);
  report.poisoned = aggregate(poisoned);
  report.denoised = aggregate(denoised);
  return report;
}

std::vector<ExperimentReport> sweep(const ExperimentConfig& config, SweepParameter parameter,
                                    std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  std::vector<ExperimentReport> out;
  for (double v : values) {
    ExperimentConfig c = config;
    switch (parameter) {
      case SweepParameter::rate:
        c.attack.rate = v;
        c.attack.budget.reset();
        break;
      case SweepParameter::beta:
        c.denoise.beta = v;
        break;
      case SweepParameter::p:
        c.denoise.p = v;
        break;
    }
    out.push_back(run_pipeline(c));
  }
  return out;
}

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none:
      return "none";
    case AttackKind::random:
      return "random";
    case AttackKind::heterophilic:
      return "heterophilic";
  }
  return "none";
}

AttackKind parse_attack_kind(const std::string& s) {
  if (s == "none") return AttackKind::none;
  if (s == "random") return AttackKind::random;
  if (s == "heterophilic") return AttackKind::heterophilic;
  throw std::invalid_argument("unknown attack '" + s + "'");
}

SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "rate") return SweepParameter::rate;
  if (s == "beta") return SweepParameter::beta;
  if (s == "p") return SweepParameter::p;
  throw std::invalid_argument("unknown sweep parameter '" + s + "'");
}

nlohmann::json to_json(const DenoiseConfig& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"p", c.p},
          {"max_iters", c.max_iters},
          {"step_mode", c.step_mode == StepMode::lipschitz ? "lipschitz" : "fixed"},
          {"step", c.step},
          {"tol", c.tol},
          {"restrict_to_support", c.restrict_to_support},
          {"seed", c.seed}};
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  if (c.bundle) {
    j["source"] = {{"bundle", c.bundle->string()}};
  } else {
    j["source"] = {{"sbm",
                    {{"nodes_per_block", c.sbm.nodes_per_block},
                     {"blocks", c.sbm.blocks},
                     {"p_in", c.sbm.p_in},
                     {"p_out", c.sbm.p_out},
                     {"feature_dim", c.sbm.feature_dim},
                     {"feature_signal", c.sbm.feature_signal},
                     {"feature_noise", c.sbm.feature_noise}}}};
  }
  j["attack"] = {{"kind", to_string(c.attack.kind)}, {"rate", c.attack.rate}};
  if (c.attack.budget) j["attack"]["budget"] = *c.attack.budget;
  j["denoise"] = to_json(c.denoise);
  j["train"] = {{"hidden", c.train.hidden},
                {"epochs", c.train.epochs},
                {"learning_rate", c.train.learning_rate},
                {"weight_decay", c.train.weight_decay}};
  j["split_fractions"] = c.split_fractions;
  j["repetitions"] = c.repetitions;
  j["seed"] = c.seed;
  return j;
}

nlohmann::json to_json(const TrainReport& r) {
  return {{"loss_trace", r.loss_trace},
          {"val_accuracy_trace", r.val_accuracy_trace},
          {"best_val_epoch", r.best_val_epoch},
          {"test_accuracy", r.test_accuracy}};
}

nlohmann::json to_json(const DenoiseResult& r, const DenoiseConfig& c) {
  return {{"iterations", r.iterations_run},
          {"converged", r.converged},
          {"objective_trace", r.objective_trace},
          {"config", to_json(c)}};
}

nlohmann::json to_json(const PerturbationReport& r) {
  return {{"edges_added", r.edges_added},
          {"edges_removed", r.edges_removed},
          {"added_cross_label_fraction", r.added_cross_label_fraction},
          {"mean_p_distance_added", r.mean_p_distance_added},
          {"mean_p_distance_original", r.mean_p_distance_original}};
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    records.push_back({{"repetition", r.repetition},
                       {"seed", r.seed},
                       {"clean_edges", r.clean_edges},
                       {"attack_edges", r.attack.edges_added},
                       {"attack_fraction", r.attack_fraction},
                       {"attack", to_json(r.attack)},
                       {"denoise",
                        {{"iterations", r.denoise.iterations},
                         {"converged", r.denoise.converged},
                         {"initial_objective", r.denoise.initial_objective},
                         {"final_objective", r.denoise.final_objective},
                         {"recovered_edges", r.denoise.recovered_edges},
                         {"median_weight_added", r.denoise.median_weight_added},
                         {"median_weight_intra", r.denoise.median_weight_intra}}},
                       {"test_accuracy",
                        {{"clean", r.clean_accuracy}, {"poisoned", r.poisoned_accuracy}, {"denoised", r.denoised_accuracy}}}});
  }
  auto agg = [](const Aggregate& a) { return nlohmann::json{{"mean", a.mean}, {"std", a.std}}; };
  return {{"config", to_json(report.config)},
          {"records", records},
          {"aggregate", {{"clean", agg(report.clean)}, {"poisoned", agg(report.poisoned)}, {"denoised", agg(report.denoised)}}}};
}

std::string to_csv(std::span<const ExperimentReport> reports, std::span<const double> values) {
  std::ostringstream os;
  os << "value,arm,repetition,seed,test_accuracy\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string value = i < values.size() ? fmt(values[i]) : "";
    for (const auto& r : reports[i].records) {
      os << value << ",clean," << r.repetition << ',' << r.seed << ',' << fmt(r.clean_accuracy) << '\n';
      os << value << ",poisoned," << r.repetition << ',' << r.seed << ',' << fmt(r.poisoned_accuracy) << '\n';
      os << value << ",denoised," << r.repetition << ',' << r.seed << ',' << fmt(r.denoised_accuracy) << '\n';
    }
  }
  return os.str();
}

}  // namespace plap
