// plapgnn: generate, attack, denoise and classify graphs from the command line.
//
// All flags live on the root command, so any of them may be given before or
// after the subcommand, or in a flat key=value file passed with --config.
// Command-line flags take precedence over the file.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "plap/harness.hpp"
#include "plap/rng.hpp"

namespace fs = std::filesystem;
using namespace plap;

namespace {

struct Options {
  std::string data;
  std::string out;
  std::string csv;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  double beta = 0.5;
  double p = 2.0;
  int iters = 200;
  std::string step = "lipschitz";
  double lr_w = 1e-3;
  double tol = 1e-12;
  bool restrict_support = false;
  int epochs = 250;
  double lr_gnn = 1e-2;
  int hidden = 16;
  double weight_decay = 5e-4;
  std::string attack = "none";
  double rate = 0.0;
  long long budget = -1;
  int reps = 10;
  std::vector<double> split{0.8, 0.1, 0.1};
  SbmParams sbm;
  std::string param = "rate";
  std::vector<double> values;
};

DenoiseConfig denoise_config(const Options& o) {
  DenoiseConfig c;
  c.alpha = o.alpha;
  c.beta = o.beta;
  c.p = o.p;
  c.max_iters = o.iters;
  if (o.step == "lipschitz") c.step_mode = StepMode::lipschitz;
  else if (o.step == "fixed") c.step_mode = StepMode::fixed;
  else throw std::invalid_argument("--step must be lipschitz or fixed");
  c.step = o.lr_w;
  c.tol = o.tol;
  c.restrict_to_support = o.restrict_support;
  c.seed = o.seed;
  return c;
}

TrainConfig train_config(const Options& o) {
  TrainConfig c;
  c.hidden = o.hidden;
  c.epochs = o.epochs;
  c.learning_rate = o.lr_gnn;
  c.weight_decay = o.weight_decay;
  c.seed = o.seed;
  return c;
}

AttackSpec attack_spec(const Options& o) {
  AttackSpec a;
  a.kind = parse_attack_kind(o.attack);
  a.rate = o.rate;
  if (o.budget >= 0) a.budget = static_cast<std::size_t>(o.budget);
  return a;
}

std::array<double, 3> split_fractions(const Options& o) {
  if (o.split.size() != 3) throw std::invalid_argument("--split takes exactly three fractions");
  return {o.split[0], o.split[1], o.split[2]};
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig c;
  if (!o.data.empty()) c.bundle = o.data;
  c.sbm = o.sbm;
  c.attack = attack_spec(o);
  c.denoise = denoise_config(o);
  c.train = train_config(o);
  c.split_fractions = split_fractions(o);
  c.repetitions = o.reps;
  c.seed = o.seed;
  return c;
}

Dataset require_data(const Options& o) {
  if (o.data.empty()) throw std::invalid_argument("--data DIR is required");
  return load_bundle(o.data);
}

void emit(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void run_synth(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out DIR is required");
  Dataset ds = generate_sbm(o.sbm, o.seed);
  ds.split = split_nodes(ds.n(), split_fractions(o), derive_seed(o.seed, 3));
  save_bundle(ds, o.out);
  std::cerr << "wrote " << ds.n() << " nodes, " << ds.graph.edge_count() << " edges to " << o.out << '\n';
}

void run_attack(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out DIR is required");
  Dataset ds = require_data(o);
  const WeightVector poisoned = apply_attack(ds, attack_spec(o), o.seed);
  const PerturbationReport report = perturbation_report(ds.graph, poisoned, ds, o.p);
  ds.graph = poisoned;
  save_bundle(ds, o.out);
  std::cout << to_json(report).dump(2) << '\n';
}

void run_denoise(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out DIR is required");
  Dataset ds = require_data(o);
  const DenoiseConfig cfg = denoise_config(o);
  const DenoiseResult result = denoise(laplacian_from_weights(ds.graph).matrix(), ds.features, cfg);
  // Drop numerically-zero weights so the bundle stays sparse.
  Vector w = result.weights.values();
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w[k] <= 1e-8) w[k] = 0.0;
  ds.graph = WeightVector(ds.n(), std::move(w));
  save_bundle(ds, o.out);
  emit(to_json(result, cfg), (fs::path(o.out) / "denoise.json").string());
  std::cerr << "denoise: " << result.iterations_run << " iterations, objective " << result.objective_trace.front()
            << " -> " << result.objective_trace.back() << '\n';
}

void run_train(const Options& o) {
  const Dataset ds = require_data(o);
  const Split split = ds.split ? *ds.split : split_nodes(ds.n(), split_fractions(o), derive_seed(o.seed, 3));
  const Matrix a_hat = normalize_adjacency(adjacency_from_weights(ds.graph));
  const TrainOutcome out = train(ds, a_hat, split, train_config(o));
  emit(to_json(out.report), o.out);
}

void run_pipeline_cmd(const Options& o) {
  const ExperimentReport report = run_pipeline(experiment_config(o));
  emit(to_json(report), o.out);
  if (!o.csv.empty()) write_text(o.csv, to_csv(std::span(&report, 1)));
}

void run_sweep(const Options& o) {
  if (o.values.empty()) throw std::invalid_argument("--values is required");
  const auto reports = sweep(experiment_config(o), parse_sweep_parameter(o.param), o.values);
  nlohmann::json j = {{"parameter", o.param}, {"values", o.values}, {"reports", nlohmann::json::array()}};
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  emit(j, o.out);
  if (!o.csv.empty()) write_text(o.csv, to_csv(reports, o.values));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian graph denoising and GCN evaluation"};
  app.set_config("--config", "", "Flat key=value file; keys are the long flag names");
  app.require_subcommand(1);
  Options o;

  app.add_option("--data", o.data, "Input bundle directory");
  app.add_option("--out", o.out, "Output path (directory for synth/attack/denoise, JSON file otherwise)");
  app.add_option("--csv", o.csv, "Also write one CSV row per (arm, repetition)");
  app.add_option("--seed", o.seed, "Base seed")->capture_default_str();

  app.add_option("--alpha", o.alpha, "Fidelity weight")->capture_default_str();
  app.add_option("--beta", o.beta, "Feature-smoothness weight")->capture_default_str();
  app.add_option("--p", o.p, "Exponent of the feature distance")->capture_default_str();
  app.add_option("--iters", o.iters, "Denoising iterations")->capture_default_str();
  app.add_option("--step", o.step, "Denoising step rule")->check(CLI::IsMember({"lipschitz", "fixed"}))->capture_default_str();
  app.add_option("--lr-w", o.lr_w, "Step size in fixed-step mode")->capture_default_str();
  app.add_option("--tol", o.tol, "Relative objective decrease that stops denoising")->capture_default_str();
  app.add_flag("--restrict-support", o.restrict_support, "Only reweight pairs present in the input graph");

  app.add_option("--epochs", o.epochs, "GCN training epochs")->capture_default_str();
  app.add_option("--lr-gnn", o.lr_gnn, "GCN learning rate")->capture_default_str();
  app.add_option("--hidden", o.hidden, "GCN hidden width")->capture_default_str();
  app.add_option("--weight-decay", o.weight_decay, "L2 penalty on GCN weights")->capture_default_str();

  app.add_option("--attack", o.attack, "Poisoning attack")
      ->check(CLI::IsMember({"none", "random", "heterophilic"}))
      ->capture_default_str();
  app.add_option("--rate", o.rate, "Edges to add as a fraction of |E|")->capture_default_str();
  app.add_option("--budget", o.budget, "Heterophilic attack: absolute number of edges (overrides --rate)");
  app.add_option("--reps", o.reps, "Repetitions")->capture_default_str();
  app.add_option("--split", o.split, "Train,val,test fractions")->delimiter(',')->expected(3)->capture_default_str();

  app.add_option("--nodes-per-block", o.sbm.nodes_per_block, "SBM block size")->capture_default_str();
  app.add_option("--blocks", o.sbm.blocks, "SBM block count")->capture_default_str();
  app.add_option("--p-in", o.sbm.p_in, "SBM intra-block edge probability")->capture_default_str();
  app.add_option("--p-out", o.sbm.p_out, "SBM inter-block edge probability")->capture_default_str();
  app.add_option("--feature-dim", o.sbm.feature_dim, "SBM feature dimension")->capture_default_str();
  app.add_option("--feature-signal", o.sbm.feature_signal, "SBM centroid separation")->capture_default_str();
  app.add_option("--feature-noise", o.sbm.feature_noise, "SBM uniform noise half-width")->capture_default_str();

  app.add_option("--param", o.param, "Sweep parameter")->check(CLI::IsMember({"rate", "beta", "p"}))->capture_default_str();
  app.add_option("--values", o.values, "Sweep values, comma separated")->delimiter(',');

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const Options&);
  };
  const Command commands[] = {
      {"synth", "Generate an SBM bundle", run_synth},
      {"attack", "Poison a bundle's graph", run_attack},
      {"denoise", "Recover a cleaned graph from a bundle", run_denoise},
      {"train", "Train and evaluate the GCN on a bundle", run_train},
      {"pipeline", "Clean / poisoned / denoised comparison over repetitions", run_pipeline_cmd},
      {"sweep", "Run the pipeline over a list of parameter values", run_sweep},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) subs.emplace_back(app.add_subcommand(c.name, c.help)->fallthrough(), &c);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto [sub, cmd] : subs)
      if (sub->parsed()) cmd->run(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
