#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankshift/cli_io.hpp"
#include "rankshift/errors.hpp"

namespace {

const std::map<std::string, rankshift::MetricSet> kMetrics{
    {"s", rankshift::MetricSet::S}, {"w", rankshift::MetricSet::W}, {"both", rankshift::MetricSet::Both}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming anomaly detection on dynamic graphs"};
  app.require_subcommand(1);

  rankshift::ScoreOptions score;
  std::string metric = "both";
  std::size_t nodes = 0;
  auto* cmd_score = app.add_subcommand("score", "Score every window of an edge stream");
  cmd_score->add_option("--input", score.input, "Edge file: timestamp src dst [label] [sign]")->required();
  cmd_score->add_option("--out", score.out_dir, "Output directory")->required();
  cmd_score->add_option("--window", score.detector.window_width, "Window width")->capture_default_str();
  cmd_score->add_option("--damping", score.detector.solver.damping, "Damping factor")->capture_default_str();
  cmd_score->add_option("--epsilon", score.detector.solver.epsilon, "Solver tolerance")->capture_default_str();
  cmd_score->add_option("--warmup", score.detector.warmup_windows, "Warm-up windows")->capture_default_str();
  cmd_score->add_option("--metric", metric, "Metric for the combined score")
      ->check(CLI::IsMember({"s", "w", "both"}))
      ->capture_default_str();
  cmd_score->add_option("--topk", score.detector.topk, "Nodes reported per window")->capture_default_str();
  cmd_score->add_option("--seed", score.seed, "Random seed")->capture_default_str();
  cmd_score->add_option("--nodes", nodes, "Declared node count (default: nodes seen in the input)");
  cmd_score->add_option("--reanchor", score.detector.reanchor_interval,
                        "Windows between batch re-solves, 0 to disable")
      ->capture_default_str();
  cmd_score->add_option("--min-attack-edges", score.min_attack_edges,
                        "Labelled edges that mark a window anomalous")
      ->capture_default_str();

  rankshift::GenerateOptions gen;
  rankshift::InjectionPlan plan;
  std::string kind = "none";
  std::int64_t eligible_from = 300;
  auto* cmd_gen = app.add_subcommand("generate", "Write a synthetic stream with optional injections");
  cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();
  cmd_gen->add_option("--seed", gen.generator.seed, "Random seed")->capture_default_str();
  cmd_gen->add_option("--nodes", gen.generator.n_nodes, "Node count")->capture_default_str();
  cmd_gen->add_option("--edges", gen.generator.n_base_edges, "Base edge events")->capture_default_str();
  cmd_gen->add_option("--timestamps", gen.generator.n_timestamps, "Timestamps")->capture_default_str();
  cmd_gen->add_option("--skew", gen.generator.skew, "Activity skew exponent")->capture_default_str();
  cmd_gen->add_option("--kind", kind, "Injection: none, s (cliques) or w (weight bursts)")
      ->check(CLI::IsMember({"none", "s", "w"}))
      ->capture_default_str();
  cmd_gen->add_option("--injections", plan.n_events, "Injected events")->capture_default_str();
  cmd_gen->add_option("--clique", plan.clique_size, "Clique size")->capture_default_str();
  cmd_gen->add_option("--burst", plan.burst_weight, "Burst weight")->capture_default_str();
  cmd_gen->add_option("--warmup", eligible_from, "First timestamp eligible for injection")
      ->capture_default_str();
  cmd_gen->add_option("--window", gen.window_width, "Window width used for labels")->capture_default_str();

  rankshift::EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "Precision, recall and threshold rate of a score table");
  cmd_eval->add_option("--scores", eval.scores, "scores.tsv from the score command")->required();
  cmd_eval->add_option("--labels", eval.labels, "Label file: window_index<TAB>0|1")->required();
  cmd_eval->add_option("--out", eval.out_dir, "Output directory")->required();
  cmd_eval->add_option("--ks", eval.ks, "Cut-offs (default 50,100,...,800)")->delimiter(',');
  cmd_eval->add_option("--column", eval.column, "Score column to rank by")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_score->parsed()) {
      score.detector.metrics = kMetrics.at(metric);
      if (cmd_score->count("--nodes") > 0) {
        score.nodes = nodes;
      }
      rankshift::run_score(score);
    } else if (cmd_gen->parsed()) {
      if (kind != "none") {
        plan.kind = kind == "s" ? rankshift::InjectionKind::S : rankshift::InjectionKind::W;
        plan.seed = gen.generator.seed ^ 0x9e3779b97f4a7c15ULL;
        plan.first_timestamp = eligible_from;
        plan.end_timestamp = static_cast<std::int64_t>(gen.generator.n_timestamps);
        gen.injection = plan;
      }
      rankshift::run_generate(gen);
    } else if (cmd_eval->parsed()) {
      const auto result = rankshift::run_eval(eval);
      for (const auto& p : result.points) {
        std::cout << "precision@" << p.k << " = " << p.precision << "  recall = " << p.recall << '\n';
      }
      std::cout << "threshold rate = " << result.threshold.rate << '\n';
    }
  } catch (const rankshift::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
