#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankshift/detector.hpp"
#include "rankshift/synth_bench.hpp"

namespace rankshift {

/// Edge events with node names interned in order of first appearance.
struct ParsedStream {
  std::vector<EdgeEvent> events;
  std::vector<std::string> node_names;
  bool has_labels = false;
};

/// Reads `timestamp src dst [label] [sign]` lines separated by tabs, commas
/// or spaces. Blank lines, `#` comments and a leading header whose first
/// field is `timestamp` are skipped. Errors carry the 1-based line number.
ParsedStream parse_edges(std::istream& in);
ParsedStream read_edge_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double x);

void write_edges(std::ostream& out, std::span<const EdgeEvent> events, bool with_labels);
void write_score_table(std::ostream& out, std::span<const AnomalyRecord> records);
void write_attribution(std::ostream& out, std::span<const AnomalyRecord> records,
                       std::span<const std::string> node_names);
void write_nodes(std::ostream& out, std::span<const std::string> node_names);
void write_labels(std::ostream& out, const WindowLabels& labels);
void write_eval(std::ostream& out, const EvalResult& result);
void write_threshold(std::ostream& out, const ThresholdResult& result);
void write_eval_table(std::ostream& out, const EvalResult& result);

WindowLabels read_labels(std::istream& in);

/// Score table as written by write_score_table.
struct ScoreTable {
  std::vector<std::string> columns;  // numeric columns after window_index
  std::vector<std::int64_t> windows;
  std::vector<std::vector<double>> rows;
  std::vector<bool> warmup;

  /// Windows scored by the named column.
  std::vector<ScoredWindow> scored(const std::string& column) const;
};

ScoreTable read_score_table(std::istream& in);

struct ScoreOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  DetectorConfig detector;
  std::optional<std::size_t> nodes;  // declared node count
  std::size_t min_attack_edges = 50;
  std::uint64_t seed = 0;
};

/// Writes scores.tsv, attribution.tsv and nodes.tsv to out_dir; labels.tsv
/// as well when the input carries edge labels.
void run_score(const ScoreOptions& opt);

struct GenerateOptions {
  GeneratorConfig generator;
  std::optional<InjectionPlan> injection;
  double window_width = 1.0;
  std::size_t min_attack_edges = 50;
  std::filesystem::path out_dir;
};

/// Writes edges.tsv and labels.tsv to out_dir.
void run_generate(const GenerateOptions& opt);

struct EvalOptions {
  std::filesystem::path scores;
  std::filesystem::path labels;
  std::filesystem::path out_dir;
  std::vector<std::size_t> ks;  // empty: 50, 100, ..., 800 up to the window count
  std::string column = "score";
};

/// Writes eval.tsv, threshold.tsv and eval_windows.tsv to out_dir.
EvalResult run_eval(const EvalOptions& opt);

}  // namespace rankshift
