#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rankshift/anomaly_metrics.hpp"
#include "rankshift/graph_stream.hpp"
#include "rankshift/score_engine.hpp"

namespace rankshift {

struct DetectorConfig {
  SolverConfig solver;
  std::size_t warmup_windows = 256;
  MetricSet metrics = MetricSet::Both;
  std::size_t topk = 10;
  // Every this many windows the incremental scores are replaced by a
  // warm-started batch solve. 0 disables re-anchoring.
  std::size_t reanchor_interval = 128;
  double window_width = 3600.0;

  void validate() const;
};

/// Per-window scoring pipeline: incremental ScoreS/ScoreW, derivatives,
/// per-node normalisation and the combined anomaly score.
class AnomalyDetector {
 public:
  AnomalyDetector(std::size_t node_count, DetectorConfig cfg);

  /// Scores one closed window. `after` is the graph with `delta` applied.
  AnomalyRecord process(const SnapshotDelta& delta, const GraphState& after);

  const ScoreVector& score_s() const noexcept { return cur_s_; }
  const ScoreVector& score_w() const noexcept { return cur_w_; }
  /// Raw derivatives of the last processed window.
  const DerivativePair& derivatives_s() const noexcept { return d_s_; }
  const DerivativePair& derivatives_w() const noexcept { return d_w_; }
  std::size_t windows_processed() const noexcept { return processed_; }
  const DetectorConfig& config() const noexcept { return cfg_; }

 private:
  struct History {
    std::optional<ScoreVector> last;
    std::optional<ScoreVector> before_last;
  };

  DerivativePair advance(History& h, ScoreVector& cur, ScoreVector next) const;
  void reanchor(History& h, ScoreVector& cur, const GraphState& after, ScoreKind kind) const;

  DetectorConfig cfg_;
  std::size_t n_;
  ScoreVector cur_s_;
  ScoreVector cur_w_;
  History hist_s_;
  History hist_w_;
  DerivativePair d_s_;
  DerivativePair d_w_;
  NodeStats stats_;
  std::size_t processed_ = 0;
};

/// Runs the whole pipeline over a time-ordered stream on n nodes.
std::vector<AnomalyRecord> run_detector(std::span<const EdgeEvent> events, std::size_t node_count,
                                        const DetectorConfig& cfg);

}  // namespace rankshift
