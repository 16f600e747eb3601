#include "rankshift/detector.hpp"

#include <cmath>

namespace rankshift {

void DetectorConfig::validate() const {
  solver.validate();
  if (!(window_width > 0.0) || !std::isfinite(window_width)) {
    throw InvalidConfig("window width must be positive");
  }
}

AnomalyDetector::AnomalyDetector(std::size_t node_count, DetectorConfig cfg)
    : cfg_(cfg), n_(node_count), stats_(node_count) {
  cfg_.validate();
  const GraphState empty(node_count);
  cur_s_ = batch_score_s(empty, cfg_.solver);
  cur_w_ = batch_score_w(empty, cfg_.solver);
}

DerivativePair AnomalyDetector::advance(History& h, ScoreVector& cur, ScoreVector next) const {
  DerivativePair d;
  if (!h.last) {
    d.kind = next.kind;
    d.window_index = next.window_index;
    d.d1.assign(n_, 0.0);
    d.d2.assign(n_, 0.0);
  } else {
    d = derivatives(h.before_last ? &*h.before_last : nullptr, *h.last, next, 1.0);
  }
  h.before_last = std::move(h.last);
  h.last = next;
  cur = std::move(next);
  return d;
}

// Swaps the current vector for a batch solve and shifts the stored previous
// vector by the same correction, so the next derivatives see no jump.
void AnomalyDetector::reanchor(History& h, ScoreVector& cur, const GraphState& after,
                               ScoreKind kind) const {
  ScoreVector exact = kind == ScoreKind::S ? batch_score_s(after, cfg_.solver, cur.values)
                                           : batch_score_w(after, cfg_.solver, cur.values);
  exact.window_index = cur.window_index;
  if (h.before_last) {
    auto& older = h.before_last->values;
    for (std::size_t i = 0; i < n_; ++i) {
      older[i] += exact.values[i] - cur.values[i];
    }
  }
  h.last = exact;
  cur = std::move(exact);
}

AnomalyRecord AnomalyDetector::process(const SnapshotDelta& delta, const GraphState& after) {
  if (after.node_count() != n_) {
    throw DimensionMismatch("graph size differs from detector size");
  }
  d_s_ = advance(hist_s_, cur_s_, update_score_s(after, cur_s_, delta, cfg_.solver));
  d_w_ = advance(hist_w_, cur_w_, update_score_w(after, cur_w_, delta, cfg_.solver));

  AnomalyRecord rec = compute_anomaly_score(d_s_, d_w_, stats_, cfg_.topk, cfg_.metrics);
  rec.window_index = delta.window_index;
  rec.t_start = static_cast<double>(delta.window_index) * cfg_.window_width;
  rec.warmup = processed_ < cfg_.warmup_windows;
  ++processed_;

  if (cfg_.reanchor_interval > 0 && processed_ % cfg_.reanchor_interval == 0) {
    reanchor(hist_s_, cur_s_, after, ScoreKind::S);
    reanchor(hist_w_, cur_w_, after, ScoreKind::W);
  }
  return rec;
}

std::vector<AnomalyRecord> run_detector(std::span<const EdgeEvent> events, std::size_t node_count,
                                        const DetectorConfig& cfg) {
  std::vector<AnomalyRecord> out;
  if (events.empty()) {
    return out;
  }
  AnomalyDetector det(node_count, cfg);
  GraphStream stream(node_count, cfg.window_width);
  const auto on_window = [&](const SnapshotDelta& d, const GraphState& g) {
    out.push_back(det.process(d, g));
  };
  for (const auto& e : events) {
    stream.push(e, on_window);
  }
  stream.finish(on_window);
  return out;
}

}  // namespace rankshift
