#include "rankshift/score_engine.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace rankshift {

namespace {

/// Dense scratch vector that remembers which entries were written.
class SparseAccumulator {
 public:
  explicit SparseAccumulator(std::size_t n) : value_(n, 0.0), mark_(n, 0) {}

  void add(NodeId i, double x) {
    if (!mark_[i]) {
      mark_[i] = 1;
      touched_.push_back(i);
    }
    value_[i] += x;
  }

  double l1() const {
    double s = 0.0;
    for (NodeId i : touched_) {
      s += std::abs(value_[i]);
    }
    return s;
  }

  void clear() {
    for (NodeId i : touched_) {
      value_[i] = 0.0;
      mark_[i] = 0;
    }
    touched_.clear();
  }

  const std::vector<NodeId>& touched() const { return touched_; }
  double operator[](NodeId i) const { return value_[i]; }

 private:
  std::vector<double> value_;
  std::vector<char> mark_;
  std::vector<NodeId> touched_;
};

enum class Transition { Structural, Weighted };

// next += c Ãᵀ r
void push(const GraphState& g, Transition kind, double c, const SparseAccumulator& r,
          SparseAccumulator& next) {
  for (NodeId u : r.touched()) {
    const double x = r[u];
    if (x == 0.0) {
      continue;
    }
    const auto edges = g.out_edges(u);
    if (edges.empty()) {
      next.add(u, c * x);
    } else if (kind == Transition::Structural) {
      const double share = c * x / static_cast<double>(edges.size());
      for (const auto& e : edges) {
        next.add(e.dst, share);
      }
    } else {
      const double scale = c * x / static_cast<double>(g.out_weight(u));
      for (const auto& e : edges) {
        next.add(e.dst, scale * static_cast<double>(e.weight));
      }
    }
  }
}

// Adds Σ_k (c Ãᵀ)^k r to acc, stopping once the residual L1 is below epsilon.
void propagate(const GraphState& g, Transition kind, const SolverConfig& cfg,
               SparseAccumulator& r, std::vector<double>& acc, PropagationStats& stats) {
  SparseAccumulator next(g.node_count());
  stats.start_l1 = r.l1();
  double mass = stats.start_l1;
  while (true) {
    for (NodeId i : r.touched()) {
      acc[i] += r[i];
    }
    if (mass < cfg.epsilon) {
      break;
    }
    if (stats.iterations >= cfg.max_iters) {
      throw NonConvergence("incremental update exceeded " + std::to_string(cfg.max_iters) +
                           " propagation rounds");
    }
    stats.touched += r.touched().size();
    push(g, kind, cfg.damping, r, next);
    ++stats.iterations;
    r.clear();
    std::swap(r, next);
    mass = r.l1();
  }
}

ScoreVector power_iterate(const GraphState& g, Transition kind, const SolverConfig& cfg,
                          const std::vector<double>& start, std::span<const double> initial) {
  cfg.validate();
  const std::size_t n = g.node_count();
  if (n == 0) {
    throw EmptyInput("graph has no nodes");
  }
  if (!initial.empty() && initial.size() != n) {
    throw DimensionMismatch("initial vector has wrong length");
  }
  const double c = cfg.damping;
  std::vector<double> p = initial.empty() ? start : std::vector<double>(initial.begin(), initial.end());
  std::vector<double> next(n);
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = (1.0 - c) * start[i];
    }
    for (NodeId u = 0; u < n; ++u) {
      const double x = p[u];
      if (x == 0.0) {
        continue;
      }
      const auto edges = g.out_edges(u);
      if (edges.empty()) {
        next[u] += c * x;
      } else if (kind == Transition::Structural) {
        const double share = c * x / static_cast<double>(edges.size());
        for (const auto& e : edges) {
          next[e.dst] += share;
        }
      } else {
        const double scale = c * x / static_cast<double>(g.out_weight(u));
        for (const auto& e : edges) {
          next[e.dst] += scale * static_cast<double>(e.weight);
        }
      }
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      change += std::abs(next[i] - p[i]);
    }
    std::swap(p, next);
    if (change < cfg.epsilon) {
      clamp_and_normalize(p);
      return {std::move(p), kind == Transition::Structural ? ScoreKind::S : ScoreKind::W, -1};
    }
  }
  throw NonConvergence("power iteration exceeded " + std::to_string(cfg.max_iters) + " iterations");
}

void check_prev(const GraphState& after, const ScoreVector& prev) {
  if (prev.values.size() != after.node_count()) {
    throw DimensionMismatch("score vector length " + std::to_string(prev.values.size()) +
                            " does not match node count " + std::to_string(after.node_count()));
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) {
    throw InvalidConfig("damping factor must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidConfig("epsilon must be positive");
  }
  if (max_iters == 0) {
    throw InvalidConfig("max_iters must be positive");
  }
}

void clamp_and_normalize(std::vector<double>& values) {
  double sum = 0.0;
  for (auto& v : values) {
    if (v < 0.0) {
      v = 0.0;
    }
    sum += v;
  }
  if (sum > 0.0) {
    for (auto& v : values) {
      v /= sum;
    }
  }
}

std::vector<double> weighted_start_vector(const GraphState& state) {
  const std::size_t n = state.node_count();
  std::vector<double> b(n);
  const double total = static_cast<double>(state.effective_total_weight());
  for (NodeId i = 0; i < n; ++i) {
    b[i] = static_cast<double>(state.effective_out_weight(i)) / total;
  }
  return b;
}

ScoreVector batch_score_s(const GraphState& state, const SolverConfig& cfg) {
  return batch_score_s(state, cfg, {});
}

ScoreVector batch_score_s(const GraphState& state, const SolverConfig& cfg,
                          std::span<const double> initial) {
  const std::size_t n = state.node_count();
  std::vector<double> b(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  return power_iterate(state, Transition::Structural, cfg, b, initial);
}

ScoreVector batch_score_w(const GraphState& state, const SolverConfig& cfg) {
  return batch_score_w(state, cfg, {});
}

ScoreVector batch_score_w(const GraphState& state, const SolverConfig& cfg,
                          std::span<const double> initial) {
  if (state.node_count() == 0) {
    throw EmptyInput("graph has no nodes");
  }
  return power_iterate(state, Transition::Weighted, cfg, weighted_start_vector(state), initial);
}

ScoreVector update_score_s(const GraphState& after, const ScoreVector& prev,
                           const SnapshotDelta& delta, const SolverConfig& cfg,
                           PropagationStats* stats) {
  cfg.validate();
  check_prev(after, prev);
  PropagationStats local;
  ScoreVector out{prev.values, ScoreKind::S, delta.window_index};
  if (!delta.delta_As.empty()) {
    SparseAccumulator r(after.node_count());
    const double c = cfg.damping;
    for (const auto& col : delta.delta_As.columns) {
      const double x = c * prev.values[col.column];
      if (x == 0.0) {
        continue;
      }
      for (const auto& e : col.entries) {
        r.add(e.row, x * e.value);
      }
    }
    propagate(after, Transition::Structural, cfg, r, out.values, local);
    clamp_and_normalize(out.values);
  }
  if (stats) {
    *stats = local;
  }
  return out;
}

ScoreVector update_score_w(const GraphState& after, const ScoreVector& prev,
                           const SnapshotDelta& delta, const SolverConfig& cfg,
                           PropagationStats* stats) {
  cfg.validate();
  check_prev(after, prev);
  PropagationStats local;
  ScoreVector out{prev.values, ScoreKind::W, delta.window_index};
  if (!delta.delta_Aw.empty() || !delta.delta_bw.empty()) {
    const auto& db = delta.delta_bw;
    const double c = cfg.damping;
    const double total_after = static_cast<double>(db.total_after);
    const double scale =
        db.total_before == db.total_after ? 1.0 : static_cast<double>(db.total_before) / total_after;
    if (scale != 1.0) {
      for (auto& v : out.values) {
        v *= scale;
      }
    }
    SparseAccumulator r(after.node_count());
    for (const auto& col : delta.delta_Aw.columns) {
      const double x = c * scale * prev.values[col.column];
      if (x == 0.0) {
        continue;
      }
      for (const auto& e : col.entries) {
        r.add(e.row, x * e.value);
      }
    }
    for (const auto& sh : db.shifts) {
      r.add(sh.node, (1.0 - c) * static_cast<double>(sh.after - sh.before) / total_after);
    }
    propagate(after, Transition::Weighted, cfg, r, out.values, local);
    clamp_and_normalize(out.values);
  }
  if (stats) {
    *stats = local;
  }
  return out;
}

}  // namespace rankshift
