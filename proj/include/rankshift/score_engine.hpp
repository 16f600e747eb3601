#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankshift/graph_stream.hpp"

namespace rankshift {

enum class ScoreKind { S, W };

struct SolverConfig {
  double damping = 0.5;
  double epsilon = 1e-3;
  std::size_t max_iters = 1000;

  /// Throws InvalidConfig unless 0 < damping < 1, epsilon > 0, max_iters > 0.
  void validate() const;
};

/// Non-negative node scores summing to one.
struct ScoreVector {
  std::vector<double> values;
  ScoreKind kind = ScoreKind::S;
  std::int64_t window_index = -1;
};

/// Work counters reported by the incremental solvers.
struct PropagationStats {
  std::size_t iterations = 0;  // residual propagation rounds
  std::size_t touched = 0;     // residual entries pushed, summed over rounds
  double start_l1 = 0.0;       // L1 of the initial residual
};

/// Fixed point of p = c Ã_sᵀ p + (1-c) b_s with uniform b_s, by power
/// iteration until successive iterates differ by less than epsilon in L1.
ScoreVector batch_score_s(const GraphState& state, const SolverConfig& cfg);
/// Same, started from `initial` instead of b_s.
ScoreVector batch_score_s(const GraphState& state, const SolverConfig& cfg,
                          std::span<const double> initial);

/// Fixed point of p = c Ã_wᵀ p + (1-c) b_w with b_w(i) = m_i / m.
ScoreVector batch_score_w(const GraphState& state, const SolverConfig& cfg);
ScoreVector batch_score_w(const GraphState& state, const SolverConfig& cfg,
                          std::span<const double> initial);

/// Weighted starting vector b_w of the graph.
std::vector<double> weighted_start_vector(const GraphState& state);

/// Incremental ScoreS for the post-window graph `after`:
///   prev + Σ_k (c(Ã_sᵀ + ΔA_s))^k c ΔA_s prev,
/// summing propagated residuals until the residual L1 drops below epsilon.
ScoreVector update_score_s(const GraphState& after, const ScoreVector& prev,
                           const SnapshotDelta& delta, const SolverConfig& cfg,
                           PropagationStats* stats = nullptr);

/// Incremental ScoreW for the post-window graph `after`.
///
/// Uses linearity of the score in its starting vector: with
/// b_w' = (m/m') b_w + δ/m', where δ holds the per-node weight changes,
///   p' = (m/m') prev + Σ_k (c Ã_w'ᵀ)^k [ (m/m') c ΔA_w prev + (1-c) δ / m' ],
/// which equals the prev + ΔA_w term + Δb_w term expansion while keeping
/// both starting vectors sparse.
ScoreVector update_score_w(const GraphState& after, const ScoreVector& prev,
                           const SnapshotDelta& delta, const SolverConfig& cfg,
                           PropagationStats* stats = nullptr);

/// Clamps negative entries to zero and rescales to unit sum.
void clamp_and_normalize(std::vector<double>& values);

}  // namespace rankshift
