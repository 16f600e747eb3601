#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rankshift/score_engine.hpp"

namespace rankshift {

/// First and second discrete derivatives of one score vector kind.
struct DerivativePair {
  std::vector<double> d1;
  std::vector<double> d2;
  ScoreKind kind = ScoreKind::S;
  std::int64_t window_index = -1;
};

/// d1 = (curr - prev) / dt, d2 = (curr - 2 prev + prev2) / dt².
/// A null prev2 yields d2 = 0.
DerivativePair derivatives(const ScoreVector* prev2, const ScoreVector& prev,
                           const ScoreVector& curr, double dt);

/// Normalisation channels: {ScoreS, ScoreW} x {1st, 2nd derivative}.
enum class Channel : std::uint8_t { S1 = 0, S2 = 1, W1 = 2, W2 = 3 };
inline constexpr std::size_t kChannelCount = 4;

std::string_view channel_name(Channel ch);

/// Which metric feeds the combined score.
enum class MetricSet { S, W, Both };

/// Streaming per-node mean and population variance (Welford).
class RunningStats {
 public:
  explicit RunningStats(std::size_t n = 0) : count_(n, 0), mean_(n, 0.0), m2_(n, 0.0) {}

  std::size_t size() const noexcept { return mean_.size(); }
  std::int64_t count(std::size_t i) const { return count_[i]; }
  double mean(std::size_t i) const { return mean_[i]; }
  double variance(std::size_t i) const {
    return count_[i] > 0 ? m2_[i] / static_cast<double>(count_[i]) : 0.0;
  }

  void add(std::size_t i, double x) {
    ++count_[i];
    const double d = x - mean_[i];
    mean_[i] += d / static_cast<double>(count_[i]);
    m2_[i] += d * (x - mean_[i]);
  }

 private:
  std::vector<std::int64_t> count_;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Running statistics for the four channels of every node.
class NodeStats {
 public:
  explicit NodeStats(std::size_t n = 0);

  RunningStats& channel(Channel ch) { return channels_[static_cast<std::size_t>(ch)]; }
  const RunningStats& channel(Channel ch) const { return channels_[static_cast<std::size_t>(ch)]; }
  std::size_t node_count() const noexcept { return channels_[0].size(); }

 private:
  std::array<RunningStats, kChannelCount> channels_;
};

inline constexpr double kStdFloor = 1e-12;

/// Standardises each entry against the statistics of previous windows, then
/// folds the entry into those statistics. Entries with fewer than two prior
/// values or a standard deviation below kStdFloor map to 0.
std::vector<double> normalize_and_update(std::span<const double> values, RunningStats& stats);

struct NodeAttribution {
  NodeId node;
  double magnitude;
  Channel channel;  // channel with the largest |z|
};

using NormalizedChannels = std::array<std::vector<double>, kChannelCount>;

/// Ranks nodes by max |z| over the channels selected by `metrics`; ties by
/// ascending id. Nodes with zero magnitude are left out.
std::vector<NodeAttribution> attribute(const NormalizedChannels& channels, std::size_t topk,
                                       MetricSet metrics = MetricSet::Both);

struct AnomalyRecord {
  std::int64_t window_index = 0;
  double t_start = 0.0;
  double score = 0.0;
  double score_s = 0.0;
  double score_w = 0.0;
  double l1_d1s = 0.0;
  double l1_d2s = 0.0;
  double l1_d1w = 0.0;
  double l1_d2w = 0.0;
  bool warmup = false;
  std::vector<NodeAttribution> top_nodes;
};

/// Normalises the four channels, takes their L1 norms and combines them:
/// score_s = max(l1_d1s, l1_d2s), score_w likewise, score = max over the
/// selected metrics. The warm-up flag is left to the caller.
AnomalyRecord compute_anomaly_score(const DerivativePair& dp_s, const DerivativePair& dp_w,
                                    NodeStats& stats, std::size_t topk,
                                    MetricSet metrics = MetricSet::Both);

}  // namespace rankshift
