#include "rankshift/anomaly_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rankshift {

namespace {

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) {
    s += std::abs(x);
  }
  return s;
}

bool selected(Channel ch, MetricSet metrics) {
  const bool is_s = ch == Channel::S1 || ch == Channel::S2;
  return metrics == MetricSet::Both || (metrics == MetricSet::S) == is_s;
}

}  // namespace

DerivativePair derivatives(const ScoreVector* prev2, const ScoreVector& prev,
                           const ScoreVector& curr, double dt) {
  if (!(dt > 0.0)) {
    throw InvalidConfig("dt must be positive");
  }
  const std::size_t n = curr.values.size();
  if (prev.values.size() != n || (prev2 && prev2->values.size() != n)) {
    throw DimensionMismatch("score vectors differ in length");
  }
  if (prev.kind != curr.kind || (prev2 && prev2->kind != curr.kind)) {
    throw DimensionMismatch("score vectors differ in kind");
  }
  DerivativePair out;
  out.kind = curr.kind;
  out.window_index = curr.window_index;
  out.d1.resize(n);
  out.d2.assign(n, 0.0);
  const double dt2 = dt * dt;
  for (std::size_t i = 0; i < n; ++i) {
    out.d1[i] = (curr.values[i] - prev.values[i]) / dt;
  }
  if (prev2) {
    for (std::size_t i = 0; i < n; ++i) {
      out.d2[i] = ((curr.values[i] - prev.values[i]) - (prev.values[i] - prev2->values[i])) / dt2;
    }
  }
  return out;
}

std::string_view channel_name(Channel ch) {
  switch (ch) {
    case Channel::S1:
      return "s1";
    case Channel::S2:
      return "s2";
    case Channel::W1:
      return "w1";
    case Channel::W2:
      return "w2";
  }
  return "?";
}

NodeStats::NodeStats(std::size_t n)
    : channels_{RunningStats(n), RunningStats(n), RunningStats(n), RunningStats(n)} {}

std::vector<double> normalize_and_update(std::span<const double> values, RunningStats& stats) {
  if (values.size() != stats.size()) {
    throw DimensionMismatch("value vector does not match statistics size");
  }
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (stats.count(i) >= 2) {
      const double sd = std::sqrt(stats.variance(i));
      if (sd >= kStdFloor) {
        out[i] = (values[i] - stats.mean(i)) / sd;
      }
    }
    stats.add(i, values[i]);
  }
  return out;
}

std::vector<NodeAttribution> attribute(const NormalizedChannels& channels, std::size_t topk,
                                       MetricSet metrics) {
  const std::size_t n = channels[0].size();
  std::vector<NodeAttribution> all;
  all.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    NodeAttribution a{static_cast<NodeId>(i), 0.0, Channel::S1};
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const auto ch = static_cast<Channel>(c);
      if (!selected(ch, metrics) || channels[c].size() != n) {
        continue;
      }
      const double z = std::abs(channels[c][i]);
      if (z > a.magnitude) {
        a.magnitude = z;
        a.channel = ch;
      }
    }
    if (a.magnitude > 0.0) {
      all.push_back(a);
    }
  }
  const auto before = [](const NodeAttribution& a, const NodeAttribution& b) {
    return a.magnitude != b.magnitude ? a.magnitude > b.magnitude : a.node < b.node;
  };
  const std::size_t k = std::min(topk, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), before);
  all.resize(k);
  return all;
}

AnomalyRecord compute_anomaly_score(const DerivativePair& dp_s, const DerivativePair& dp_w,
                                    NodeStats& stats, std::size_t topk, MetricSet metrics) {
  if (dp_s.window_index != dp_w.window_index) {
    throw DimensionMismatch("derivative pairs come from different windows");
  }
  NormalizedChannels z;
  z[0] = normalize_and_update(dp_s.d1, stats.channel(Channel::S1));
  z[1] = normalize_and_update(dp_s.d2, stats.channel(Channel::S2));
  z[2] = normalize_and_update(dp_w.d1, stats.channel(Channel::W1));
  z[3] = normalize_and_update(dp_w.d2, stats.channel(Channel::W2));

  AnomalyRecord rec;
  rec.window_index = dp_s.window_index;
  rec.l1_d1s = l1(z[0]);
  rec.l1_d2s = l1(z[1]);
  rec.l1_d1w = l1(z[2]);
  rec.l1_d2w = l1(z[3]);
  rec.score_s = std::max(rec.l1_d1s, rec.l1_d2s);
  rec.score_w = std::max(rec.l1_d1w, rec.l1_d2w);
  switch (metrics) {
    case MetricSet::S:
      rec.score = rec.score_s;
      break;
    case MetricSet::W:
      rec.score = rec.score_w;
      break;
    case MetricSet::Both:
      rec.score = std::max(rec.score_s, rec.score_w);
      break;
  }
  rec.top_nodes = attribute(z, topk, metrics);
  return rec;
}

}  // namespace rankshift
