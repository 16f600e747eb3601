#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rankshift/anomaly_metrics.hpp"

using namespace rankshift;

namespace {

ScoreVector sv(std::vector<double> v, ScoreKind kind = ScoreKind::S) { return {std::move(v), kind, 0}; }

NormalizedChannels channels(std::size_t n) {
  NormalizedChannels z;
  for (auto& c : z) c.assign(n, 0.0);
  return z;
}

}  // namespace

TEST(Derivatives, ConstantSequenceIsFlat) {
  const auto p = sv({0.3, 0.7});
  const auto d = derivatives(&p, p, p, 1.0);
  EXPECT_EQ(d.d1, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(d.d2, (std::vector<double>{0.0, 0.0}));
}

TEST(Derivatives, UnitStep) {
  const auto a = sv({0.5, 0.5}), b = sv({0.6, 0.4}), c = sv({0.8, 0.2});
  const auto d = derivatives(&a, b, c, 1.0);
  EXPECT_NEAR(d.d1[0], 0.2, 1e-15);
  EXPECT_NEAR(d.d1[1], -0.2, 1e-15);
  EXPECT_NEAR(d.d2[0], 0.1, 1e-15);
  EXPECT_NEAR(d.d2[1], -0.1, 1e-15);
}

TEST(Derivatives, StepTwo) {
  const auto a = sv({0.5, 0.5}), b = sv({0.6, 0.4}), c = sv({0.8, 0.2});
  const auto d = derivatives(&a, b, c, 2.0);
  EXPECT_NEAR(d.d1[0], 0.1, 1e-15);
  EXPECT_NEAR(d.d1[1], -0.1, 1e-15);
  EXPECT_NEAR(d.d2[0], 0.025, 1e-15);
  EXPECT_NEAR(d.d2[1], -0.025, 1e-15);
}

TEST(Derivatives, MissingSecondHistoryGivesZeroD2) {
  const auto d = derivatives(nullptr, sv({0.5, 0.5}), sv({0.6, 0.4}), 1.0);
  EXPECT_EQ(d.d2, (std::vector<double>{0.0, 0.0}));
  EXPECT_NEAR(d.d1[0], 0.1, 1e-15);
}

TEST(Derivatives, Errors) {
  EXPECT_THROW(derivatives(nullptr, sv({1.0}), sv({0.5, 0.5}), 1.0), DimensionMismatch);
  EXPECT_THROW(derivatives(nullptr, sv({1.0}), sv({1.0}, ScoreKind::W), 1.0), DimensionMismatch);
  EXPECT_THROW(derivatives(nullptr, sv({1.0}), sv({1.0}), 0.0), InvalidConfig);
}

TEST(DerivativesProperty, LinearAndStraightLinesHaveNoCurvature) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 9;
    std::vector<double> a0(n), a1(n), a2(n), b0(n), b1(n), b2(n), step(n);
    for (std::size_t i = 0; i < n; ++i) {
      a0[i] = u(rng), a1[i] = u(rng), a2[i] = u(rng);
      b0[i] = u(rng), b1[i] = u(rng), b2[i] = u(rng);
      step[i] = u(rng);
    }
    const double dt = 0.5 + trial % 3;
    const auto add = [](const std::vector<double>& x, const std::vector<double>& y) {
      std::vector<double> r(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
      return r;
    };
    const auto pa0 = sv(a0), pa1 = sv(a1), pa2 = sv(a2), pb0 = sv(b0), pb1 = sv(b1), pb2 = sv(b2);
    const auto s0 = sv(add(a0, b0)), s1 = sv(add(a1, b1)), s2 = sv(add(a2, b2));
    const auto da = derivatives(&pa0, pa1, pa2, dt);
    const auto db = derivatives(&pb0, pb1, pb2, dt);
    const auto ds = derivatives(&s0, s1, s2, dt);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(ds.d1[i], da.d1[i] + db.d1[i], 1e-12);
      EXPECT_NEAR(ds.d2[i], da.d2[i] + db.d2[i], 1e-12);
    }
    const auto l0 = sv(a0), l1 = sv(add(a0, step)), l2 = sv(add(add(a0, step), step));
    const auto dl = derivatives(&l0, l1, l2, 1.0);
    for (double x : dl.d2) EXPECT_NEAR(x, 0.0, 1e-12);
  }
}

TEST(NormalizeAndUpdate, FirstWindowIsZero) {
  RunningStats st(2);
  EXPECT_EQ(normalize_and_update(std::vector<double>{3.0, -1.0}, st), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(st.count(0), 1);
}

TEST(NormalizeAndUpdate, StandardisesAgainstHistory) {
  RunningStats st(1);
  for (double x : {1.0, 2.0, 3.0}) normalize_and_update(std::vector<double>{x}, st);
  const auto z = normalize_and_update(std::vector<double>{3.0}, st);
  EXPECT_NEAR(z[0], 1.0 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(z[0], 1.2247, 1e-4);
}

TEST(NormalizeAndUpdate, ConstantHistoryGivesZero) {
  RunningStats st(1);
  for (int i = 0; i < 3; ++i) normalize_and_update(std::vector<double>{5.0}, st);
  EXPECT_EQ(normalize_and_update(std::vector<double>{5.0}, st)[0], 0.0);
}

TEST(NormalizeAndUpdate, SizeMismatch) {
  RunningStats st(2);
  EXPECT_THROW(normalize_and_update(std::vector<double>{1.0}, st), DimensionMismatch);
}

TEST(RunningStatsProperty, MatchesTwoPassBatch) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(3.0, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    RunningStats st(1);
    std::vector<double> xs;
    const int len = 1 + trial * 7;
    for (int i = 0; i < len; ++i) {
      xs.push_back(g(rng));
      st.add(0, xs.back());
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(xs.size());
      ASSERT_NEAR(st.mean(0), mean, 1e-10);
      ASSERT_NEAR(st.variance(0), var, 1e-10 * std::max(1.0, var));
    }
  }
}

TEST(ComputeAnomalyScore, AllZeroDerivatives) {
  NodeStats stats(3);
  DerivativePair s{{0, 0, 0}, {0, 0, 0}, ScoreKind::S, 4};
  DerivativePair w{{0, 0, 0}, {0, 0, 0}, ScoreKind::W, 4};
  for (int i = 0; i < 5; ++i) {
    const auto rec = compute_anomaly_score(s, w, stats, 10);
    EXPECT_EQ(rec.score, 0.0);
    EXPECT_TRUE(rec.top_nodes.empty());
    EXPECT_EQ(rec.window_index, 4);
  }
}

TEST(ComputeAnomalyScore, TakesMaxOfChannelNorms) {
  // With history {0, 1} on every node (mean 0.5, std 0.5) a value v maps
  // to z = 2v - 1; pick values so that the channel L1s are 0.4, 0.2, 0.3, 0.5.
  NodeStats stats(1);
  const auto pair = [](double a, double b, ScoreKind k) { return DerivativePair{{a}, {b}, k, 0}; };
  compute_anomaly_score(pair(0, 0, ScoreKind::S), pair(0, 0, ScoreKind::W), stats, 1);
  compute_anomaly_score(pair(1, 1, ScoreKind::S), pair(1, 1, ScoreKind::W), stats, 1);
  const auto rec = compute_anomaly_score(pair(0.7, 0.6, ScoreKind::S), pair(0.65, 0.75, ScoreKind::W), stats, 1);
  EXPECT_NEAR(rec.l1_d1s, 0.4, 1e-12);
  EXPECT_NEAR(rec.l1_d2s, 0.2, 1e-12);
  EXPECT_NEAR(rec.l1_d1w, 0.3, 1e-12);
  EXPECT_NEAR(rec.l1_d2w, 0.5, 1e-12);
  EXPECT_NEAR(rec.score_s, 0.4, 1e-12);
  EXPECT_NEAR(rec.score_w, 0.5, 1e-12);
  EXPECT_NEAR(rec.score, 0.5, 1e-12);
  ASSERT_EQ(rec.top_nodes.size(), 1u);
  EXPECT_EQ(rec.top_nodes[0].channel, Channel::W2);
}

TEST(ComputeAnomalyScore, MetricSelection) {
  for (const auto metric : {MetricSet::S, MetricSet::W}) {
    NodeStats stats(1);
    const auto pair = [](double a, ScoreKind k) { return DerivativePair{{a}, {0.0}, k, 0}; };
    compute_anomaly_score(pair(0, ScoreKind::S), pair(0, ScoreKind::W), stats, 1, metric);
    compute_anomaly_score(pair(1, ScoreKind::S), pair(1, ScoreKind::W), stats, 1, metric);
    const auto rec = compute_anomaly_score(pair(5, ScoreKind::S), pair(2, ScoreKind::W), stats, 1, metric);
    EXPECT_EQ(rec.score, metric == MetricSet::S ? rec.score_s : rec.score_w);
    EXPECT_EQ(rec.top_nodes[0].channel, metric == MetricSet::S ? Channel::S1 : Channel::W1);
  }
}

TEST(Attribute, DominantNodeFirst) {
  auto z = channels(4);
  z[2][3] = -5.0;
  z[0][1] = 0.5;
  const auto top = attribute(z, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].node, 3u);
  EXPECT_EQ(top[0].channel, Channel::W1);
  EXPECT_DOUBLE_EQ(top[0].magnitude, 5.0);
  EXPECT_EQ(top[1].node, 1u);
}

TEST(Attribute, TiesGoToSmallerId) {
  auto z = channels(5);
  z[1][4] = 2.0;
  z[3][2] = -2.0;
  const auto top = attribute(z, 5);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].node, 2u);
  EXPECT_EQ(top[1].node, 4u);
}

TEST(AttributeProperty, PermutingNodesPermutesRanking) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + trial;
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<DerivativePair> s(3), w(3), ps(3), pw(3);
    NodeStats a(n), b(n);
    AnomalyRecord ra, rb;
    for (int t = 0; t < 3; ++t) {
      std::vector<double> v[4], pv[4];
      for (int c = 0; c < 4; ++c) {
        v[c].resize(n);
        pv[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) v[c][i] = g(rng);
        for (std::size_t i = 0; i < n; ++i) pv[c][perm[i]] = v[c][i];
      }
      ra = compute_anomaly_score({v[0], v[1], ScoreKind::S, t}, {v[2], v[3], ScoreKind::W, t}, a, 3);
      rb = compute_anomaly_score({pv[0], pv[1], ScoreKind::S, t}, {pv[2], pv[3], ScoreKind::W, t}, b, 3);
    }
    EXPECT_NEAR(ra.score, rb.score, 1e-9);
    ASSERT_EQ(ra.top_nodes.size(), rb.top_nodes.size());
    for (std::size_t i = 0; i < ra.top_nodes.size(); ++i) {
      EXPECT_EQ(perm[ra.top_nodes[i].node], rb.top_nodes[i].node);
    }
  }
}
