#pragma once

// Randomized single-node change streams and the inequalities they must
// satisfy. Observed derivatives come from the library's detector; matrix
// and start-vector norms come from the dense oracle.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rankshift/detector.hpp"
#include "rankshift/theory_bounds.hpp"

namespace oracle {

enum class ChangeKind { Structure, Weight };

/// Three unit windows: a base graph, then two changes at node u.
struct ChangeCase {
  ChangeKind kind;
  std::size_t n = 0;
  rankshift::NodeId u = 0;
  double dm1 = 0.0;
  double dm2 = 0.0;
  std::vector<rankshift::EdgeEvent> events;
  Matrix w0, w1, w2;  // weights after each window
};

namespace detail {

inline void emit(std::vector<rankshift::EdgeEvent>& out, Matrix& w, double t, rankshift::NodeId a,
                 rankshift::NodeId b, int count) {
  const int sign = count > 0 ? +1 : -1;
  for (int i = 0; i < std::abs(count); ++i) {
    out.push_back({t, a, b, sign, false});
  }
  w(a, b) += count;
}

inline Matrix random_base(std::mt19937_64& rng, ChangeCase& c, std::size_t k_u,
                          std::vector<rankshift::EdgeEvent>& out) {
  const auto n = static_cast<rankshift::NodeId>(c.n);
  Matrix w = Matrix::Zero(n, n);
  std::uniform_int_distribution<int> weight(1, 4);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double density = u01(rng);
  std::vector<rankshift::NodeId> others;
  for (rankshift::NodeId a = 0; a < n; ++a) {
    others.clear();
    for (rankshift::NodeId b = 0; b < n; ++b) {
      if (b != a) others.push_back(b);
    }
    std::shuffle(others.begin(), others.end(), rng);
    std::size_t degree = 0;
    if (a == c.u) {
      degree = k_u;
    } else if (u01(rng) > 0.15) {
      degree = 1 + static_cast<std::size_t>(density * u01(rng) * static_cast<double>(n - 2));
    }
    for (std::size_t i = 0; i < degree; ++i) {
      emit(out, w, 0.0, a, others[i], weight(rng));
    }
  }
  return w;
}

/// Moves dm of u's out-edges to nodes it did not link to before.
inline void reroute(std::mt19937_64& rng, ChangeCase& c, Matrix& w, double t, std::size_t dm) {
  std::vector<rankshift::NodeId> have, lack;
  for (rankshift::NodeId v = 0; v < c.n; ++v) {
    if (v == c.u) continue;
    (w(c.u, v) > 0 ? have : lack).push_back(v);
  }
  std::shuffle(have.begin(), have.end(), rng);
  std::shuffle(lack.begin(), lack.end(), rng);
  for (std::size_t i = 0; i < dm; ++i) {
    emit(c.events, w, t, c.u, have[i], -static_cast<int>(w(c.u, have[i])));
    emit(c.events, w, t, c.u, lack[i], 1);
  }
}

}  // namespace detail

inline ChangeCase structure_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ChangeCase c{ChangeKind::Structure};
  c.n = std::uniform_int_distribution<std::size_t>(3, 24)(rng);
  c.u = std::uniform_int_distribution<rankshift::NodeId>(0, static_cast<rankshift::NodeId>(c.n - 1))(rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, c.n - 2)(rng);
  const std::size_t room = std::min(k, c.n - 1 - k);
  Matrix w = detail::random_base(rng, c, k, c.events);
  c.w0 = w;
  const std::size_t dm1 = std::uniform_int_distribution<std::size_t>(1, room)(rng);
  detail::reroute(rng, c, w, 1.0, dm1);
  c.w1 = w;
  const std::size_t dm2 = std::uniform_int_distribution<std::size_t>(0, room)(rng);
  detail::reroute(rng, c, w, 2.0, dm2);
  c.w2 = w;
  c.dm1 = static_cast<double>(dm1);
  c.dm2 = static_cast<double>(dm2);
  return c;
}

/// Adds parallel events to one existing out-edge of u in both windows.
inline ChangeCase weight_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ChangeCase c{ChangeKind::Weight};
  c.n = std::uniform_int_distribution<std::size_t>(2, 24)(rng);
  c.u = std::uniform_int_distribution<rankshift::NodeId>(0, static_cast<rankshift::NodeId>(c.n - 1))(rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, c.n - 1)(rng);
  Matrix w = detail::random_base(rng, c, k, c.events);
  c.w0 = w;
  rankshift::NodeId v = c.u;
  while (v == c.u || w(c.u, v) == 0) {
    v = std::uniform_int_distribution<rankshift::NodeId>(0, static_cast<rankshift::NodeId>(c.n - 1))(rng);
  }
  const int dm1 = std::uniform_int_distribution<int>(1, 30)(rng);
  const int dm2 = std::uniform_int_distribution<int>(0, 30)(rng);
  detail::emit(c.events, w, 1.0, c.u, v, dm1);
  c.w1 = w;
  detail::emit(c.events, w, 2.0, c.u, v, dm2);
  c.w2 = w;
  c.dm1 = dm1;
  c.dm2 = dm2;
  return c;
}

/// One inequality lhs <= rhs.
struct BoundCheck {
  std::string name;
  double lhs;
  double rhs;
};

struct ObservedDerivatives {
  std::vector<double> d1_w1, d1_w2, d2_w2;  // window 1 first derivative, window 2 both
};

inline double l1(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

/// Runs the detector over the case at epsilon 1e-9 and records the raw
/// derivatives of the channel that matches the change kind.
inline ObservedDerivatives observe(const ChangeCase& c, double damping = 0.5) {
  rankshift::DetectorConfig cfg;
  cfg.solver = {damping, 1e-9, 100000};
  cfg.window_width = 1.0;
  cfg.warmup_windows = 0;
  cfg.reanchor_interval = 0;
  rankshift::AnomalyDetector det(c.n, cfg);
  rankshift::GraphStream stream(c.n, 1.0);
  ObservedDerivatives out;
  const auto cb = [&](const rankshift::SnapshotDelta& d, const rankshift::GraphState& g) {
    det.process(d, g);
    const auto& dp = c.kind == ChangeKind::Structure ? det.derivatives_s() : det.derivatives_w();
    if (d.window_index == 1) out.d1_w1 = dp.d1;
    if (d.window_index == 2) {
      out.d1_w2 = dp.d1;
      out.d2_w2 = dp.d2;
    }
  };
  for (const auto& e : c.events) stream.push(e, cb);
  stream.finish(cb);
  return out;
}

inline double effective_out_weight(const Matrix& w, rankshift::NodeId u) {
  const double m = w.row(u).sum();
  return m > 0 ? m : 1.0;
}

inline double effective_total(const Matrix& w) {
  double m = 0.0;
  for (Eigen::Index u = 0; u < w.rows(); ++u) m += effective_out_weight(w, static_cast<rankshift::NodeId>(u));
  return m;
}

/// Every derivative inequality applicable to the case, dt = 1.
inline std::vector<BoundCheck> bound_checks(const ChangeCase& c, const ObservedDerivatives& obs,
                                            double damping = 0.5) {
  using namespace rankshift;
  std::vector<BoundCheck> out;
  const double d1a = l1(obs.d1_w1), d1b = l1(obs.d1_w2), d2 = l1(obs.d2_w2);
  const ChangeProfile base{.dm = std::max(c.dm1, c.dm2),
                           .d2m = std::abs(c.dm2 - c.dm1),
                           .k = 1,
                           .m_u = 1,
                           .m = 1,
                           .dt = 1,
                           .c = damping};
  if (c.kind == ChangeKind::Structure) {
    const Matrix a0 = transition(c.w0, false), a1 = transition(c.w1, false), a2 = transition(c.w2, false);
    const double n1 = column_l1(a1 - a0), n2 = column_l1(a2 - a1), diff = column_l1(a2 - 2 * a1 + a0);
    const double k = (c.w0.row(c.u).array() > 0).count();
    out.push_back({"s d1 window1", d1a, bound_ps_first(damping, n1, 1.0)});
    out.push_back({"s d1 window2", d1b, bound_ps_first(damping, n2, 1.0)});
    out.push_back({"s d2", d2, bound_ps_second(damping, n1, n2, diff, 1.0)});
    auto p1 = base;
    p1.dm = c.dm1;
    p1.k = k;
    auto p2 = base;
    p2.dm = c.dm2;
    p2.k = k;
    auto pk = base;
    pk.k = k;
    out.push_back({"s change-size d1 window1", d1a, bound_theorem_s(p1).b1});
    out.push_back({"s change-size d1 window2", d1b, bound_theorem_s(p2).b1});
    out.push_back({"s change-size d2", d2, bound_theorem_s(pk).b2});
  } else {
    const Matrix a0 = transition(c.w0, true), a1 = transition(c.w1, true), a2 = transition(c.w2, true);
    const Vector b0 = weighted_start(c.w0), b1 = weighted_start(c.w1), b2 = weighted_start(c.w2);
    const double n1 = column_l1(a1 - a0), n2 = column_l1(a2 - a1), diff = column_l1(a2 - 2 * a1 + a0);
    const double db1 = (b1 - b0).lpNorm<1>(), db2 = (b2 - b1).lpNorm<1>();
    const double db_diff = (b2 - 2 * b1 + b0).lpNorm<1>();
    out.push_back({"w d1 window1", d1a, bound_pw_first(damping, n1, db1, 1.0)});
    out.push_back({"w d1 window2", d1b, bound_pw_first(damping, n2, db2, 1.0)});
    const double ps2 = bound_ps_second(damping, n1, n2, diff, 1.0);
    out.push_back({"w d2", d2, bound_pw_second(ps2, db_diff, n2, db2, damping, 1.0)});
    const double k = (c.w0.row(c.u).array() > 0).count();
    auto p1 = base;
    p1.dm = c.dm1;
    p1.k = k;
    p1.m_u = effective_out_weight(c.w0, c.u);
    p1.m = effective_total(c.w0);
    auto p2 = base;
    p2.dm = c.dm2;
    p2.k = k;
    p2.m_u = effective_out_weight(c.w1, c.u);
    p2.m = effective_total(c.w1);
    auto pk = p1;
    pk.dm = base.dm;
    out.push_back({"w change-size d1 window1", d1a, bound_theorem_w(p1).b1});
    out.push_back({"w change-size d1 window2", d1b, bound_theorem_w(p2).b1});
    out.push_back({"w change-size d2", d2, bound_theorem_w(pk).b2});
  }
  return out;
}

}  // namespace oracle
