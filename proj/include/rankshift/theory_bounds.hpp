#pragma once

namespace rankshift {

/// Size of a single-node change and its surroundings.
struct ChangeProfile {
  double dm = 0.0;   // Δm, edges touched by the change
  double d2m = 0.0;  // Δ²m, second difference of the change size
  double k = 1.0;    // distinct out-neighbours of the changed node
  double m_u = 1.0;  // out-weight of the changed node
  double m = 1.0;    // total weight of the graph
  double dt = 1.0;
  double c = 0.5;

  /// Throws InvalidConfig on negative sizes, k, m_u or m below 1, dt <= 0,
  /// or c outside (0, 1).
  void validate() const;
};

/// ||ΔA_s||₁ = 2Δm/k for a structure change of size Δm at a node with k
/// out-neighbours.
double bound_structural_delta(double dm, double k);

struct WeightDeltaBounds {
  double aw_bound;  // 2Δm/m_u
  double bw_bound;  // 2Δm/m
  double aw_exact;  // 2Δm/(m_u+Δm)
  double bw_exact;  // 2Δm/(m+Δm)
};

/// Bounds on ||ΔA_w||₁ and ||Δb_w||₁ for a weight change of size Δm.
WeightDeltaBounds bound_weight_delta(double dm, double m_u, double m);

struct WeightDeltaNorms {
  double aw;
  double bw;
};

/// Actual ||ΔA_w||₁ and ||Δb_w||₁ when Δm (possibly negative) is added to
/// edge u -> v, where v already carries m_v of u's out-weight m_u:
///   ||ΔA_w||₁ = 2|Δm|(m_u - m_v) / (m_u (m_u + Δm))
///   ||Δb_w||₁ = 2|Δm|(m - m_u) / (m (m + Δm))
/// Requires m_u + Δm > 0 and 0 <= m_v <= m_u <= m.
WeightDeltaNorms weight_delta_norms(double dm, double m_u, double m_v, double m);

/// (c/(1-c)) ||ΔA_s||₁ / dt
double bound_ps_first(double c, double l1_dAs, double dt);

/// ((c/(1-c)) ||ΔA_new - ΔA_old||₁ + (c/(1-c))² (||ΔA_new||₁² + ||ΔA_old||₁²)) / dt²
double bound_ps_second(double c, double l1_dAs_old, double l1_dAs_new, double l1_diff, double dt);

/// ((c/(1-c)) ||ΔA_w||₁ + ||Δb_w||₁) / dt
double bound_pw_first(double c, double l1_dAw, double l1_dbw, double dt);

/// ps2_max + (||Δb_new - Δb_old||₁ + (c/(1-c)) ||ΔA_w,new||₁ ||Δb_w,new||₁) / dt²,
/// with ps2_max the bound_ps_second value on the weighted deltas.
double bound_pw_second(double ps2_max, double l1_db_diff, double l1_dAw_new, double l1_dbw_new,
                       double c, double dt);

struct DerivativeBounds {
  double b1;  // bound on ||p'||₁
  double b2;  // bound on ||p''||₁
};

DerivativeBounds bound_theorem_s(const ChangeProfile& p);
DerivativeBounds bound_theorem_w(const ChangeProfile& p);

}  // namespace rankshift
