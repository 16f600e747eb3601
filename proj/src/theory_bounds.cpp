#include "rankshift/theory_bounds.hpp"

#include <cmath>

#include "rankshift/errors.hpp"

namespace rankshift {

namespace {

double ratio(double c) { return c / (1.0 - c); }

}  // namespace

void ChangeProfile::validate() const {
  if (dm < 0.0 || d2m < 0.0) {
    throw InvalidConfig("change sizes must be nonnegative");
  }
  if (k < 1.0 || m_u < 1.0 || m < 1.0) {
    throw InvalidConfig("k, m_u and m must be at least 1");
  }
  if (!(dt > 0.0)) {
    throw InvalidConfig("dt must be positive");
  }
  if (!(c > 0.0 && c < 1.0)) {
    throw InvalidConfig("damping factor must lie in (0, 1)");
  }
}

double bound_structural_delta(double dm, double k) {
  if (k < 1.0) {
    throw InvalidConfig("k must be at least 1");
  }
  return 2.0 * dm / k;
}

WeightDeltaBounds bound_weight_delta(double dm, double m_u, double m) {
  if (m_u < 1.0 || m < m_u) {
    throw InvalidConfig("need 1 <= m_u <= m");
  }
  return {2.0 * dm / m_u, 2.0 * dm / m, 2.0 * dm / (m_u + dm), 2.0 * dm / (m + dm)};
}

WeightDeltaNorms weight_delta_norms(double dm, double m_u, double m_v, double m) {
  if (!(m_u + dm > 0.0) || m_v < 0.0 || m_v > m_u || m_u > m) {
    throw InvalidConfig("need m_u + dm > 0 and 0 <= m_v <= m_u <= m");
  }
  const double a = std::abs(dm);
  return {2.0 * a * (m_u - m_v) / (m_u * (m_u + dm)), 2.0 * a * (m - m_u) / (m * (m + dm))};
}

double bound_ps_first(double c, double l1_dAs, double dt) { return ratio(c) * l1_dAs / dt; }

double bound_ps_second(double c, double l1_dAs_old, double l1_dAs_new, double l1_diff, double dt) {
  const double r = ratio(c);
  return (r * l1_diff + r * r * (l1_dAs_new * l1_dAs_new + l1_dAs_old * l1_dAs_old)) / (dt * dt);
}

double bound_pw_first(double c, double l1_dAw, double l1_dbw, double dt) {
  return (ratio(c) * l1_dAw + l1_dbw) / dt;
}

double bound_pw_second(double ps2_max, double l1_db_diff, double l1_dAw_new, double l1_dbw_new,
                       double c, double dt) {
  return ps2_max + (l1_db_diff + ratio(c) * l1_dAw_new * l1_dbw_new) / (dt * dt);
}

DerivativeBounds bound_theorem_s(const ChangeProfile& p) {
  p.validate();
  const double r = ratio(p.c);
  const double g = 2.0 / p.k;
  const double v = p.dm / p.dt;
  const double a = p.d2m / (p.dt * p.dt);
  return {bound_ps_first(p.c, bound_structural_delta(p.dm, p.k), p.dt),
          r * g * a + 2.0 * r * r * g * g * v * v};
}

DerivativeBounds bound_theorem_w(const ChangeProfile& p) {
  p.validate();
  const double r = ratio(p.c);
  const double gk = 2.0 / p.k;
  const double gu = 2.0 / p.m_u;
  const double gm = 2.0 / p.m;
  const double v = p.dm / p.dt;
  const double a = p.d2m / (p.dt * p.dt);
  return {r * gu * v + gm * v, r * gk * a + gm * a + 2.0 * r * r * gk * gk * v * v + r * gu * gm * v * v};
}

}  // namespace rankshift
