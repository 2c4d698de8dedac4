#pragma once

// Experiments around the nonlocal-to-local limit (1-s) Phi_{s,G}(u) ->
// Phi_{G~}(|u'|), the fractional Poincare inequality and the liminf
// inequality along sequences.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/grid_function.hpp"
#include "orlicz/limit_density.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

struct CurvePoint {
  double s;
  double scaled_modular;  ///< (1 - s) Phi_{s,G}(u)
};

struct LimitCurve {
  std::vector<CurvePoint> entries;
  double extrapolated_limit = 0.0;
  double target = 0.0;  ///< Phi_{G~}(|u'|)
};

inline void check_s_list(const std::vector<double>& s_list) {
  if (s_list.empty()) throw Error(ErrorKind::invalid_parameter, "s_list must not be empty");
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    check_fractional_s(s_list[i]);
    if (i > 0 && !(s_list[i] > s_list[i - 1]))
      throw Error(ErrorKind::invalid_parameter, "s_list must be strictly increasing");
  }
}

/// Phi_{G~}(|u'|) = sum_e h G~(|m_e|) with G~ the n = 1 limit density of G.
inline double limit_target(const OrliczFunction& G, const GridFunction& u) {
  const LimitDensity tilde(G, 1);
  double total = 0.0;
  for (std::size_t e = 0; e < u.elements(); ++e) total += u.spacing() * tilde(std::abs(u.slope(e)));
  return total;
}

/// Value at s = 1 of the line through the last two points, in the variable 1 - s.
inline double extrapolate_linear(const std::vector<CurvePoint>& pts) {
  if (pts.size() == 1) return pts.back().scaled_modular;
  const auto& a = pts[pts.size() - 2];
  const auto& b = pts.back();
  const double xa = 1.0 - a.s, xb = 1.0 - b.s;
  return b.scaled_modular - xb * (a.scaled_modular - b.scaled_modular) / (xa - xb);
}

inline LimitCurve bbm_curve(const OrliczFunction& G, const GridFunction& u, const std::vector<double>& s_list,
                            const QuadratureConfig& q = {}) {
  check_s_list(s_list);
  LimitCurve curve;
  for (double s : s_list) curve.entries.push_back({s, (1.0 - s) * fractional_modular(G, s, u, q)});
  curve.extrapolated_limit = extrapolate_linear(curve.entries);
  curve.target = limit_target(G, u);
  return curve;
}

struct PoincareReport {
  double ratio;           ///< Phi_G(u) / ((1 - s) Phi_{s,G}(u))
  double budget;          ///< 2 q s (d + 1)^{2 q s} / (n omega_n (1 - s)), n = 1
  double modular;         ///< Phi_G(u)
  double scaled_fractional;
  bool within() const { return ratio <= budget; }
};

inline double poincare_budget(const OrliczFunction& G, double s, double diameter) {
  const double q = G.lower_exponent();
  return 2.0 * q * s * std::pow(diameter + 1.0, 2.0 * q * s) / (sphere_area(1) * (1.0 - s));
}

inline PoincareReport poincare_check(const OrliczFunction& G, double s, const GridFunction& u,
                                     const QuadratureConfig& q = {}) {
  check_fractional_s(s);
  if (u.is_zero()) throw Error(ErrorKind::undefined_ratio, "poincare ratio is undefined for u = 0");
  const double phi = modular(G, u);
  const double frac = (1.0 - s) * fractional_modular(G, s, u, q);
  return {phi / frac, poincare_budget(G, s, u.right() - u.left()), phi, frac};
}

struct SequencePoint {
  int k;
  double s;
  double scaled_modular;  ///< (1 - s_k) Phi_{s_k,G}(u_k)
  double modular;         ///< Phi_G(u_k)
};

struct SequenceReport {
  std::vector<SequencePoint> points;
  double sup_scaled = 0.0;
  double sup_modular = 0.0;
  double target = 0.0;           ///< Phi_{G~}(|base'|)
  double liminf_estimate = 0.0;  ///< min of scaled_modular over the second half of the sequence
  double margin = 0.0;           ///< liminf_estimate - target
  bool holds(double tol = 1e-3) const { return margin >= -tol; }
};

/// u_k = base + perturbation / k paired with s_k = s_list[k - 1].
inline SequenceReport sequence_limit_demo(const OrliczFunction& G, const GridFunction& base,
                                          const GridFunction& perturbation, const std::vector<double>& s_list,
                                          const QuadratureConfig& q = {}) {
  check_s_list(s_list);
  SequenceReport rep;
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const auto uk = base.combine(1.0, perturbation, 1.0 / k);
    const double s = s_list[i];
    SequencePoint pt{k, s, (1.0 - s) * fractional_modular(G, s, uk, q), modular(G, uk)};
    rep.sup_scaled = std::max(rep.sup_scaled, pt.scaled_modular);
    rep.sup_modular = std::max(rep.sup_modular, pt.modular);
    rep.points.push_back(pt);
  }
  rep.target = limit_target(G, base);
  rep.liminf_estimate = std::numeric_limits<double>::infinity();
  for (std::size_t i = rep.points.size() / 2; i < rep.points.size(); ++i)
    rep.liminf_estimate = std::min(rep.liminf_estimate, rep.points[i].scaled_modular);
  rep.margin = rep.liminf_estimate - rep.target;
  return rep;
}

}  // namespace orlicz
