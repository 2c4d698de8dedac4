#pragma once

// The limit density G~ of the nonlocal-to-local limit, sphere moments
// K_{n,p}, the s-dependent pre-limit curve and the explicit formulas
// available for powers, power-log functions and maxima of two powers.
//
// With tau = r^{1-s} the pre-limit (1-s) int_0^1 int_S G(a|z_n| r^{1-s}) dS dr/r
// becomes int_S H(a|z_n|) dS with H(c) = int_0^c G(z) dz / z, independent of s.
// tilde_eval uses that form; tilde_prelimit keeps the s-dependent one.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/primitives.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

/// Lebesgue measure of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw Error(ErrorKind::unsupported_dimension, "dimension must be 1, 2 or 3");
  }
}

/// n * omega_n, the area of the unit sphere S^{n-1}.
inline double sphere_area(int n) { return n * unit_ball_volume(n); }

namespace detail {

inline void check_dimension(int n) {
  if (n < 1 || n > 3) throw Error(ErrorKind::unsupported_dimension, "dimension must be 1, 2 or 3");
}

inline constexpr quad::AdaptiveOptions kSphereOpts{1e-13, 1e-300, 4000};

}  // namespace detail

/// int_{S^{n-1}} f(|w_n|) dS_w restricted to lo < |w_n| <= hi. `kinks` are
/// values of |w_n| where f is not smooth.
template <class F>
double sphere_integral(int n, F&& f, double lo = 0.0, double hi = 1.0, const std::vector<double>& kinks = {},
                       const quad::AdaptiveOptions& opts = detail::kSphereOpts) {
  detail::check_dimension(n);
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (hi <= lo) return 0.0;
  switch (n) {
    case 1:
      return (lo < 1.0 && hi >= 1.0) ? 2.0 * f(1.0) : 0.0;
    case 2: {
      // |w_2| = |sin theta|; four symmetric quarter arcs.
      std::vector<double> cuts;
      for (double k : kinks) cuts.push_back(std::asin(std::clamp(k, 0.0, 1.0)));
      const double value = quad::integrate_or_throw([&](double th) { return f(std::sin(th)); },
                                                    quad::breakpoints(std::asin(lo), std::asin(hi), cuts), opts,
                                                    "sphere integral (n = 2)");
      return 4.0 * value;
    }
    default: {
      // Polar angle phi with |w_3| = cos phi on the upper hemisphere.
      std::vector<double> cuts;
      for (double k : kinks) cuts.push_back(std::acos(std::clamp(k, 0.0, 1.0)));
      const double value = quad::integrate_or_throw(
          [&](double ph) { return f(std::cos(ph)) * std::sin(ph); },
          quad::breakpoints(std::acos(hi), std::acos(lo), cuts), opts, "sphere integral (n = 3)");
      return 4.0 * std::numbers::pi * value;
    }
  }
}

/// K_{n,p} = int_{S^{n-1}} |w_n|^p dS_w.
inline double sphere_moment(int n, double p) {
  detail::check_dimension(n);
  if (!std::isfinite(p) || p < 0.0) throw Error(ErrorKind::invalid_parameter, "sphere_moment: p must be >= 0");
  if (n == 1) return 2.0;
  return sphere_integral(n, [p](double t) { return std::pow(t, p); });
}

namespace detail {

// int_{lo < |w_n| <= hi} |w_n|^p dS and int |w_n|^p log|w_n| dS.
inline double partial_moment(int n, double p, double lo, double hi) {
  if (n == 3) {
    lo = std::clamp(lo, 0.0, 1.0), hi = std::clamp(hi, 0.0, 1.0);
    if (hi <= lo) return 0.0;
    return 4.0 * std::numbers::pi * (std::pow(hi, p + 1.0) - std::pow(lo, p + 1.0)) / (p + 1.0);
  }
  return sphere_integral(n, [p](double t) { return std::pow(t, p); }, lo, hi);
}

inline double partial_log_moment(int n, double p, double lo, double hi) {
  if (n == 1) return 0.0;
  if (n == 3) {
    lo = std::clamp(lo, 0.0, 1.0), hi = std::clamp(hi, 0.0, 1.0);
    if (hi <= lo) return 0.0;
    auto prim = [p](double t) {
      if (t <= 0.0) return 0.0;
      const double tp = std::pow(t, p + 1.0);
      return tp * (std::log(t) / (p + 1.0) - 1.0 / ((p + 1.0) * (p + 1.0)));
    };
    return 4.0 * std::numbers::pi * (prim(hi) - prim(lo));
  }
  return sphere_integral(n, [p](double t) { return t > 0.0 ? std::pow(t, p) * std::log(t) : 0.0; }, lo, hi);
}

inline void check_amplitude(double a) {
  if (!std::isfinite(a) || a < 0.0) throw Error(ErrorKind::invalid_parameter, "amplitude a must be finite and >= 0");
}

}  // namespace detail

/// G~(a) = int_{S^{n-1}} H(a |z_n|) dS_z, adaptive quadrature to relative
/// tolerance `rel_tol`.
inline double tilde_eval(const OrliczFunction& G, int n, double a, double rel_tol = 1e-10) {
  detail::check_dimension(n);
  detail::check_amplitude(a);
  if (a == 0.0) return 0.0;
  const KernelPrimitives prim(G, 1.0);
  std::vector<double> kinks;
  for (double k : G.kinks())
    if (k < a) kinks.push_back(k / a);
  return sphere_integral(n, [&](double t) { return prim.H(a * t); }, 0.0, 1.0, kinks, {rel_tol, 1e-300, 4000});
}

/// (1 - s) int_0^1 int_{S^{n-1}} G(a |z_n| r^{1-s}) dS_z dr / r, evaluated in
/// the radial variable y = -log r over (0, inf).
inline double tilde_prelimit(const OrliczFunction& G, int n, double a, double s, double rel_tol = 1e-10) {
  detail::check_dimension(n);
  detail::check_amplitude(a);
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_parameter, "tilde_prelimit: s must lie in (0, 1)");
  if (a == 0.0) return 0.0;
  const double alpha = 1.0 - s;
  const quad::AdaptiveOptions inner{rel_tol * 1e-2, 1e-300, 8000};
  auto radial = [&](double t) {
    const double c = a * t;
    if (c <= 0.0) return 0.0;
    // y = x / (1 - x) maps [0, 1) onto [0, inf).
    std::vector<double> cuts;
    for (double k : G.kinks())
      if (k < c) {
        const double y = std::log(c / k) / alpha;
        cuts.push_back(y / (1.0 + y));
      }
    auto integrand = [&](double x) {
      const double y = x / (1.0 - x);
      const double jac = 1.0 / ((1.0 - x) * (1.0 - x));
      return G(c * std::exp(-alpha * y)) * jac;
    };
    return quad::integrate_or_throw(integrand, quad::breakpoints(0.0, 1.0, cuts), inner, "pre-limit radial integral");
  };
  std::vector<double> kinks;
  for (double k : G.kinks())
    if (k < a) kinks.push_back(k / a);
  return alpha * sphere_integral(n, radial, 0.0, 1.0, kinks, {rel_tol, 1e-300, 4000});
}

enum class ClosedFormKind { power, power_abslog, power_log, max_powers };

/// Explicit G~ formulas.
///   power:        params {p},    G = t^p
///   power_abslog: params {p},    G = t^p |log t|
///   power_log:    params {p},    G = t^p (|log t| + 1)
///   max_powers:   params {q, p}, G = max(t^q, t^p), 1 < q < p
/// The power_abslog formula a^p/p (K |log a| + K_log + K/p) holds for a <= 1;
/// for a > 1 the sphere splits at |w_n| = 1/a where log(a|w_n|) changes sign.
inline double tilde_closed_form(ClosedFormKind kind, const std::vector<double>& params, int n, double a) {
  detail::check_dimension(n);
  detail::check_amplitude(a);
  if (a == 0.0) return 0.0;
  auto need = [&](std::size_t count) {
    if (params.size() != count) throw Error(ErrorKind::invalid_parameter, "tilde_closed_form: wrong parameter count");
  };
  switch (kind) {
    case ClosedFormKind::power: {
      need(1);
      const double p = params[0];
      return std::pow(a, p) / p * detail::partial_moment(n, p, 0.0, 1.0);
    }
    case ClosedFormKind::power_abslog: {
      need(1);
      const double p = params[0];
      const double ap = std::pow(a, p), la = std::log(a);
      const double split = a > 1.0 ? 1.0 / a : 1.0;
      const double m_lo = detail::partial_moment(n, p, 0.0, split);
      const double m_hi = detail::partial_moment(n, p, split, 1.0);
      const double l_lo = detail::partial_log_moment(n, p, 0.0, split);
      const double l_hi = detail::partial_log_moment(n, p, split, 1.0);
      const double m0_hi = detail::partial_moment(n, 0.0, split, 1.0);
      // H(c) = c^p |log c| / p + (c <= 1 ? c^p : 2 - c^p) / p^2, integrated over the sphere.
      const double log_part = ap / p * (-la * m_lo - l_lo + la * m_hi + l_hi);
      const double rest = (ap * m_lo + 2.0 * m0_hi - ap * m_hi) / (p * p);
      return log_part + rest;
    }
    case ClosedFormKind::power_log: {
      need(1);
      return tilde_closed_form(ClosedFormKind::power_abslog, params, n, a) +
             tilde_closed_form(ClosedFormKind::power, params, n, a);
    }
    case ClosedFormKind::max_powers: {
      need(2);
      const double q = params[0], p = params[1];
      if (!(q > 1.0 && p > q)) throw Error(ErrorKind::invalid_parameter, "max_powers requires 1 < q < p");
      if (a <= 1.0) return detail::partial_moment(n, q, 0.0, 1.0) * std::pow(a, q) / q;
      const double split = 1.0 / a;
      return std::pow(a, q) / q * detail::partial_moment(n, q, 0.0, split) +
             std::pow(a, p) / p * detail::partial_moment(n, p, split, 1.0) +
             (1.0 / q - 1.0 / p) * detail::partial_moment(n, 0.0, split, 1.0);
    }
  }
  throw Error(ErrorKind::invalid_parameter, "tilde_closed_form: unsupported kind");
}

/// Closed-form G~(a) for G built from the explicit families by nonnegative
/// weighted sums; nullopt when no explicit formula applies.
inline std::optional<double> tilde_closed_form_for(const OrliczFunction& G, int n, double a) {
  switch (G.kind()) {
    case Kind::power:
      return tilde_closed_form(ClosedFormKind::power, G.params(), n, a);
    case Kind::power_abslog:
      return tilde_closed_form(ClosedFormKind::power_abslog, G.params(), n, a);
    case Kind::power_log:
      return tilde_closed_form(ClosedFormKind::power_log, G.params(), n, a);
    case Kind::pointwise_max: {
      const auto& parts = G.parts();
      if (parts.size() != 2 || parts[0].kind() != Kind::power || parts[1].kind() != Kind::power) return std::nullopt;
      double q = parts[0].params()[0], p = parts[1].params()[0];
      if (q > p) std::swap(q, p);
      if (q == p) return tilde_closed_form(ClosedFormKind::power, {p}, n, a);
      return tilde_closed_form(ClosedFormKind::max_powers, {q, p}, n, a);
    }
    case Kind::weighted_sum: {
      double sum = 0.0;
      for (std::size_t i = 0; i < G.parts().size(); ++i) {
        if (G.weights()[i] == 0.0) continue;
        auto part = tilde_closed_form_for(G.parts()[i], n, a);
        if (!part) return std::nullopt;
        sum += G.weights()[i] * *part;
      }
      return sum;
    }
    default:
      return std::nullopt;
  }
}

/// Lower and upper equivalence constants c1 G <= G~ <= c2 G:
/// c1 = K_{n,2q} / (2q), c2 = n omega_n.
struct EquivalenceConstants {
  double lower;
  double upper;
};

inline EquivalenceConstants equivalence_constants(const OrliczFunction& G, int n) {
  const double q = G.lower_exponent();
  return {sphere_moment(n, 2.0 * q) / (2.0 * q), sphere_area(n)};
}

enum class Backing { closed_form, quadrature };

/// G~ for a fixed base function and dimension.
class LimitDensity {
 public:
  LimitDensity(OrliczFunction base, int n) : base_(std::move(base)), n_(n), prim_(base_, 1.0) {
    detail::check_dimension(n_);
    backing_ = tilde_closed_form_for(base_, n_, 1.0) ? Backing::closed_form : Backing::quadrature;
  }
  LimitDensity(OrliczFunction base, int n, Backing backing) : LimitDensity(std::move(base), n) {
    if (backing == Backing::closed_form && backing_ != Backing::closed_form)
      throw Error(ErrorKind::invalid_parameter, "no closed form for " + base_.describe());
    backing_ = backing;
  }

  const OrliczFunction& base() const { return base_; }
  int dimension() const { return n_; }
  Backing backing() const { return backing_; }

  double operator()(double a) const {
    detail::check_amplitude(a);
    if (a == 0.0) return 0.0;
    if (backing_ == Backing::closed_form) return *tilde_closed_form_for(base_, n_, a);
    return tilde_eval(base_, n_, a);
  }

  /// G~'(a) = int_S G(a|w_n|) / a dS.
  double derivative(double a) const {
    if (a <= 0.0) return 0.0;
    return sphere_integral(n_, [&](double t) { return base_(a * t) / a; }, 0.0, 1.0, scaled_kinks(a));
  }

  /// G~''(a) = int_S |w_n|^2 H''(a|w_n|) dS.
  double second_derivative(double a) const {
    if (a <= 0.0) a = 1e-150;
    return sphere_integral(n_, [&](double t) { return t * t * prim_.d2H(a * t); }, 0.0, 1.0, scaled_kinks(a));
  }

  /// G~ packaged as an Orlicz function. It inherits the doubling constant and
  /// upper exponent of the base function.
  OrliczFunction as_orlicz() const {
    if (auto terms = power_terms(base_)) {
      std::vector<OrliczFunction> parts;
      std::vector<double> weights;
      for (auto t : *terms) {
        parts.push_back(make_power(t.exponent));
        weights.push_back(t.weight * sphere_moment(n_, t.exponent) / t.exponent);
      }
      return make_combination(CombineMode::sum, parts, weights);
    }
    auto self = std::make_shared<const LimitDensity>(*this);
    CustomOrlicz custom;
    custom.name = "tilde(" + base_.describe() + ", n=" + std::to_string(n_) + ")";
    custom.value = [self](double a) { return (*self)(a); };
    custom.derivative = [self](double a) { return self->derivative(a); };
    custom.second_derivative = [self](double a) { return self->second_derivative(a); };
    Constants c;
    c.doubling = base_.doubling_constant();
    c.upper_exponent = base_.upper_exponent();
    c.lower_exponent = base_.lower_exponent();
    c.small_slope_sup = (*self)(1.0);
    return make_custom(std::move(custom), c);
  }

 private:
  std::vector<double> scaled_kinks(double a) const {
    std::vector<double> out;
    for (double k : base_.kinks())
      if (k < a) out.push_back(k / a);
    return out;
  }

  OrliczFunction base_;
  int n_;
  KernelPrimitives prim_;
  Backing backing_ = Backing::quadrature;
};

}  // namespace orlicz
