#pragma once

// Randomized checks of the inequalities satisfied by Orlicz functions and by
// the modulars of grid functions. Each check reports the number of violated
// samples and the worst normalized excess (lhs - rhs) / max(1, |lhs|, |rhs|).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "orlicz/grid_function.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/transforms.hpp"

namespace orlicz {

struct PropertyReport {
  std::string name;
  int trials = 0;
  int violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  bool pass() const { return violations == 0; }
};

namespace detail {

/// Records lhs <= rhs up to `slack` relative to max(1, |lhs|, |rhs|).
inline void record(PropertyReport& r, double lhs, double rhs, double slack) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  const double excess = (lhs - rhs) / scale;
  ++r.trials;
  r.worst = std::max(r.worst, excess);
  if (!(excess <= slack)) ++r.violations;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

}  // namespace detail

inline constexpr double kRoundoffSlack = 1e-12;

/// Pointwise inequalities for G, `trials` random samples each.
inline std::vector<PropertyReport> check_orlicz_properties(const OrliczFunction& G, int trials = 1000,
                                                           std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double C = G.doubling_constant(), p = G.upper_exponent(), q = G.lower_exponent();
  const double slack = kRoundoffSlack;
  std::vector<PropertyReport> out;

  PropertyReport sub{"subadditivity G(a+b) <= C/2 (G(a)+G(b))"};
  for (int i = 0; i < trials; ++i) {
    const double a = 100.0 * unit(rng), b = 100.0 * unit(rng);
    detail::record(sub, G(a + b), 0.5 * C * (G(a) + G(b)), slack);
  }
  out.push_back(sub);

  PropertyReport contr{"contraction G(ab) <= b G(a), b < 1"};
  for (int i = 0; i < trials; ++i) {
    const double a = detail::log_uniform(rng, 1e-4, 1e4), b = unit(rng);
    detail::record(contr, G(a * b), b * G(a), slack);
  }
  out.push_back(contr);

  PropertyReport lieber{"growth G(ab) <= a^p G(b), a >= 1"};
  for (int i = 0; i < trials; ++i) {
    const double a = detail::log_uniform(rng, 1.0, 1e3), b = detail::log_uniform(rng, 1e-4, 1e3);
    detail::record(lieber, G(a * b), std::pow(a, p) * G(b), slack);
  }
  out.push_back(lieber);

  for (double delta : {0.1, 1.0, 10.0}) {
    PropertyReport tri{"triangle G(a+b) <= C_delta G(a) + (1+delta)^p G(b), delta = " + std::to_string(delta)};
    const double kappa = std::ceil(std::log2(1.0 + 1.0 / delta));
    const double c_delta = std::pow(C, kappa);
    for (int i = 0; i < trials; ++i) {
      const double a = detail::log_uniform(rng, 1e-4, 1e3), b = detail::log_uniform(rng, 1e-4, 1e3);
      detail::record(tri, G(a + b), c_delta * G(a) + std::pow(1.0 + delta, p) * G(b), slack);
    }
    out.push_back(tri);
  }

  PropertyReport iter{"scaling t^{2q} G(a) <= G(at), t <= 1"};
  for (int i = 0; i < trials; ++i) {
    const double a = detail::log_uniform(rng, 1e-4, 1e4), t = 1.0 - unit(rng);
    detail::record(iter, std::pow(t, 2.0 * q) * G(a), G(a * t), slack);
  }
  out.push_back(iter);

  PropertyReport low{"lower bound min(a, a^{2q}) <= G(a) for normalized G"};
  const auto N = normalize(G);
  const double qn = N.lower_exponent();
  for (int i = 0; i < trials; ++i) {
    const double a = detail::log_uniform(rng, 1e-4, 1e4);
    detail::record(low, std::min(a, std::pow(a, 2.0 * qn)), N(a), slack);
  }
  out.push_back(low);

  PropertyReport young{"Young a t <= G(t) + G*(a)"};
  for (int i = 0; i < trials; ++i) {
    const double a = detail::log_uniform(rng, 1e-3, 1e3), t = detail::log_uniform(rng, 1e-3, 1e3);
    detail::record(young, a * t, G(t) + conjugate(G, a), slack);
  }
  out.push_back(young);

  PropertyReport conj{"conjugate G*(g(t)) <= (p-1) G(t)"};
  for (int i = 0; i < trials; ++i) {
    const double t = detail::log_uniform(rng, 1e-3, 1e3);
    detail::record(conj, conjugate(G, G.derivative(t)), (p - 1.0) * G(t), slack);
  }
  out.push_back(conj);
  return out;
}

/// Random W0 grid function on (left, right): piecewise-linear through
/// 3 to 9 random control values with zero ends, times a log-uniform amplitude.
inline GridFunction random_w0_function(std::mt19937_64& rng, double left, double right, std::size_t nodes) {
  std::uniform_int_distribution<int> count(3, 9);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const int m = count(rng);
  std::vector<double> ctrl(static_cast<std::size_t>(m) + 2, 0.0);
  for (int i = 1; i <= m; ++i) ctrl[static_cast<std::size_t>(i)] = val(rng);
  const double amp = detail::log_uniform(rng, 0.1, 10.0);
  const GridFunction coarse(left, right, ctrl);
  auto u = GridFunction::sample(left, right, nodes, [&](double x) { return amp * coarse(x); });
  std::vector<double> v(u.values().begin(), u.values().end());
  v.front() = v.back() = 0.0;
  return u.with_values(std::move(v));
}

struct GridPropertyOptions {
  std::vector<double> s_list{0.3, 0.6, 0.9};
  int functions = 50;
  std::size_t nodes = 257;
  double rel_tol = 1e-3;  ///< allowance for quadrature noise
  std::uint64_t seed = 7;
  QuadratureConfig quadrature{};
};

/// Modular inequalities (mollification, truncation, translation, the
/// gradient bound and the two-scale bound) on random functions on (-1, 1).
inline std::vector<PropertyReport> check_grid_properties(const OrliczFunction& G, const GridPropertyOptions& o = {}) {
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double C = G.doubling_constant();
  const double omega1 = 2.0;
  PropertyReport moll{"mollification Phi_s(u_eps) <= Phi_s(u)"};
  PropertyReport trunc{"truncation Phi_s(u_k) <= Phi_s(u) + C^2 (1/s + 1/(k(1-s))) Phi(u)"};
  PropertyReport comp{"translation Phi(tau_h u - u) <= 2^{2+s} C / omega_1 |h|^s Phi_s(u)"};
  PropertyReport grad{"gradient bound Phi_s(u) <= 2/(1-s) Phi(|u'|) + 4C/s Phi(u)"};
  PropertyReport two{"two-scale (1-s1) Phi_s1 <= 2^{1-s1} (1-s2) Phi_s2 + 4C(1-s1)/s1 Phi(u)"};
  for (int f = 0; f < o.functions; ++f) {
    const auto u = random_w0_function(rng, -1.0, 1.0, o.nodes);
    const double h = u.spacing();
    const double phi = modular(G, u), phi_grad = gradient_modular(G, u);
    std::vector<double> frac;
    for (double s : o.s_list) frac.push_back(fractional_modular(G, s, u, o.quadrature));
    const double eps = 2.0 * h + (0.2 - 2.0 * h) * unit(rng);
    const double k = 0.1 + 0.9 * unit(rng);
    const double shift = -0.5 + unit(rng);
    const auto ue = mollify(u, eps);
    const auto uk = truncate(u, k);
    const auto [tu, uu] = align(translate(u, shift), u);
    const double phi_shift = modular(G, tu - uu);
    for (std::size_t i = 0; i < o.s_list.size(); ++i) {
      const double s = o.s_list[i], fs = frac[i];
      const double tol = 1.0 + o.rel_tol;
      detail::record(moll, fractional_modular(G, s, ue, o.quadrature), tol * fs, 0.0);
      detail::record(trunc, fractional_modular(G, s, uk, o.quadrature),
                     tol * (fs + 0.5 * C * C * omega1 * (1.0 / s + 1.0 / (k * (1.0 - s))) * phi), 0.0);
      detail::record(comp, phi_shift, tol * std::pow(2.0, 2.0 + s) * C / omega1 * std::pow(std::abs(shift), s) * fs,
                     0.0);
      detail::record(grad, fs, tol * (omega1 / (1.0 - s) * phi_grad + 4.0 * C / s * phi), 0.0);
      for (std::size_t j = i + 1; j < o.s_list.size(); ++j) {
        const double s1 = s, s2 = o.s_list[j];
        detail::record(two, (1.0 - s1) * fs,
                       tol * (std::pow(2.0, 1.0 - s1) * (1.0 - s2) * frac[j] + 4.0 * C * (1.0 - s1) / s1 * phi), 0.0);
      }
    }
  }
  return {moll, trunc, comp, grad, two};
}

}  // namespace orlicz
