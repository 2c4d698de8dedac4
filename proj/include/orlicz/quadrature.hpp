#pragma once

// Fixed Gauss-Legendre rules, a globally adaptive Gauss-Kronrod integrator,
// and golden-section maximization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "orlicz/error.hpp"

namespace orlicz::quad {

/// Gauss-Legendre rule mapped to [0, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline Rule build_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 0.5 * w;
  }
  return rule;
}

}  // namespace detail

inline constexpr int kMaxGaussOrder = 64;

/// Cached n-point Gauss-Legendre rule on [0, 1], 1 <= n <= 64.
inline const Rule& gauss_legendre(int n) {
  static const std::vector<Rule> rules = [] {
    std::vector<Rule> r(kMaxGaussOrder + 1);
    for (int k = 1; k <= kMaxGaussOrder; ++k) r[k] = detail::build_gauss_legendre(k);
    return r;
  }();
  if (n < 1 || n > kMaxGaussOrder)
    throw Error(ErrorKind::invalid_parameter, "Gauss order must lie in [1, 64]");
  return rules[n];
}

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_intervals = 4000;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

namespace detail {

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

// Kronrod 21 / Gauss 10 pair from Boost's node tables; the error estimate is
// |K - G| (Boost's own estimate does not shrink fast enough near integrable
// log singularities).
template <class F>
Piece gk21(F& f, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  static const auto& ka = gauss_kronrod<double, 21>::abscissa();
  static const auto& kw = gauss_kronrod<double, 21>::weights();
  static const auto& gw = gauss<double, 10>::weights();
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  const double f0 = f(c);
  double k = kw[0] * f0, g = 0.0;
  for (std::size_t i = 1; i < ka.size(); ++i) {
    const double fs = f(c - r * ka[i]) + f(c + r * ka[i]);
    k += kw[i] * fs;
    if (i % 2 == 1) g += gw[i / 2] * fs;
  }
  return {a, b, r * k, r * std::abs(k - g)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21 point) quadrature over the pieces
/// delimited by `breaks` (sorted, at least two entries). Never throws; check
/// `converged`.
template <class F>
Integral integrate_pieces(F&& f, const std::vector<double>& breaks, const AdaptiveOptions& opts = {}) {
  std::priority_queue<detail::Piece> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto piece = detail::gk21(f, breaks[i], breaks[i + 1]);
    total += piece.value;
    total_err += piece.error;
    heap.push(piece);
  }
  std::size_t count = heap.size();
  while (!heap.empty() && total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (count >= opts.max_intervals) return {total, total_err, false};
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) return {total, total_err, false};
    auto left = detail::gk21(f, worst.a, mid);
    auto right = detail::gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  return {total, std::max(total_err, 0.0), true};
}

template <class F>
Integral integrate(F&& f, double a, double b, const AdaptiveOptions& opts = {}) {
  return integrate_pieces(std::forward<F>(f), std::vector<double>{a, b}, opts);
}

/// Like integrate_pieces but raises ToleranceError when the target is missed.
template <class F>
double integrate_or_throw(F&& f, const std::vector<double>& breaks, const AdaptiveOptions& opts,
                          const char* what) {
  const auto r = integrate_pieces(std::forward<F>(f), breaks, opts);
  if (!r.converged || !std::isfinite(r.value)) throw ToleranceError(what, r.value, r.error);
  return r.value;
}

/// Breakpoint list over [a, b] with the interior points of `kinks` inserted.
inline std::vector<double> breakpoints(double a, double b, const std::vector<double>& kinks = {}) {
  std::vector<double> out{a};
  for (double k : kinks)
    if (k > a && k < b) out.push_back(k);
  out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Maximum {
  double argmax;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
Maximum golden_section_max(F&& f, double lo, double hi, double rel_tol = 1e-10) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double width0 = hi - lo;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > rel_tol * width0) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  Maximum best{c, fc};
  if (fd > best.value) best = {d, fd};
  return best;
}

}  // namespace orlicz::quad
