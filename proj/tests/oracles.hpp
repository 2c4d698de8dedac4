#pragma once

// Independent reference computations used by the tests. Nothing here shares
// quadrature code with the library.

#include <cmath>
#include <functional>
#include <vector>

#include "orlicz/grid_function.hpp"
#include "orlicz/orlicz_function.hpp"

namespace oracle {

/// Dense midpoint sum for iint G(|u(x)-u(y)|/|x-y|^s) dx dy/|x-y| written as
/// 2 int_0^inf int G(|u(x+t)-u(x)| t^{-s}) dx dt/t. The t-integral runs in
/// log t on (1e-10 D, 1e12 D); x is uniform over [left - t, right] while the
/// supports of u(x) and u(x+t) overlap and over the support otherwise.
inline double brute_fractional(const orlicz::OrliczFunction& G, double s, const orlicz::GridFunction& u,
                               int t_cells = 2000, int x_cells = 2000) {
  const double L = u.left(), R = u.right(), D = R - L;
  const double lt0 = std::log(1e-10 * D), lt1 = std::log(1e12 * D);
  const double dtau = (lt1 - lt0) / t_cells;
  double total = 0.0;
  for (int k = 0; k < t_cells; ++k) {
    const double t = std::exp(lt0 + (k + 0.5) * dtau);
    const double ts = std::pow(t, -s);
    double inner = 0.0;
    if (t < D) {
      const double a = L - t, b = R, dx = (b - a) / x_cells;
      for (int i = 0; i < x_cells; ++i) {
        const double x = a + (i + 0.5) * dx;
        inner += G(std::abs(u(x + t) - u(x)) * ts);
      }
      inner *= dx;
    } else {
      const double dx = D / x_cells;
      for (int i = 0; i < x_cells; ++i) inner += G(std::abs(u(L + (i + 0.5) * dx)) * ts);
      inner *= 2.0 * dx;
    }
    total += inner * dtau;
  }
  return 2.0 * total;
}

/// Central difference of f at x with step h.
inline double central(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Plain composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace oracle
