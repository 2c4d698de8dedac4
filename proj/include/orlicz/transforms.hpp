#pragma once

// Translation, mollification and truncation of grid functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/grid_function.hpp"

namespace orlicz {

/// tau_h u(x) = u(x + h) on a mesh with the same spacing that covers
/// supp u and supp u - h. Values at nodes that do not land on the original
/// mesh are linearly interpolated.
inline GridFunction translate(const GridFunction& u, double h) {
  const double width = u.right() - u.left();
  if (!(std::abs(h) < width)) throw Error(ErrorKind::invalid_parameter, "translate: need |h| < right - left");
  const double dx = u.spacing();
  const auto extra_left = static_cast<std::size_t>(std::ceil(std::max(h, 0.0) / dx - 1e-9));
  const auto extra_right = static_cast<std::size_t>(std::ceil(std::max(-h, 0.0) / dx - 1e-9));
  const GridFunction mesh = u.padded(extra_left, extra_right);
  std::vector<double> v(mesh.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = mesh.node(i) + h;
    // Snap to the original nodes to avoid interpolation roundoff on aligned shifts.
    const double t = (x - u.left()) / dx;
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9 && r >= 0.0 && r < static_cast<double>(u.size()))
      v[i] = u[static_cast<std::size_t>(r)];
    else
      v[i] = u(x);
  }
  return mesh.with_values(std::move(v));
}

/// Standard bump exp(-1/(1 - x^2)) on (-1, 1), unnormalized.
inline double bump_profile(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

/// u * rho_eps as a discrete convolution: the kernel is sampled at the mesh
/// offsets j h with |j h| < eps and renormalized to unit mass, so u_eps is an
/// exact convex combination of node-aligned translates of u. The output mesh
/// is padded by ceil(eps / h) nodes on each side. When eps is below one mesh
/// spacing u is returned unchanged and a warning is appended to `warnings`.
inline GridFunction mollify(const GridFunction& u, double eps, std::vector<std::string>* warnings = nullptr) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::invalid_parameter, "mollify: eps must be positive");
  const double h = u.spacing();
  if (eps <= h) {
    if (warnings) warnings->push_back("degenerate mollifier: eps is not larger than the mesh spacing");
    return u;
  }
  const auto m = static_cast<std::size_t>(std::ceil(eps / h));
  std::vector<double> w(2 * m + 1);
  double mass = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double offset = (static_cast<double>(j) - static_cast<double>(m)) * h;
    w[j] = bump_profile(offset / eps);
    mass += w[j];
  }
  for (auto& x : w) x /= mass;
  const GridFunction mesh = u.padded(m, m);
  const auto src = mesh.values();
  std::vector<double> out(mesh.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      // u_eps(x_i) = sum_j w_j u(x_i - (j - m) h)
      const auto k = static_cast<std::ptrdiff_t>(i) - (static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(m));
      if (k >= 0 && k < static_cast<std::ptrdiff_t>(src.size())) acc += w[j] * src[static_cast<std::size_t>(k)];
    }
    out[i] = acc;
  }
  return mesh.with_values(std::move(out));
}

/// Cutoff eta_k: 1 on [-k, k], 0 outside (-2k, 2k), linear in between
/// (|eta_k'| = 1/k).
inline double cutoff(double x, double k) { return std::clamp((2.0 * k - std::abs(x)) / k, 0.0, 1.0); }

/// u_k = eta_k u, taken nodewise.
inline GridFunction truncate(const GridFunction& u, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::invalid_parameter, "truncate: k must be positive");
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cutoff(u.node(i), k) * u[i];
  return u.with_values(std::move(v));
}

}  // namespace orlicz
