#pragma once

// Piecewise-linear functions on a uniform 1D mesh, extended by zero outside
// [left, right].

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/error.hpp"

namespace orlicz {

class GridFunction {
 public:
  GridFunction(double left, double right, std::vector<double> values)
      : left_(left), right_(right), values_(std::move(values)) {
    if (!(left_ < right_) || !std::isfinite(left_) || !std::isfinite(right_))
      throw Error(ErrorKind::invalid_input, "grid function: need finite left < right");
    if (values_.size() < 2) throw Error(ErrorKind::invalid_input, "grid function: need at least 2 nodes");
    for (double v : values_)
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "grid function: non-finite nodal value");
  }

  static GridFunction zero(double left, double right, std::size_t nodes) {
    return GridFunction(left, right, std::vector<double>(nodes, 0.0));
  }

  template <class F>
  static GridFunction sample(double left, double right, std::size_t nodes, F&& f) {
    std::vector<double> v(nodes);
    const double h = (right - left) / static_cast<double>(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) v[i] = f(left + h * static_cast<double>(i));
    return GridFunction(left, right, std::move(v));
  }

  double left() const { return left_; }
  double right() const { return right_; }
  std::size_t size() const { return values_.size(); }
  std::size_t elements() const { return values_.size() - 1; }
  double spacing() const { return (right_ - left_) / static_cast<double>(values_.size() - 1); }
  double node(std::size_t i) const { return left_ + spacing() * static_cast<double>(i); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Slope on element e = [x_e, x_{e+1}].
  double slope(std::size_t e) const { return (values_[e + 1] - values_[e]) / spacing(); }

  /// True when the boundary values vanish, i.e. the zero extension is continuous.
  bool in_zero_cone() const { return values_.front() == 0.0 && values_.back() == 0.0; }
  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  /// Value of the zero-extended interpolant at x.
  double operator()(double x) const {
    if (x < left_ || x > right_) return 0.0;
    const double h = spacing();
    const double t = (x - left_) / h;
    auto e = static_cast<std::size_t>(std::floor(t));
    if (e >= elements()) e = elements() - 1;
    const double xi = t - static_cast<double>(e);
    return (1.0 - xi) * values_[e] + xi * values_[e + 1];
  }

  GridFunction scaled(double c) const {
    auto v = values_;
    for (auto& x : v) x *= c;
    return GridFunction(left_, right_, std::move(v));
  }

  /// Same mesh spacing, extended by `extra_left` / `extra_right` zero nodes.
  GridFunction padded(std::size_t extra_left, std::size_t extra_right) const {
    const double h = spacing();
    std::vector<double> v(extra_left, 0.0);
    v.insert(v.end(), values_.begin(), values_.end());
    v.insert(v.end(), extra_right, 0.0);
    return GridFunction(left_ - h * static_cast<double>(extra_left), right_ + h * static_cast<double>(extra_right),
                        std::move(v));
  }

  bool same_mesh(const GridFunction& other) const {
    return size() == other.size() && std::abs(left_ - other.left_) <= 1e-12 * (1.0 + std::abs(left_)) &&
           std::abs(right_ - other.right_) <= 1e-12 * (1.0 + std::abs(right_));
  }

  /// a*this + b*other on a common mesh.
  GridFunction combine(double a, const GridFunction& other, double b) const {
    if (!same_mesh(other)) throw Error(ErrorKind::invalid_input, "grid functions live on different meshes");
    auto v = values_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * v[i] + b * other.values_[i];
    return GridFunction(left_, right_, std::move(v));
  }

  GridFunction with_values(std::vector<double> v) const { return GridFunction(left_, right_, std::move(v)); }

 private:
  double left_;
  double right_;
  std::vector<double> values_;
};

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) { return a.combine(1.0, b, 1.0); }
inline GridFunction operator-(const GridFunction& a, const GridFunction& b) { return a.combine(1.0, b, -1.0); }

/// Brings two functions with the same spacing and node-aligned meshes onto
/// a common padded mesh.
inline std::pair<GridFunction, GridFunction> align(const GridFunction& a, const GridFunction& b) {
  const double h = a.spacing();
  if (std::abs(h - b.spacing()) > 1e-12 * h) throw Error(ErrorKind::invalid_input, "align: spacings differ");
  const double shift = (b.left() - a.left()) / h;
  const double k = std::round(shift);
  if (std::abs(shift - k) > 1e-8) throw Error(ErrorKind::invalid_input, "align: meshes are not node-aligned");
  const double left = std::min(a.left(), b.left()), right = std::max(a.right(), b.right());
  auto pad = [&](const GridFunction& f) {
    const auto l = static_cast<std::size_t>(std::llround((f.left() - left) / h));
    const auto r = static_cast<std::size_t>(std::llround((right - f.right()) / h));
    return f.padded(l, r);
  };
  return {pad(a), pad(b)};
}

/// CSV with header `x,u`, 17 significant digits.
inline void write_csv(std::ostream& os, const GridFunction& u) {
  os << "x,u\n";
  char buf[64];
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u.node(i), u[i]);
    os << buf;
  }
}

inline GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,u", 0) != 0)
    throw Error(ErrorKind::invalid_input, "grid CSV: missing `x,u` header");
  std::vector<double> xs, us;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::invalid_input, "grid CSV: malformed row `" + line + "`");
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      us.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_input, "grid CSV: malformed row `" + line + "`");
    }
  }
  if (xs.size() < 2) throw Error(ErrorKind::invalid_input, "grid CSV: need at least 2 rows");
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - (xs.front() + h * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(h * i)))
      throw Error(ErrorKind::invalid_input, "grid CSV: mesh is not uniform");
  return GridFunction(xs.front(), xs.back(), std::move(us));
}

// Common test shapes.

/// Unit hat on (left, right) peaking at the midpoint with height `peak`.
inline GridFunction hat(double left, double right, std::size_t nodes, double peak = 1.0) {
  const double mid = 0.5 * (left + right), half = 0.5 * (right - left);
  return GridFunction::sample(left, right, nodes,
                              [&](double x) { return peak * std::max(0.0, 1.0 - std::abs(x - mid) / half); });
}

/// Smooth bump exp(-1/(1 - t^2)) rescaled to (left, right), peak `peak`.
inline GridFunction bump(double left, double right, std::size_t nodes, double peak = 1.0) {
  const double mid = 0.5 * (left + right), half = 0.5 * (right - left);
  return GridFunction::sample(left, right, nodes, [&](double x) {
    const double t = (x - mid) / half;
    if (std::abs(t) >= 1.0) return 0.0;
    return peak * std::exp(1.0 - 1.0 / (1.0 - t * t));
  });
}

}  // namespace orlicz
