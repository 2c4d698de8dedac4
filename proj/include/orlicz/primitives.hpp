#pragma once

// One-dimensional primitives that absorb the singular part of the fractional
// kernels:
//
//   H(c)   = int_0^c G(z) dz / z           = int_0^1 G(c v) dv / v
//   Q_a(c) = int_0^1 G(c w^a) dw           (a = 1 - s)
//
// and their first two derivatives in c. Closed forms are used when G is a
// sum of powers; otherwise the integrals are evaluated adaptively with the
// kinks of G as breakpoints.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

class KernelPrimitives {
 public:
  KernelPrimitives(OrliczFunction G, double alpha, quad::AdaptiveOptions opts = {1e-12, 1e-300, 4000})
      : G_(std::move(G)), alpha_(alpha), opts_(opts), powers_(power_terms(G_)) {}

  const OrliczFunction& function() const { return G_; }
  double alpha() const { return alpha_; }
  bool closed_form() const { return powers_.has_value(); }

  double H(double c) const {
    if (c <= 0.0) return 0.0;
    if (powers_) {
      double sum = 0.0;
      for (auto t : *powers_) sum += t.weight * std::pow(c, t.exponent) / t.exponent;
      return sum;
    }
    return quad::integrate_or_throw([&](double z) { return G_(z) / z; }, quad::breakpoints(0.0, c, G_.kinks()),
                                    opts_, "log-primitive of G");
  }
  double dH(double c) const { return c > 0.0 ? G_(c) / c : 0.0; }
  double d2H(double c) const {
    if (c <= 0.0) c = kTiny;
    return (G_.derivative(c) * c - G_(c)) / (c * c);
  }

  double Q(double c) const {
    if (c <= 0.0) return 0.0;
    if (powers_) {
      double sum = 0.0;
      for (auto t : *powers_) sum += t.weight * std::pow(c, t.exponent) / (t.exponent * alpha_ + 1.0);
      return sum;
    }
    return integrate_w([&](double w) { return G_(c * std::pow(w, alpha_)); }, c, "near-diagonal primitive");
  }
  double dQ(double c) const {
    if (c <= 0.0) return 0.0;
    if (powers_) {
      double sum = 0.0;
      for (auto t : *powers_)
        sum += t.weight * t.exponent * std::pow(c, t.exponent - 1.0) / (t.exponent * alpha_ + 1.0);
      return sum;
    }
    return integrate_w(
        [&](double w) {
          const double wa = std::pow(w, alpha_);
          return G_.derivative(c * wa) * wa;
        },
        c, "near-diagonal primitive derivative");
  }
  double d2Q(double c) const {
    if (c <= 0.0) c = kTiny;
    if (powers_) {
      double sum = 0.0;
      for (auto t : *powers_)
        sum += t.weight * t.exponent * (t.exponent - 1.0) * std::pow(c, t.exponent - 2.0) /
               (t.exponent * alpha_ + 1.0);
      return sum;
    }
    return integrate_w(
        [&](double w) {
          const double wa = std::pow(w, alpha_);
          return G_.second_derivative(c * wa) * wa * wa;
        },
        c, "near-diagonal primitive second derivative");
  }

 private:
  static constexpr double kTiny = 1e-150;

  template <class F>
  double integrate_w(F&& f, double c, const char* what) const {
    std::vector<double> cuts;
    for (double k : G_.kinks())
      if (k < c) cuts.push_back(std::pow(k / c, 1.0 / alpha_));
    return quad::integrate_or_throw(f, quad::breakpoints(0.0, 1.0, cuts), opts_, what);
  }

  OrliczFunction G_;
  double alpha_;
  quad::AdaptiveOptions opts_;
  std::optional<std::vector<PowerTerm>> powers_;
};

}  // namespace orlicz
