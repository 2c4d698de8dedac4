#pragma once

// Orlicz functions G: construction, evaluation of G, g = G' and g',
// structural constants, the complementary function G*, and numerical
// screening of the defining hypotheses.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

enum class Kind { power, power_log, power_abslog, weighted_sum, pointwise_max, composition, custom };

inline const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::power: return "power";
    case Kind::power_log: return "power_log";
    case Kind::power_abslog: return "power_abslog";
    case Kind::weighted_sum: return "weighted_sum";
    case Kind::pointwise_max: return "pointwise_max";
    case Kind::composition: return "composition";
    case Kind::custom: return "custom";
  }
  return "unknown";
}

/// Structural constants of an Orlicz function.
///   doubling:        C with G(2x) <= C G(x)
///   upper_exponent:  p with x g(x) <= p G(x)
///   lower_exponent:  q = log C / log 2, so that t^{2q} G(a) <= G(at) on [0, 1]
///   small_slope_sup: sup_{x in (0,1)} G(x) / x
struct Constants {
  double doubling = 0.0;
  double upper_exponent = 0.0;
  double lower_exponent = 0.0;
  double small_slope_sup = 0.0;
};

/// Callables backing a `custom` Orlicz function. `derivative` and
/// `second_derivative` may be empty; they then fall back to central
/// differences.
struct CustomOrlicz {
  std::string name = "custom";
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  std::vector<double> kinks;
};

class OrliczFunction;

namespace detail {

struct Node {
  Kind kind = Kind::power;
  std::vector<double> params;
  std::vector<OrliczFunction> parts;
  std::vector<double> weights;
  CustomOrlicz custom;
  Constants constants;
  std::vector<double> kinks;
  bool exact_constants = false;
};

}  // namespace detail

class OrliczFunction {
 public:
  /// G(t) for t >= 0.
  double operator()(double t) const;
  /// g(t) = G'(t), right derivative at kinks.
  double derivative(double t) const;
  /// g'(t); may be +inf at t = 0 when G grows slower than t^2.
  double second_derivative(double t) const;

  Kind kind() const { return node_->kind; }
  const std::vector<double>& params() const { return node_->params; }
  const std::vector<OrliczFunction>& parts() const { return node_->parts; }
  const std::vector<double>& weights() const { return node_->weights; }
  const Constants& constants() const { return node_->constants; }
  double doubling_constant() const { return node_->constants.doubling; }
  double upper_exponent() const { return node_->constants.upper_exponent; }
  double lower_exponent() const { return node_->constants.lower_exponent; }
  double small_slope_sup() const { return node_->constants.small_slope_sup; }
  bool exact_constants() const { return node_->exact_constants; }
  bool normalized() const { return std::abs((*this)(1.0) - 1.0) <= 1e-14; }
  /// Points where g jumps or G changes formula.
  const std::vector<double>& kinks() const { return node_->kinks; }

  std::string describe() const;

 private:
  explicit OrliczFunction(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;

  friend OrliczFunction make_from_node(detail::Node node);
};

namespace detail {

inline double central_difference(const std::function<double(double)>& f, double t) {
  const double h = std::max(1e-6, 1e-6 * t);
  if (t - h < 0.0) return (f(t + h) - f(t)) / h;
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline std::vector<double> log_grid(std::size_t count, double lo, double hi) {
  std::vector<double> grid(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return grid;
}

}  // namespace detail

/// Log-spaced screening grid on (1e-6, 1e6) with the kinks of G and their
/// immediate neighbours added.
inline std::vector<double> screening_grid(const OrliczFunction& G, std::size_t count = 512) {
  auto grid = detail::log_grid(count, 1e-6, 1e6);
  for (double k : G.kinks()) {
    for (double f : {1.0 - 1e-3, 1.0 - 1e-9, 1.0, 1.0 + 1e-9, 1.0 + 1e-3}) grid.push_back(k * f);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

inline constexpr double kSafetyFactor = 1.01;

/// Grid estimate of (C, p, q, small-slope sup), with the 1.01 safety factor
/// applied to C and p.
inline Constants estimate_constants(const OrliczFunction& G) {
  Constants c;
  double doubling = 0.0, upper = 0.0, slope = 0.0;
  for (double x : screening_grid(G)) {
    const double gx = G(x), g2x = G(2.0 * x), dx = G.derivative(x);
    if (!std::isfinite(gx) || !std::isfinite(g2x) || !std::isfinite(dx))
      throw Error(ErrorKind::invalid_function, "non-finite evaluation at t = " + std::to_string(x));
    if (gx > 0.0) {
      doubling = std::max(doubling, g2x / gx);
      upper = std::max(upper, x * dx / gx);
    }
    if (x < 1.0) slope = std::max(slope, gx / x);
  }
  // G(x)/x is nondecreasing for convex G, so the supremum on (0,1) is G(1-).
  const double at_one = G(1.0);
  if (std::isfinite(at_one)) slope = std::max(slope, at_one);
  c.doubling = kSafetyFactor * doubling;
  c.upper_exponent = kSafetyFactor * upper;
  c.lower_exponent = std::log(c.doubling) / std::log(2.0);
  c.small_slope_sup = slope;
  return c;
}

inline OrliczFunction make_from_node(detail::Node node) {
  return OrliczFunction(std::make_shared<const detail::Node>(std::move(node)));
}

// --- evaluation ----------------------------------------------------------

inline double OrliczFunction::operator()(double t) const {
  const auto& n = *node_;
  if (t <= 0.0) return 0.0;
  switch (n.kind) {
    case Kind::power: {
      const double p = n.params[0];
      if (p == 2.0) return t * t;
      if (p == 3.0) return t * t * t;
      return std::pow(t, p);
    }
    case Kind::power_log:
      return std::pow(t, n.params[0]) * (std::abs(std::log(t)) + 1.0);
    case Kind::power_abslog:
      return std::pow(t, n.params[0]) * std::abs(std::log(t));
    case Kind::weighted_sum: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n.parts.size(); ++i)
        if (n.weights[i] != 0.0) sum += n.weights[i] * n.parts[i](t);
      return sum;
    }
    case Kind::pointwise_max: {
      double best = 0.0;
      for (const auto& part : n.parts) best = std::max(best, part(t));
      return best;
    }
    case Kind::composition:
      return n.parts[0](n.parts[1](t));
    case Kind::custom:
      return n.custom.value(t);
  }
  return 0.0;
}

inline double OrliczFunction::derivative(double t) const {
  const auto& n = *node_;
  if (t < 0.0) return 0.0;
  switch (n.kind) {
    case Kind::power: {
      const double p = n.params[0];
      if (t == 0.0) return 0.0;
      if (p == 2.0) return 2.0 * t;
      if (p == 3.0) return 3.0 * t * t;
      return p * std::pow(t, p - 1.0);
    }
    case Kind::power_log: {
      if (t == 0.0) return 0.0;
      const double p = n.params[0], l = std::log(t), tp = std::pow(t, p - 1.0);
      return t < 1.0 ? tp * (p * (1.0 - l) - 1.0) : tp * (p * (1.0 + l) + 1.0);
    }
    case Kind::power_abslog: {
      if (t == 0.0) return 0.0;
      const double p = n.params[0], l = std::log(t), tp = std::pow(t, p - 1.0);
      return t < 1.0 ? -tp * (p * l + 1.0) : tp * (p * l + 1.0);
    }
    case Kind::weighted_sum: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n.parts.size(); ++i)
        if (n.weights[i] != 0.0) sum += n.weights[i] * n.parts[i].derivative(t);
      return sum;
    }
    case Kind::pointwise_max: {
      // Active branch; ties resolved to the larger slope (right derivative).
      double best = -1.0, slope = 0.0;
      for (const auto& part : n.parts) {
        const double v = part(t), d = part.derivative(t);
        if (v > best || (v == best && d > slope)) best = v, slope = d;
      }
      return slope;
    }
    case Kind::composition: {
      const double inner = n.parts[1](t);
      return n.parts[0].derivative(inner) * n.parts[1].derivative(t);
    }
    case Kind::custom:
      if (n.custom.derivative) return n.custom.derivative(t);
      return detail::central_difference(n.custom.value, t);
  }
  return 0.0;
}

inline double OrliczFunction::second_derivative(double t) const {
  const auto& n = *node_;
  if (t < 0.0) return 0.0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (n.kind) {
    case Kind::power: {
      const double p = n.params[0];
      if (t == 0.0) return p > 2.0 ? 0.0 : (p == 2.0 ? 2.0 : inf);
      return p * (p - 1.0) * std::pow(t, p - 2.0);
    }
    case Kind::power_log: {
      const double p = n.params[0];
      if (t == 0.0) return p > 2.0 ? 0.0 : inf;
      const double l = std::log(t), tp = std::pow(t, p - 2.0);
      return t < 1.0 ? tp * ((p - 1.0) * (p * (1.0 - l) - 1.0) - p)
                     : tp * ((p - 1.0) * (p * (1.0 + l) + 1.0) + p);
    }
    case Kind::power_abslog: {
      const double p = n.params[0];
      if (t == 0.0) return p > 2.0 ? 0.0 : inf;
      const double l = std::log(t), tp = std::pow(t, p - 2.0);
      const double body = (p - 1.0) * (p * l + 1.0) + p;
      return t < 1.0 ? -tp * body : tp * body;
    }
    case Kind::weighted_sum: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n.parts.size(); ++i)
        if (n.weights[i] != 0.0) sum += n.weights[i] * n.parts[i].second_derivative(t);
      return sum;
    }
    case Kind::pointwise_max: {
      double best = -1.0, slope = 0.0, curvature = 0.0;
      for (const auto& part : n.parts) {
        const double v = part(t), d = part.derivative(t);
        if (v > best || (v == best && d > slope)) best = v, slope = d, curvature = part.second_derivative(t);
      }
      return curvature;
    }
    case Kind::composition: {
      const auto& outer = n.parts[0];
      const auto& inner = n.parts[1];
      const double it = inner(t), d = inner.derivative(t);
      return outer.second_derivative(it) * d * d + outer.derivative(it) * inner.second_derivative(t);
    }
    case Kind::custom:
      if (n.custom.second_derivative) return n.custom.second_derivative(t);
      {
        const OrliczFunction self = *this;
        return detail::central_difference([self](double x) { return self.derivative(x); }, t);
      }
  }
  return 0.0;
}

inline std::string OrliczFunction::describe() const {
  const auto& n = *node_;
  std::ostringstream os;
  os.precision(17);
  switch (n.kind) {
    case Kind::power: os << "power(" << n.params[0] << ")"; break;
    case Kind::power_log: os << "power_log(" << n.params[0] << ")"; break;
    case Kind::power_abslog: os << "power_abslog(" << n.params[0] << ")"; break;
    case Kind::weighted_sum:
      os << "sum(";
      for (std::size_t i = 0; i < n.parts.size(); ++i)
        os << (i ? ", " : "") << n.weights[i] << "*" << n.parts[i].describe();
      os << ")";
      break;
    case Kind::pointwise_max:
      os << "max(";
      for (std::size_t i = 0; i < n.parts.size(); ++i) os << (i ? ", " : "") << n.parts[i].describe();
      os << ")";
      break;
    case Kind::composition:
      os << "compose(" << n.parts[0].describe() << ", " << n.parts[1].describe() << ")";
      break;
    case Kind::custom: os << n.custom.name; break;
  }
  return os.str();
}

// --- screening -----------------------------------------------------------

struct HypothesisCheck {
  bool pass = true;
  double worst_point = 0.0;      // sample point of the largest violation
  double worst_violation = 0.0;  // size of that violation (0 when passing)
};

struct OrliczReport {
  HypothesisCheck h1;  // G(0) = 0, nondecreasing, midpoint convex
  HypothesisCheck h2;  // G(2x) <= C G(x) with the stored C
  HypothesisCheck h3;  // G(x)/x strictly decreasing along x = 10^-k
  bool all_pass() const { return h1.pass && h2.pass && h3.pass; }
};

namespace detail {

inline void record(HypothesisCheck& check, double x, double violation) {
  if (violation > 0.0) {
    check.pass = false;
    if (violation > check.worst_violation) check.worst_violation = violation, check.worst_point = x;
  }
}

inline OrliczReport screen(const OrliczFunction& G, double doubling, std::size_t grid_size) {
  OrliczReport report;
  auto grid = screening_grid(G, grid_size);
  grid.insert(grid.begin(), 0.0);
  record(report.h1, 0.0, std::abs(G(0.0)));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1], b = grid[i];
    const double ga = G(a), gb = G(b);
    if (!std::isfinite(gb)) {
      record(report.h1, b, std::numeric_limits<double>::infinity());
      continue;
    }
    record(report.h1, b, (ga - gb) - 1e-12 * std::abs(ga));
    if (i + 1 < grid.size()) {
      const double c = grid[i + 1];
      const double mid = G(0.5 * (a + c));
      const double chord = 0.5 * (ga + G(c));
      record(report.h1, 0.5 * (a + c), (mid - chord) - 1e-12 * std::abs(chord));
    }
    const double g2 = G(2.0 * b);
    record(report.h2, b, g2 - doubling * gb - 1e-12 * std::abs(g2));
  }
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 8; ++k) {
    const double x = std::pow(10.0, -k);
    const double ratio = G(x) / x;
    if (!(ratio < previous)) record(report.h3, x, std::max(ratio - previous, std::numeric_limits<double>::min()));
    previous = ratio;
  }
  return report;
}

inline Constants combined_constants(const OrliczFunction& G, const std::vector<OrliczFunction>& parts,
                                    const std::vector<double>& weights) {
  Constants c;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!weights.empty() && weights[i] == 0.0) continue;
    c.doubling = std::max(c.doubling, parts[i].doubling_constant());
    c.upper_exponent = std::max(c.upper_exponent, parts[i].upper_exponent());
  }
  c.lower_exponent = std::log(c.doubling) / std::log(2.0);
  c.small_slope_sup = estimate_constants(G).small_slope_sup;
  return c;
}

inline void check_exponent(double p, const char* who) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw Error(ErrorKind::invalid_parameter, std::string(who) + ": exponent must be finite and > 1");
}

}  // namespace detail

/// Numerical screening of H1-H3 on `grid_size` log-spaced points plus kinks.
inline OrliczReport verify_orlicz(const OrliczFunction& G, std::size_t grid_size = 512) {
  if (grid_size < 16) throw Error(ErrorKind::invalid_parameter, "verify_orlicz: grid_size must be >= 16");
  return detail::screen(G, G.doubling_constant(), grid_size);
}

// --- constructors ----------------------------------------------------------

inline OrliczFunction make_power(double p) {
  detail::check_exponent(p, "power");
  detail::Node n;
  n.kind = Kind::power;
  n.params = {p};
  n.constants = {std::pow(2.0, p), p, p, 1.0};
  n.exact_constants = true;
  return make_from_node(std::move(n));
}

/// G(t) = t^p (|log t| + 1).
inline OrliczFunction make_power_log(double p) {
  detail::check_exponent(p, "power_log");
  detail::Node n;
  n.kind = Kind::power_log;
  n.params = {p};
  n.kinks = {1.0};
  auto tmp = make_from_node(n);
  n.constants = estimate_constants(tmp);
  return make_from_node(std::move(n));
}

/// G(t) = t^p |log t|. Not monotone near t = 1, hence not an Orlicz function;
/// provided for the closed-form limit density it admits.
inline OrliczFunction make_power_abslog(double p) {
  detail::check_exponent(p, "power_abslog");
  detail::Node n;
  n.kind = Kind::power_abslog;
  n.params = {p};
  n.kinks = {1.0};
  auto tmp = make_from_node(n);
  n.constants = estimate_constants(tmp);
  return make_from_node(std::move(n));
}

enum class CombineMode { sum, max };

namespace detail {

inline std::vector<double> crossing_points(const std::vector<OrliczFunction>& parts) {
  std::vector<double> out;
  const auto grid = log_grid(4096, 1e-6, 1e6);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      auto diff = [&](double t) { return parts[i](t) - parts[j](t); };
      for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double lo = grid[k], hi = grid[k + 1];
        double flo = diff(lo), fhi = diff(hi);
        if ((flo < 0.0) == (fhi < 0.0) || flo == 0.0) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = diff(mid);
          if ((fm < 0.0) == (flo < 0.0)) lo = mid, flo = fm;
          else hi = mid;
        }
        out.push_back(0.5 * (lo + hi));
      }
    }
  }
  return out;
}

inline std::vector<double> merged_kinks(const std::vector<OrliczFunction>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.kinks().begin(), p.kinks().end());
  return out;
}

inline void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

/// Weighted sum or pointwise maximum of Orlicz functions. For sums the
/// constants are max_i C_i and max_i p_i over the parts with positive weight;
/// the same bounds hold for maxima.
inline OrliczFunction make_combination(CombineMode mode, std::vector<OrliczFunction> parts,
                                       std::vector<double> weights = {}) {
  if (parts.empty()) throw Error(ErrorKind::invalid_parameter, "combination needs at least one part");
  detail::Node n;
  n.parts = parts;
  if (mode == CombineMode::sum) {
    if (weights.empty()) weights.assign(parts.size(), 1.0);
    if (weights.size() != parts.size())
      throw Error(ErrorKind::invalid_parameter, "sum: weights and parts differ in length");
    bool any = false;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw Error(ErrorKind::invalid_parameter, "sum: weights must be >= 0");
      any = any || w > 0.0;
    }
    if (!any) throw Error(ErrorKind::invalid_parameter, "sum: all weights are zero");
    n.kind = Kind::weighted_sum;
    n.weights = weights;
    n.kinks = detail::merged_kinks(parts);
  } else {
    n.kind = Kind::pointwise_max;
    n.kinks = detail::merged_kinks(parts);
    auto crossings = detail::crossing_points(parts);
    n.kinks.insert(n.kinks.end(), crossings.begin(), crossings.end());
  }
  detail::sort_unique(n.kinks);
  auto tmp = make_from_node(n);
  n.constants = detail::combined_constants(tmp, parts, n.weights);
  bool exact = true;
  for (const auto& p : parts) exact = exact && p.exact_constants();
  n.exact_constants = exact;
  auto result = make_from_node(std::move(n));
  if (mode == CombineMode::max && !verify_orlicz(result).h1.pass)
    throw Error(ErrorKind::invalid_function, "max: result is not monotone convex (H1 fails)");
  return result;
}

/// outer(inner(t)).
inline OrliczFunction make_composition(OrliczFunction outer, OrliczFunction inner) {
  detail::Node n;
  n.kind = Kind::composition;
  n.parts = {outer, inner};
  n.kinks = inner.kinks();
  auto tmp = make_from_node(n);
  n.constants = estimate_constants(tmp);
  return make_from_node(std::move(n));
}

inline OrliczFunction make_custom(CustomOrlicz custom) {
  if (!custom.value) throw Error(ErrorKind::invalid_parameter, "custom: value callable is empty");
  detail::Node n;
  n.kind = Kind::custom;
  n.kinks = custom.kinks;
  n.custom = std::move(custom);
  auto tmp = make_from_node(n);
  n.constants = estimate_constants(tmp);
  return make_from_node(std::move(n));
}

/// Custom function with explicitly supplied constants (used when the caller
/// knows them better than the grid estimate, e.g. a scaled power).
inline OrliczFunction make_custom(CustomOrlicz custom, const Constants& constants) {
  if (!custom.value) throw Error(ErrorKind::invalid_parameter, "custom: value callable is empty");
  detail::Node n;
  n.kind = Kind::custom;
  n.kinks = custom.kinks;
  n.custom = std::move(custom);
  n.constants = constants;
  return make_from_node(std::move(n));
}

/// G / G(1).
inline OrliczFunction normalize(const OrliczFunction& G) {
  if (G.normalized()) return G;
  const double at_one = G(1.0);
  if (!(at_one > 0.0) || !std::isfinite(at_one))
    throw Error(ErrorKind::invalid_function, "normalize: G(1) must be positive");
  return make_combination(CombineMode::sum, {G}, {1.0 / at_one});
}

/// Strict convexity screen: g strictly increasing along the screening grid.
inline bool strictly_convex_on_grid(const OrliczFunction& G) {
  const auto grid = detail::log_grid(256, 1e-6, 1e6);
  double prev = G.derivative(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = G.derivative(grid[i]);
    if (!(d > prev)) return false;
    prev = d;
  }
  return true;
}

// --- power decomposition ---------------------------------------------------

struct PowerTerm {
  double weight;
  double exponent;
};

/// G as a finite sum of weighted powers, when it is one (powers and weighted
/// sums of them).
inline std::optional<std::vector<PowerTerm>> power_terms(const OrliczFunction& G) {
  switch (G.kind()) {
    case Kind::power:
      return std::vector<PowerTerm>{{1.0, G.params()[0]}};
    case Kind::weighted_sum: {
      std::vector<PowerTerm> out;
      for (std::size_t i = 0; i < G.parts().size(); ++i) {
        if (G.weights()[i] == 0.0) continue;
        auto sub = power_terms(G.parts()[i]);
        if (!sub) return std::nullopt;
        for (auto t : *sub) out.push_back({t.weight * G.weights()[i], t.exponent});
      }
      return out;
    }
    default:
      return std::nullopt;
  }
}

// --- complementary function ------------------------------------------------

/// G*(a) = sup_{t>0} (a t - G(t)).
inline double conjugate(const OrliczFunction& G, double a) {
  if (!std::isfinite(a) || a < 0.0) throw Error(ErrorKind::invalid_parameter, "conjugate: a must be finite and >= 0");
  if (a == 0.0) return 0.0;
  auto objective = [&](double t) { return a * t - G(t); };
  double t = 1.0;
  int doublings = 0;
  while (objective(2.0 * t) >= objective(t)) {
    t *= 2.0;
    if (++doublings > 1000 || !std::isfinite(t))
      throw Error(ErrorKind::numeric_overflow, "conjugate: no maximizer bracket (G not superlinear?)");
  }
  const auto best = quad::golden_section_max(objective, 0.0, 2.0 * t, 1e-10);
  return std::max(best.value, 0.0);
}

}  // namespace orlicz
