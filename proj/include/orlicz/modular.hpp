#pragma once

// Modulars of piecewise-linear grid functions:
//
//   Phi_G(u)      = int G(|u|)
//   Phi_G(|u'|)   = sum_e h G(|m_e|)
//   Phi_{s,G}(u)  = iint G(|u(x) - u(y)| / |x - y|^s) dx dy / |x - y|      (n = 1)
//
// The fractional modular is assembled from fixed quadrature rules, so the
// discrete value is a smooth function of the nodal values and its gradient,
// Hessian and pairings are exact derivatives of that same discrete value.
// Every contribution has the form weight * F(|l . u|) with F one of G, H, Q
// (see primitives.hpp) and l a linear form touching at most four nodes:
//
//   same element           (2h/a) H(|m| h^a) - 2h Q(|m| h^a)        a = 1 - s
//   adjacent, a + b <= h   2h W_w Q(|m_e w + m_{e+1}(1 - w)| h^a)
//   adjacent, a + b > h    Duffy-mapped tensor Gauss of G(|D|) / r
//   distant elements       tensor Gauss of G(|D|) / r
//   one point outside      (2/s) int [H(|u| d_L^{-s}) + H(|u| d_R^{-s})] dx

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "orlicz/error.hpp"
#include "orlicz/grid_function.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/parallel.hpp"
#include "orlicz/primitives.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

/// Quadrature rules for the fractional modular. The far field is integrated
/// exactly through the primitive H, so no tail cutoff is needed.
struct QuadratureConfig {
  int near_diagonal_order = 8;  ///< Gauss points per direction for nearby element pairs
  int far_order = 4;            ///< Gauss points per direction beyond `near_band`
  int near_band = 4;            ///< element distance up to which `near_diagonal_order` is used
  double rel_tol = 1e-4;        ///< target checked when `estimate_error` is set
  double abs_tol = 1e-14;
  bool estimate_error = false;  ///< compare against a refined rule and throw on miss

  void validate() const {
    if (near_diagonal_order < 1 || near_diagonal_order > quad::kMaxGaussOrder || far_order < 1 ||
        far_order > quad::kMaxGaussOrder || near_band < 1)
      throw Error(ErrorKind::invalid_parameter, "quadrature orders must lie in [1, 64] and near_band >= 1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw Error(ErrorKind::invalid_parameter, "quadrature tolerances must be positive");
  }

  QuadratureConfig refined() const {
    QuadratureConfig r = *this;
    r.near_diagonal_order = std::min(quad::kMaxGaussOrder, near_diagonal_order + 4);
    r.far_order = std::min(quad::kMaxGaussOrder, far_order + 4);
    r.near_band = 2 * near_band;
    r.estimate_error = false;
    return r;
  }
};

inline void check_fractional_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_parameter, "s must lie in (0, 1)");
}

/// Which one-dimensional profile a term evaluates.
enum class Profile : std::uint8_t { G, H, Q };

/// weight * F(|z|), z = sum_k coef[k] u[idx[k]].
struct Term {
  Profile profile;
  int len;
  double weight;
  std::array<std::size_t, 4> idx;
  std::array<double, 4> coef;

  double apply(std::span<const double> u) const {
    double z = 0.0;
    for (int k = 0; k < len; ++k) z += coef[k] * u[idx[k]];
    return z;
  }
};

class FractionalAssembler {
 public:
  FractionalAssembler(OrliczFunction G, double s, double left, double right, std::size_t nodes,
                      QuadratureConfig cfg = {})
      : G_(G), s_(s), alpha_(1.0 - s), left_(left), right_(right), nodes_(nodes), cfg_(cfg), prim_(G, 1.0 - s) {
    check_fractional_s(s);
    cfg_.validate();
    if (nodes < 2 || !(left < right)) throw Error(ErrorKind::invalid_input, "assembler: need nodes >= 2, left < right");
    h_ = (right - left) / static_cast<double>(nodes - 1);
    build_tables();
  }

  FractionalAssembler(OrliczFunction G, double s, const GridFunction& mesh, QuadratureConfig cfg = {})
      : FractionalAssembler(std::move(G), s, mesh.left(), mesh.right(), mesh.size(), cfg) {}

  std::size_t size() const { return nodes_; }
  double s() const { return s_; }
  const OrliczFunction& function() const { return G_; }

  /// Calls visit(term) for every term of row e (element e paired with itself,
  /// with every element to its right, and with the exterior).
  template <class Visit>
  void for_each_term(std::size_t e, Visit&& visit) const {
    const std::size_t E = nodes_ - 1;
    const double ha1 = std::pow(h_, alpha_ - 1.0);
    Term t{};
    // Same element.
    t.len = 2;
    t.idx = {e, e + 1, 0, 0};
    t.coef = {-ha1, ha1, 0.0, 0.0};
    t.profile = Profile::H;
    t.weight = 2.0 * h_ / alpha_;
    visit(t);
    t.profile = Profile::Q;
    t.weight = -2.0 * h_;
    visit(t);
    // Adjacent element.
    if (e + 1 < E) {
      t.len = 3;
      t.idx = {e, e + 1, e + 2, 0};
      const auto& rule = quad::gauss_legendre(cfg_.near_diagonal_order);
      t.profile = Profile::Q;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double w = rule.nodes[j];
        t.weight = 2.0 * h_ * rule.weights[j];
        t.coef = {-ha1 * w, ha1 * (2.0 * w - 1.0), ha1 * (1.0 - w), 0.0};
        visit(t);
      }
      t.profile = Profile::G;
      for (const auto& p : corner_) {
        t.weight = p.weight;
        t.coef = {-p.a * p.rs, (p.a - p.b) * p.rs, p.b * p.rs, 0.0};
        visit(t);
      }
    }
    // Distant elements.
    t.profile = Profile::G;
    t.len = 4;
    for (std::size_t e2 = e + 2; e2 < E; ++e2) {
      const std::size_t d = e2 - e;
      t.idx = {e, e + 1, e2, e2 + 1};
      for (const auto& p : far_[d]) {
        t.weight = p.weight;
        t.coef = {-(1.0 - p.a) * p.rs, -p.a * p.rs, (1.0 - p.b) * p.rs, p.b * p.rs};
        visit(t);
      }
    }
    // Exterior.
    t.profile = Profile::H;
    t.len = 2;
    t.idx = {e, e + 1, 0, 0};
    for (const auto& p : tail_) {
      const double x = h_ * (static_cast<double>(e) + p.a);
      const double dl = x, dr = (right_ - left_) - x;
      for (double dist : {dl, dr}) {
        const double rs = std::pow(dist, -s_);
        t.weight = p.weight;
        t.coef = {(1.0 - p.a) * rs, p.a * rs, 0.0, 0.0};
        visit(t);
      }
    }
  }

  double F(Profile p, double c) const {
    switch (p) {
      case Profile::G: return G_(c);
      case Profile::H: return prim_.H(c);
      case Profile::Q: return prim_.Q(c);
    }
    return 0.0;
  }
  double dF(Profile p, double c) const {
    switch (p) {
      case Profile::G: return G_.derivative(c);
      case Profile::H: return prim_.dH(c);
      case Profile::Q: return prim_.dQ(c);
    }
    return 0.0;
  }
  double d2F(Profile p, double c) const {
    switch (p) {
      case Profile::G: return G_.second_derivative(c);
      case Profile::H: return prim_.d2H(c);
      case Profile::Q: return prim_.d2Q(c);
    }
    return 0.0;
  }

  double value(std::span<const double> u) const {
    check(u);
    std::array<double, kChunks> part{};
    parallel_tasks(kChunks, [&](std::size_t k) {
      double acc = 0.0;
      for (std::size_t e = k; e < nodes_ - 1; e += kChunks)
        for_each_term(e, [&](const Term& t) {
          const double z = std::abs(t.apply(u));
          if (z != 0.0) acc += t.weight * F(t.profile, z);
        });
      part[k] = acc;
    });
    double total = 0.0;
    for (double v : part) total += v;
    return total;
  }

  /// Exact derivative of value() with respect to every nodal value.
  std::vector<double> gradient(std::span<const double> u) const {
    check(u);
    std::vector<std::vector<double>> part(kChunks, std::vector<double>(nodes_, 0.0));
    parallel_tasks(kChunks, [&](std::size_t k) {
      auto& g = part[k];
      for (std::size_t e = k; e < nodes_ - 1; e += kChunks)
        for_each_term(e, [&](const Term& t) {
          const double z = t.apply(u);
          if (z == 0.0) return;
          const double f = t.weight * dF(t.profile, std::abs(z)) * (z > 0.0 ? 1.0 : -1.0);
          for (int i = 0; i < t.len; ++i) g[t.idx[i]] += f * t.coef[i];
        });
    });
    std::vector<double> out(nodes_, 0.0);
    for (const auto& g : part)
      for (std::size_t i = 0; i < nodes_; ++i) out[i] += g[i];
    return out;
  }

  /// Exact Hessian of value(). Entries may be +inf when g'(0) is unbounded.
  Eigen::MatrixXd hessian(std::span<const double> u) const {
    check(u);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes_), static_cast<Eigen::Index>(nodes_));
    for (std::size_t e = 0; e + 1 < nodes_; ++e)
      for_each_term(e, [&](const Term& t) {
        const double f = t.weight * d2F(t.profile, std::abs(t.apply(u)));
        for (int i = 0; i < t.len; ++i)
          for (int j = 0; j < t.len; ++j)
            H(static_cast<Eigen::Index>(t.idx[i]), static_cast<Eigen::Index>(t.idx[j])) += f * t.coef[i] * t.coef[j];
      });
    return H;
  }

  /// iint g(|Du|) sign(Du) Dv dmu, the directional derivative of value() at u
  /// along v. With `absolute`, Dv is replaced by |Dv| and the sign dropped.
  double pairing(std::span<const double> u, std::span<const double> v, bool absolute = false) const {
    check(u);
    check(v);
    std::array<double, kChunks> part{};
    parallel_tasks(kChunks, [&](std::size_t k) {
      double acc = 0.0;
      for (std::size_t e = k; e < nodes_ - 1; e += kChunks)
        for_each_term(e, [&](const Term& t) {
          const double z = t.apply(u);
          if (z == 0.0) return;
          const double lv = t.apply(v);
          const double d = t.weight * dF(t.profile, std::abs(z));
          acc += absolute ? d * std::abs(lv) : d * (z > 0.0 ? lv : -lv);
        });
      part[k] = acc;
    });
    double total = 0.0;
    for (double v2 : part) total += v2;
    return total;
  }

 private:
  static constexpr std::size_t kChunks = 16;

  struct Point {
    double a, b;    // local coordinates (meaning depends on the block)
    double rs;      // r^{-s}
    double weight;  // quadrature weight including 1/r and symmetry factor
  };

  void check(std::span<const double> u) const {
    if (u.size() != nodes_) throw Error(ErrorKind::invalid_input, "nodal vector does not match the mesh");
  }

  void build_tables() {
    const std::size_t E = nodes_ - 1;
    const auto& nr = quad::gauss_legendre(cfg_.near_diagonal_order);
    const auto& fr = quad::gauss_legendre(cfg_.far_order);
    // Adjacent pair, far corner: a' = rho v, b' = rho (1 - v), r = 2h - rho.
    for (std::size_t i = 0; i < nr.nodes.size(); ++i)
      for (std::size_t j = 0; j < nr.nodes.size(); ++j) {
        const double rho = nr.nodes[i], v = nr.nodes[j];
        const double a = 1.0 - rho * v, b = 1.0 - rho * (1.0 - v);
        const double r = h_ * (2.0 - rho);
        corner_.push_back({a, b, std::pow(r, -s_), 2.0 * nr.weights[i] * nr.weights[j] * h_ * h_ * rho / r});
      }
    far_.assign(E, {});
    for (std::size_t d = 2; d < E; ++d) {
      const auto& rule = static_cast<int>(d) <= cfg_.near_band ? nr : fr;
      auto& pts = far_[d];
      pts.reserve(rule.nodes.size() * rule.nodes.size());
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          const double xi = rule.nodes[i], eta = rule.nodes[j];
          const double r = h_ * (static_cast<double>(d) + eta - xi);
          pts.push_back({xi, eta, std::pow(r, -s_), 2.0 * h_ * h_ * rule.weights[i] * rule.weights[j] / r});
        }
    }
    for (std::size_t i = 0; i < nr.nodes.size(); ++i) tail_.push_back({nr.nodes[i], 0.0, 0.0, 2.0 * h_ * nr.weights[i] / s_});
  }

  OrliczFunction G_;
  double s_, alpha_, left_, right_;
  std::size_t nodes_;
  QuadratureConfig cfg_;
  KernelPrimitives prim_;
  double h_ = 0.0;
  std::vector<Point> corner_;
  std::vector<std::vector<Point>> far_;
  std::vector<Point> tail_;
};

/// Phi_G(u) = int G(|u|), Gauss quadrature of order 8 per element (elements
/// are split where u changes sign).
inline double modular(const OrliczFunction& G, const GridFunction& u) {
  const auto& rule = quad::gauss_legendre(8);
  const double h = u.spacing();
  double total = 0.0;
  auto piece = [&](double u0, double u1, double len) {
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double x = rule.nodes[j];
      acc += rule.weights[j] * G(std::abs((1.0 - x) * u0 + x * u1));
    }
    return acc * len;
  };
  for (std::size_t e = 0; e < u.elements(); ++e) {
    const double u0 = u[e], u1 = u[e + 1];
    if (u0 == 0.0 && u1 == 0.0) continue;
    if (u0 * u1 < 0.0) {
      const double c = u0 / (u0 - u1);
      total += piece(u0, 0.0, c * h) + piece(0.0, u1, (1.0 - c) * h);
    } else {
      total += piece(u0, u1, h);
    }
  }
  return total;
}

/// Phi_G(|u'|) = sum_e h G(|m_e|).
inline double gradient_modular(const OrliczFunction& G, const GridFunction& u) {
  double total = 0.0;
  const double h = u.spacing();
  for (std::size_t e = 0; e < u.elements(); ++e) total += h * G(std::abs(u.slope(e)));
  return total;
}

/// Phi_{s,G}(u) for n = 1. With q.estimate_error the value is recomputed with
/// a refined rule and ToleranceError is thrown when the two differ by more
/// than max(abs_tol, rel_tol |value|); the refined value is returned.
inline double fractional_modular(const OrliczFunction& G, double s, const GridFunction& u,
                                 const QuadratureConfig& q = {}) {
  check_fractional_s(s);
  q.validate();
  if (u.is_zero()) return 0.0;
  const double value = FractionalAssembler(G, s, u, q).value(u.values());
  if (!q.estimate_error) return value;
  const double fine = FractionalAssembler(G, s, u, q.refined()).value(u.values());
  const double err = std::abs(fine - value);
  if (err > std::max(q.abs_tol, q.rel_tol * std::abs(fine)))
    throw ToleranceError("fractional modular", fine, err);
  return fine;
}

/// inf { lambda > 0 : Phi(u / lambda) <= 1 } by bisection. `phi` maps a
/// GridFunction to its modular and must be nondecreasing under scaling.
template <class Modular>
double luxemburg_norm(Modular&& phi, const GridFunction& u) {
  if (u.is_zero()) return 0.0;
  auto at = [&](double lambda) { return phi(u.scaled(1.0 / lambda)); };
  double lo = 1.0, hi = 1.0;
  if (at(1.0) > 1.0) {
    const double cap = std::ldexp(1.0, 64);
    while (at(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > cap) throw Error(ErrorKind::divergent_modular, "modular stays above 1 up to lambda = 2^64");
    }
  } else {
    const double floor = std::ldexp(1.0, -200);
    while (at(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < floor) return hi;
    }
  }
  const double tol = 1e-10 * (hi - lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace orlicz
