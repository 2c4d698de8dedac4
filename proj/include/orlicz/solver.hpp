#pragma once

// Dirichlet problem for the fractional g-Laplacian on an interval, solved by
// minimizing the discrete convex energy
//
//   F_s(u) = sigma Phi_{s,G}(u) - int f u,    sigma = 1 - s (bbm_scaled) or 1,
//   F_1(u) = Phi_G(|u'|) - int f u,
//
// over piecewise-linear u vanishing at the end nodes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orlicz/error.hpp"
#include "orlicz/grid_function.hpp"
#include "orlicz/limit_density.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

enum class Scaling { bbm_scaled, unscaled };

inline const char* to_string(Scaling s) { return s == Scaling::bbm_scaled ? "bbm_scaled" : "unscaled"; }

struct DirichletProblem {
  DirichletProblem(OrliczFunction g, double s_, double left_, double right_, std::size_t nodes_,
                   std::vector<double> rhs_, Scaling scaling_ = Scaling::bbm_scaled, QuadratureConfig q = {})
      : G(std::move(g)),
        s(s_),
        left(left_),
        right(right_),
        nodes(nodes_),
        rhs(std::move(rhs_)),
        scaling(scaling_),
        quadrature(q) {
    validate();
  }

  /// Samples f at the mesh nodes.
  static DirichletProblem sampled(OrliczFunction g, double s, double left, double right, std::size_t nodes,
                                  const std::function<double(double)>& f, Scaling scaling = Scaling::bbm_scaled,
                                  QuadratureConfig q = {}) {
    if (nodes < 3 || !(left < right)) throw Error(ErrorKind::invalid_parameter, "problem: need N >= 3 and a < b");
    std::vector<double> rhs(nodes);
    const double h = (right - left) / static_cast<double>(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) rhs[i] = f(left + h * static_cast<double>(i));
    return DirichletProblem(std::move(g), s, left, right, nodes, std::move(rhs), scaling, q);
  }

  DirichletProblem with_s(double s_new) const {
    return DirichletProblem(G, s_new, left, right, nodes, rhs, scaling, quadrature);
  }
  DirichletProblem with_function(OrliczFunction g) const {
    return DirichletProblem(std::move(g), s, left, right, nodes, rhs, scaling, quadrature);
  }

  double spacing() const { return (right - left) / static_cast<double>(nodes - 1); }
  bool local() const { return s == 1.0; }
  /// Factor in front of the fractional modular.
  double sigma() const { return scaling == Scaling::bbm_scaled && !local() ? 1.0 - s : 1.0; }
  GridFunction zero() const { return GridFunction::zero(left, right, nodes); }

  void validate() const {
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorKind::invalid_parameter, "problem: s must lie in (0, 1]");
    if (nodes < 3) throw Error(ErrorKind::invalid_parameter, "problem: need at least 3 mesh nodes");
    if (!(left < right) || !std::isfinite(left) || !std::isfinite(right))
      throw Error(ErrorKind::invalid_parameter, "problem: need finite a < b");
    if (rhs.size() != nodes) throw Error(ErrorKind::invalid_input, "problem: rhs does not match the mesh");
    for (double v : rhs)
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "problem: rhs is not finite");
    quadrature.validate();
  }

  OrliczFunction G;
  double s;
  double left, right;
  std::size_t nodes;
  std::vector<double> rhs;
  Scaling scaling;
  QuadratureConfig quadrature;
};

/// Energy, gradient and Hessian of one problem, with the assembler built once.
class EnergyModel {
 public:
  explicit EnergyModel(const DirichletProblem& p) : p_(p), h_(p.spacing()) {
    p_.validate();
    if (!p_.local()) assembler_.emplace(p_.G, p_.s, p_.left, p_.right, p_.nodes, p_.quadrature);
    // Load vector b_i = int f phi_i with f interpolated (P1 mass matrix).
    const auto& f = p_.rhs;
    const std::size_t n = p_.nodes;
    load_.assign(n, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
      load_[e] += h_ * (2.0 * f[e] + f[e + 1]) / 6.0;
      load_[e + 1] += h_ * (f[e] + 2.0 * f[e + 1]) / 6.0;
    }
  }

  const DirichletProblem& problem() const { return p_; }
  const std::vector<double>& load() const { return load_; }

  void check(const GridFunction& u) const {
    if (u.size() != p_.nodes || std::abs(u.left() - p_.left) > 1e-12 * (1.0 + std::abs(p_.left)) ||
        std::abs(u.right() - p_.right) > 1e-12 * (1.0 + std::abs(p_.right)))
      throw Error(ErrorKind::invalid_input, "grid function does not live on the problem mesh");
  }

  /// sigma Phi_{s,G}(u), or Phi_G(|u'|) when s = 1.
  double internal(std::span<const double> u) const {
    if (assembler_) return p_.sigma() * assembler_->value(u);
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < u.size(); ++e) total += h_ * p_.G(std::abs((u[e + 1] - u[e]) / h_));
    return total;
  }

  double value(std::span<const double> u) const {
    double fu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) fu += load_[i] * u[i];
    return internal(u) - fu;
  }

  /// d/du_i of internal(u), i.e. <A u, phi_i>.
  std::vector<double> internal_gradient(std::span<const double> u) const {
    if (assembler_) {
      auto g = assembler_->gradient(u);
      for (auto& x : g) x *= p_.sigma();
      return g;
    }
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t e = 0; e + 1 < u.size(); ++e) {
      const double m = (u[e + 1] - u[e]) / h_;
      const double d = m == 0.0 ? 0.0 : p_.G.derivative(std::abs(m)) * (m > 0.0 ? 1.0 : -1.0);
      g[e] -= d;
      g[e + 1] += d;
    }
    return g;
  }

  std::vector<double> gradient(std::span<const double> u) const {
    auto g = internal_gradient(u);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= load_[i];
    return g;
  }

  Eigen::MatrixXd hessian(std::span<const double> u) const {
    if (assembler_) return p_.sigma() * assembler_->hessian(u);
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e + 1 < u.size(); ++e) {
      const double m = std::abs((u[e + 1] - u[e]) / h_);
      const double c = p_.G.second_derivative(m) / h_;
      const auto i = static_cast<Eigen::Index>(e);
      H(i, i) += c;
      H(i + 1, i + 1) += c;
      H(i, i + 1) -= c;
      H(i + 1, i) -= c;
    }
    return H;
  }

  /// max_i |<A u, phi_i> - int f phi_i| over interior nodes. The pairings
  /// <A u, phi_i> = sigma iint g(|Du|) sign(Du) D phi_i dmu are accumulated for
  /// all basis functions in one pass over the quadrature terms, and the load
  /// is rebuilt from f element by element.
  double weak_residual(std::span<const double> u) const {
    const auto a = internal_gradient(u);
    const auto& f = p_.rhs;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
      const double b = h_ * (f[i - 1] + 4.0 * f[i] + f[i + 1]) / 6.0;
      worst = std::max(worst, std::abs(a[i] - b));
    }
    return worst;
  }

 private:
  DirichletProblem p_;
  double h_;
  std::optional<FractionalAssembler> assembler_;
  std::vector<double> load_;
};

inline double energy(const DirichletProblem& p, const GridFunction& u) {
  EnergyModel model(p);
  model.check(u);
  return model.value(u.values());
}

/// Exact derivative of energy() with respect to every nodal value (boundary
/// entries included).
inline std::vector<double> energy_gradient(const DirichletProblem& p, const GridFunction& u) {
  EnergyModel model(p);
  model.check(u);
  return model.gradient(u.values());
}

/// <A u, v> = sigma iint g(|Du|) sign(Du) Dv dmu (s < 1); with `absolute`,
/// sign(Du) Dv is replaced by |Dv|.
inline double pairing(const DirichletProblem& p, const GridFunction& u, const GridFunction& v, bool absolute = false) {
  if (p.local()) throw Error(ErrorKind::invalid_parameter, "pairing: defined for s < 1");
  EnergyModel model(p);
  model.check(u);
  model.check(v);
  return p.sigma() * FractionalAssembler(p.G, p.s, p.left, p.right, p.nodes, p.quadrature)
                         .pairing(u.values(), v.values(), absolute);
}

enum class Method { newton, nlcg, gradient };

struct SolveOptions {
  double tol = 0.0;  ///< gradient sup-norm target; 0 selects 1e-8 max(1, |energy|)
  int max_iter = 200;
  Method method = Method::newton;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int newton_patience = 10;
};

struct SolveResult {
  GridFunction u;
  double energy = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  double weak_residual = 0.0;
  double tolerance = 0.0;
  bool converged = false;
  std::vector<double> energy_history;
  std::vector<std::string> warnings;
};

namespace detail {

inline double interior_sup(const std::vector<double>& g) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) m = std::max(m, std::abs(g[i]));
  return m;
}

inline Eigen::VectorXd interior(const std::vector<double>& g) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size() - 2));
  for (std::size_t i = 1; i + 1 < g.size(); ++i) v(static_cast<Eigen::Index>(i - 1)) = g[i];
  return v;
}

/// Newton direction from the interior block of H, or nothing when the block
/// is unusable.
inline std::optional<Eigen::VectorXd> newton_direction(const Eigen::MatrixXd& H, const Eigen::VectorXd& g) {
  const auto n = g.size();
  Eigen::MatrixXd A = H.block(1, 1, n, n);
  if (!A.allFinite()) return std::nullopt;
  const double scale = A.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  for (double jitter = 0.0; jitter <= scale; jitter = jitter == 0.0 ? 1e-12 * scale : jitter * 100.0) {
    Eigen::MatrixXd B = A;
    B.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = -llt.solve(g);
      if (d.allFinite()) return d;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Minimizes the energy from u = 0 with a descent method and Armijo
/// backtracking. Energies of accepted iterates are nonincreasing. With
/// Method::newton the solver alternates between Newton and nonlinear CG
/// whenever the gradient norm has not halved within `newton_patience` steps:
/// Newton stalls when g jumps (power_log at t = 1, so the energy is not twice
/// differentiable) and CG stalls when g'(0) is singular or zero. On budget
/// exhaustion the partial result is returned with converged = false.
inline SolveResult solve(const DirichletProblem& p, const SolveOptions& opts = {}) {
  if (opts.max_iter < 0) throw Error(ErrorKind::invalid_parameter, "solve: max_iter must be >= 0");
  if (opts.tol < 0.0) throw Error(ErrorKind::invalid_parameter, "solve: tol must be >= 0");
  const EnergyModel model(p);
  SolveResult res{p.zero(), 0.0, 0, 0.0, 0.0, 0.0, false, {}, {}};
  if (!strictly_convex_on_grid(p.G))
    res.warnings.push_back("uniqueness: G is not strictly convex on the screening grid; minimizer may not be unique");
  const std::size_t n = p.nodes;
  std::vector<double> u(n, 0.0);
  double E = model.value(u);
  auto grad = model.gradient(u);
  res.energy_history.push_back(E);
  Eigen::VectorXd prev_g, prev_d;
  Method method = opts.method;
  double mark = detail::interior_sup(grad);
  int since_mark = 0;
  int it = 0;
  for (;; ++it) {
    const double gnorm = detail::interior_sup(grad);
    res.tolerance = opts.tol > 0.0 ? opts.tol : 1e-8 * std::max(1.0, std::abs(E));
    res.grad_norm = gnorm;
    if (gnorm <= res.tolerance) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;
    if (gnorm <= 0.5 * mark) {
      mark = gnorm;
      since_mark = 0;
    } else if (opts.method == Method::newton && ++since_mark > opts.newton_patience) {
      method = method == Method::newton ? Method::nlcg : Method::newton;
      prev_g.resize(0);
      mark = gnorm;
      since_mark = 0;
    }
    const Eigen::VectorXd g = detail::interior(grad);
    Eigen::VectorXd d;
    bool have = false;
    if (method == Method::newton) {
      if (auto nd = detail::newton_direction(model.hessian(u), g)) {
        d = *nd;
        have = true;
      }
    } else if (method == Method::nlcg && prev_g.size() == g.size()) {
      const double beta = std::max(0.0, g.dot(g - prev_g) / prev_g.dot(prev_g));
      d = -g + beta * prev_d;
      have = true;
    }
    if (!have || !(g.dot(d) < 0.0)) d = -g;
    // Armijo backtracking.
    const double slope = g.dot(d);
    double t = 1.0;
    if (method != Method::newton && !have) {
      // Scale the first steepest-descent step to a unit change in the iterate.
      t = 1.0 / std::max(1.0, d.cwiseAbs().maxCoeff());
    }
    std::vector<double> trial(n, 0.0);
    double Et = 0.0;
    bool accepted = false;
    for (int k = 0; k < 200; ++k) {
      for (std::size_t i = 1; i + 1 < n; ++i) trial[i] = u[i] + t * d(static_cast<Eigen::Index>(i - 1));
      Et = model.value(trial);
      if (Et <= E + opts.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= opts.backtrack;
    }
    if (!accepted || Et > E) {
      res.warnings.push_back("line search stalled before reaching the gradient tolerance");
      break;
    }
    prev_g = g;
    prev_d = t * d;
    if (method == Method::nlcg) prev_d = d;
    u = trial;
    E = Et;
    grad = model.gradient(u);
    res.energy_history.push_back(E);
  }
  res.iterations = it;
  res.u = p.zero().with_values(u);
  res.energy = E;
  res.weak_residual = model.weak_residual(u);
  if (!res.converged) res.warnings.push_back("iteration budget exhausted or stalled; result is partial");
  return res;
}

/// (-Delta_g)^s_eps u(x) = int_{|x-y| >= eps} g(|Du|) sign(u(x) - u(y)) dy / |x-y|^{1+s}
/// with the zero extension of u. The part inside the mesh is integrated
/// adaptively element by element; the exterior part is exact:
/// int_{r0}^inf g(c r^{-s}) r^{-1-s} dr = G(c r0^{-s}) / (s c).
inline double apply_pointwise_eps(const OrliczFunction& G, double s, const GridFunction& u, double x, double eps,
                                  const quad::AdaptiveOptions& opts = {1e-10, 1e-13, 4000}) {
  check_fractional_s(s);
  if (!(eps > 0.0)) throw Error(ErrorKind::invalid_parameter, "apply_pointwise_eps: eps must be positive");
  if (!(x > u.left() && x < u.right())) throw Error(ErrorKind::invalid_parameter, "apply_pointwise_eps: x must lie in the interior");
  const double ux = u(x);
  auto integrand = [&](double y) {
    const double diff = ux - u(y);
    if (diff == 0.0) return 0.0;
    const double r = std::abs(x - y);
    return G.derivative(std::abs(diff) * std::pow(r, -s)) * (diff > 0.0 ? 1.0 : -1.0) * std::pow(r, -1.0 - s);
  };
  auto side = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    std::vector<double> cuts;
    for (std::size_t i = 0; i < u.size(); ++i) cuts.push_back(u.node(i));
    return quad::integrate_or_throw(integrand, quad::breakpoints(a, b, cuts), opts, "truncated principal value");
  };
  double total = side(u.left(), x - eps) + side(x + eps, u.right());
  const double c = std::abs(ux);
  if (c > 0.0) {
    for (double d : {x - u.left(), u.right() - x}) {
      const double r0 = std::max(eps, d);
      total += G(c * std::pow(r0, -s)) / (s * c) * (ux > 0.0 ? 1.0 : -1.0);
    }
  }
  return total;
}

struct GammaEntry {
  double s = 0.0;
  bool ok = false;
  std::string message;
  double luxemburg_gap = std::numeric_limits<double>::quiet_NaN();
  double energy = std::numeric_limits<double>::quiet_NaN();
  double energy_gap = std::numeric_limits<double>::quiet_NaN();
  double midpoint = std::numeric_limits<double>::quiet_NaN();
  std::optional<SolveResult> result;
};

struct GammaReport {
  std::vector<GammaEntry> entries;
  GridFunction local;
  double local_energy = 0.0;
  double local_midpoint = 0.0;
  bool local_converged = false;
};

namespace detail {
inline double midpoint_value(const GridFunction& u) { return u(0.5 * (u.left() + u.right())); }
}  // namespace detail

/// Solves the bbm_scaled problem at each s and the local problem (s = 1) with
/// G replaced by G~. Gaps use the Luxemburg norm of Phi_G. A failing sub-solve
/// is recorded in its entry and the run continues.
inline GammaReport gamma_run(const DirichletProblem& base, const std::vector<double>& s_list,
                             const SolveOptions& opts = {}) {
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    check_fractional_s(s_list[i]);
    if (i > 0 && !(s_list[i] > s_list[i - 1]))
      throw Error(ErrorKind::invalid_parameter, "gamma_run: s_list must be strictly increasing");
  }
  DirichletProblem local = base.with_s(1.0).with_function(LimitDensity(base.G, 1).as_orlicz());
  local.scaling = Scaling::bbm_scaled;
  const auto loc = solve(local, opts);
  GammaReport report{{}, loc.u, loc.energy, detail::midpoint_value(loc.u), loc.converged};
  for (double s : s_list) {
    GammaEntry entry;
    entry.s = s;
    try {
      DirichletProblem p = base.with_s(s);
      p.scaling = Scaling::bbm_scaled;
      const auto& r = entry.result.emplace(solve(p, opts));
      entry.ok = r.converged;
      if (!entry.ok) entry.message = "solver did not converge";
      entry.energy = r.energy;
      entry.energy_gap = std::abs(entry.energy - loc.energy);
      entry.midpoint = detail::midpoint_value(r.u);
      const auto diff = r.u - loc.u;
      entry.luxemburg_gap = luxemburg_norm([&](const GridFunction& w) { return modular(base.G, w); }, diff);
    } catch (const std::exception& ex) {
      entry.ok = false;
      entry.message = ex.what();
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace orlicz
