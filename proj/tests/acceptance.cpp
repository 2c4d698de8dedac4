// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orlicz/cli.hpp"
#include "orlicz/orlicz.hpp"

using namespace orlicz;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;  // 0 means no runtime requirement
  std::function<Outcome()> run;
};

OrliczFunction max23() { return make_combination(CombineMode::max, {make_power(2.0), make_power(3.0)}, {1.0, 1.0}); }

OrliczFunction sum23() {
  return make_combination(CombineMode::sum, {make_power(2.0), make_power(3.0)}, {1.0, 0.5});
}

std::vector<OrliczFunction> builtins() {
  return {make_power(1.5),       make_power(2.0), make_power(3.0), make_power_log(2.0),
          make_power_log(3.0),   max23(),         sum23()};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Minimizers returned anywhere in the run, for the weak-form criterion.
struct Minimizer {
  std::string label;
  double weak_residual, tolerance;
  bool converged;
};
std::vector<Minimizer> minimizers;

void record_minimizer(const std::string& label, const SolveResult& r) {
  minimizers.push_back({label, r.weak_residual, r.tolerance, r.converged});
}

Outcome tilde_closed_forms() {
  Outcome o;
  double worst = 0.0;
  int count = 0;
  std::vector<OrliczFunction> fs{max23()};
  for (double p : {1.5, 2.0, 3.0})
    for (auto G : {make_power(p), make_power_log(p), make_power_abslog(p)}) fs.push_back(G);
  for (const auto& G : fs)
    for (int n : {1, 2, 3})
      for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double q = tilde_eval(G, n, a);
        const double c = *tilde_closed_form_for(G, n, a);
        const double rel = std::abs(q - c) / std::abs(c);
        worst = std::max(worst, rel);
        ++count;
        if (!(rel <= 1e-6)) {
          o.pass = false;
          o.detail += G.describe() + " n=" + std::to_string(n) + fmt(" a=%g; ", a);
        }
      }
  o.detail += std::to_string(count) + " cases, worst rel diff " + fmt("%.2e", worst);
  return o;
}

Outcome bbm_case(const OrliczFunction& G, double allowed, bool known_target) {
  const auto c = bbm_curve(G, hat(-1.0, 1.0, 1025), {0.9, 0.95, 0.99});
  const double target = known_target ? 2.0 : c.target;
  const double gap = std::abs(c.extrapolated_limit - target) / target;
  Outcome o;
  o.pass = gap <= allowed;
  o.detail = G.describe() + fmt(": limit %.6f", c.extrapolated_limit) + fmt(" target %.6f", target) +
             fmt(" gap %.2f%%", 100 * gap);
  return o;
}

// t^2 within 2% of the exact target 2; the others within 5% of quadrature.
// Each case has its own 2 minute budget.
Outcome bbm_limit() {
  Outcome o;
  const std::vector<std::pair<OrliczFunction, double>> cases{{make_power(2.0), 0.02}, {make_power(3.0), 0.05}, {max23(), 0.05}};
  for (const auto& [G, allowed] : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = bbm_case(G, allowed, G.kind() == Kind::power && G.params()[0] == 2.0);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > 120.0) r.pass = false, r.detail += fmt(" over budget (%.0f s)", dt);
    o.pass = o.pass && r.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + r.detail;
  }
  return o;
}

Outcome inequality_suite() {
  Outcome o;
  int checks = 0;
  for (const auto& G : builtins())
    for (const auto& r : check_orlicz_properties(G, 1000, 2024)) {
      checks += r.trials;
      if (!r.pass()) {
        o.pass = false;
        o.detail += G.describe() + ": " + r.name + " (" + std::to_string(r.violations) + " violations); ";
      }
    }
  o.detail += std::to_string(checks) + " samples over " + std::to_string(builtins().size()) + " functions";
  return o;
}

Outcome transform_bounds() {
  Outcome o;
  int checks = 0;
  for (const auto& [name, G] : detail::builtin_functions())
    for (const auto& r : check_grid_properties(G, GridPropertyOptions{})) {
      checks += r.trials;
      if (!r.pass()) {
        o.pass = false;
        o.detail += name + ": " + r.name + fmt(" (worst %.3g); ", r.worst);
      }
    }
  o.detail += std::to_string(checks) + " comparisons, 50 functions per G at N = 257";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int f = 0; f < 10; ++f) {
    const auto G = f % 2 ? make_power(3.0) : make_power(2.0);
    const auto u = random_w0_function(rng, 0.0, 1.0, 129);
    for (double s : {0.25, 0.5, 0.75}) {
      const double v = fractional_modular(G, s, u), ref = oracle::brute_fractional(G, s, u);
      const double rel = std::abs(v - ref) / ref;
      worst = std::max(worst, rel);
      if (!(rel <= 0.01)) {
        o.pass = false;
        o.detail += "f=" + std::to_string(f) + fmt(" s=%g", s) + fmt(" rel %.3g; ", rel);
      }
    }
  }
  o.detail += "30 comparisons, worst rel diff " + fmt("%.2e", worst);
  return o;
}

Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const std::size_t N = 33;
  double worst = 0.0;
  int states = 0;
  for (const auto& G : {make_power(2.0), make_power(3.0)})
    for (double s : {0.5, 0.9}) {
      const auto p = DirichletProblem::sampled(G, s, 0.0, 1.0, N, [](double x) { return std::cos(3 * x); });
      for (int k = 0; k < 50; ++k, ++states) {
        std::vector<double> v(N);
        for (auto& x : v) x = d(rng);
        v.front() = v.back() = 0.0;
        const auto u = p.zero().with_values(v);
        const auto g = energy_gradient(p, u);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 1; i + 1 < N; ++i) {
          auto at = [&](double t) {
            auto w = v;
            w[i] += t;
            return energy(p, u.with_values(w));
          };
          err = std::max(err, std::abs(g[i] - oracle::central(at, 0.0, 1e-5)));
          scale = std::max(scale, std::abs(g[i]));
        }
        const double rel = err / scale;
        worst = std::max(worst, rel);
        if (!(rel <= 1e-5)) {
          o.pass = false;
          o.detail += G.describe() + fmt(" s=%g", s) + fmt(" rel %.3g; ", rel);
        }
      }
    }
  o.detail += std::to_string(states) + " states at N = 33, worst rel error " + fmt("%.2e", worst);
  return o;
}

Outcome local_limit() {
  Outcome o;
  const auto base = DirichletProblem::sampled(make_power(2.0), 0.6, 0.0, 1.0, 513, [](double) { return 1.0; });
  const auto local = solve(base.with_s(1.0));
  record_minimizer("local s=1", local);
  const double mid = local.u(0.5);
  if (!(local.converged && std::abs(mid - 0.0625) <= 1e-4)) o.pass = false;
  o.detail = fmt("u(1/2) = %.7f", mid);
  const auto rep = gamma_run(base, {0.6, 0.8, 0.9, 0.99});
  o.detail += "; gaps";
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& e : rep.entries) {
    if (e.result) record_minimizer(fmt("gamma s=%g", e.s), *e.result);
    o.detail += fmt(" %.4g", e.luxemburg_gap);
    if (!e.ok || !(e.luxemburg_gap < prev)) o.pass = false;
    prev = e.luxemburg_gap;
  }
  const double m99 = rep.entries.back().midpoint;
  if (!(std::abs(m99 - 0.0625) <= 0.1 * 0.0625)) o.pass = false;
  o.detail += fmt("; s=0.99 midpoint %.5f", m99);
  return o;
}

Outcome weak_form() {
  for (const auto& G : builtins())
    for (double s : {0.3, 0.6, 0.9}) {
      const auto r = solve(DirichletProblem::sampled(G, s, 0.0, 1.0, 65, [](double x) { return 1.0 + std::sin(3 * x); }));
      record_minimizer(G.describe() + fmt(" s=%g", s), r);
    }
  Outcome o;
  double worst = 0.0;
  for (const auto& m : minimizers) {
    const double ratio = m.weak_residual / m.tolerance;
    worst = std::max(worst, ratio);
    if (!m.converged || !(ratio <= 10.0)) {
      o.pass = false;
      o.detail += m.label + (m.converged ? "" : " (not converged)") + fmt(" ratio %.3g; ", ratio);
    }
  }
  o.detail += std::to_string(minimizers.size()) + " minimizers, worst residual/tol " + fmt("%.3g", worst);
  return o;
}

Outcome poincare() {
  Outcome o;
  std::mt19937_64 rng(41);
  int checks = 0;
  double worst = 0.0;
  for (const auto& G : {make_power(2.0), make_power(3.0), max23()})
    for (int f = 0; f < 100; ++f) {
      const auto u = random_w0_function(rng, 0.0, 1.0, 65);
      for (double s : {0.3, 0.6, 0.9}) {
        const auto r = poincare_check(G, s, u);
        ++checks;
        worst = std::max(worst, r.ratio / r.budget);
        if (!r.within()) {
          o.pass = false;
          o.detail += G.describe() + " f=" + std::to_string(f) + fmt(" s=%g; ", s);
        }
      }
    }
  o.detail += std::to_string(checks) + " checks, worst ratio/budget " + fmt("%.3g", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "limit density closed forms", 10, tilde_closed_forms},
      {2, "BBM limit for the unit hat", 360, bbm_limit},
      {3, "pointwise inequality suite", 0, inequality_suite},
      {4, "modular transform bounds", 300, transform_bounds},
      {5, "fractional modular vs brute force", 0, oracle_equivalence},
      {6, "energy gradient vs finite differences", 0, gradient_check},
      {7, "local limit of the Dirichlet problem", 600, local_limit},
      {8, "weak residual at every minimizer", 0, weak_form},
      {9, "Poincare bound", 0, poincare},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0 && dt > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt("; exceeded %.0f s budget", c.budget_seconds);
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
