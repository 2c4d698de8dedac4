#pragma once

// Command dispatch for the `orlicz` tool. Every command writes its artifacts
// under the output directory; numbers use 17 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/bbm.hpp"
#include "orlicz/config.hpp"
#include "orlicz/error.hpp"
#include "orlicz/limit_density.hpp"
#include "orlicz/properties.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(dir / name);
  if (!os) throw Error(ErrorKind::invalid_input, "cannot write " + (dir / name).string());
  return os;
}

inline GridFunction shape_function(const ExperimentConfig& c) {
  switch (c.shape) {
    case Shape::hat: return hat(c.left, c.right, c.N, c.amplitude);
    case Shape::bump: return bump(c.left, c.right, c.N, c.amplitude);
    case Shape::hat_bump: return hat(c.left, c.right, c.N, c.amplitude) + bump(c.left, c.right, c.N, c.amplitude);
  }
  return hat(c.left, c.right, c.N, c.amplitude);
}

inline const OrliczFunction& require_G(const ExperimentConfig& c) {
  if (!c.G) throw Error(ErrorKind::invalid_input, "missing required key `G`");
  return *c.G;
}

inline void run_tilde(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto& G = require_G(c);
  auto os = open_output(out, "tilde.csv");
  os << "a,tilde_quadrature,tilde_closed_form,rel_diff\n";
  for (double a : c.a_list) {
    const double q = tilde_eval(G, c.n, a);
    const auto cf = tilde_closed_form_for(G, c.n, a);
    os << num(a) << ',' << num(q) << ',';
    if (cf) {
      const double rel = *cf == 0.0 ? std::abs(q) : std::abs(q - *cf) / std::abs(*cf);
      os << num(*cf) << ',' << num(rel);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

inline void run_bbm(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto curve = bbm_curve(require_G(c), shape_function(c), c.s_list, c.quadrature);
  auto os = open_output(out, "bbm.csv");
  auto gap = [&](double v) { return curve.target == 0.0 ? std::abs(v) : std::abs(v - curve.target) / curve.target; };
  os << "s,scaled_modular,target,rel_gap\n";
  for (const auto& e : curve.entries)
    os << num(e.s) << ',' << num(e.scaled_modular) << ',' << num(curve.target) << ',' << num(gap(e.scaled_modular))
       << '\n';
  os << "EXTRAPOLATED," << num(curve.extrapolated_limit) << ',' << num(curve.target) << ','
     << num(gap(curve.extrapolated_limit)) << '\n';
}

inline void run_poincare(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto& G = require_G(c);
  auto s_list = c.s_list;
  if (c.s) s_list.insert(s_list.begin(), *c.s);
  const auto u = shape_function(c);
  auto os = open_output(out, "poincare.csv");
  os << "s,ratio,budget,within\n";
  for (double s : s_list) {
    const auto r = poincare_check(G, s, u, c.quadrature);
    os << num(s) << ',' << num(r.ratio) << ',' << num(r.budget) << ',' << (r.within() ? "true" : "false") << '\n';
  }
}

inline DirichletProblem make_problem(const ExperimentConfig& c, double s) {
  return DirichletProblem::sampled(require_G(c), s, c.left, c.right, c.N, c.rhs, c.scaling, c.quadrature);
}

inline void run_solve(const ExperimentConfig& c, const std::filesystem::path& out, std::ostream& err) {
  if (!c.s) throw Error(ErrorKind::invalid_input, "missing required key `s`");
  const auto r = solve(make_problem(c, *c.s), c.solver);
  {
    auto os = open_output(out, "solution.csv");
    write_csv(os, r.u);
  }
  auto os = open_output(out, "summary.txt");
  os << "energy=" << num(r.energy) << '\n'
     << "iterations=" << r.iterations << '\n'
     << "grad_norm=" << num(r.grad_norm) << '\n'
     << "weak_residual=" << num(r.weak_residual) << '\n'
     << "tolerance=" << num(r.tolerance) << '\n'
     << "converged=" << (r.converged ? "true" : "false") << '\n';
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
}

inline void run_gamma(const ExperimentConfig& c, const std::filesystem::path& out, std::ostream& err) {
  const auto rep = gamma_run(make_problem(c, c.s_list.front()), c.s_list, c.solver);
  auto os = open_output(out, "gamma.csv");
  os << "s,converged,luxemburg_gap,energy,energy_gap,midpoint\n";
  for (const auto& e : rep.entries) {
    os << num(e.s) << ',' << (e.ok ? "true" : "false") << ',' << num(e.luxemburg_gap) << ',' << num(e.energy) << ','
       << num(e.energy_gap) << ',' << num(e.midpoint) << '\n';
    if (!e.message.empty()) err << "warning: s = " << num(e.s) << ": " << e.message << '\n';
  }
  os << "LOCAL," << (rep.local_converged ? "true" : "false") << ",0," << num(rep.local_energy) << ",0,"
     << num(rep.local_midpoint) << '\n';
  auto sol = open_output(out, "local_solution.csv");
  write_csv(sol, rep.local);
}

/// Built-in functions exercised by `check` when no G is given. power_log
/// enters with p = 3: for p < (3 + sqrt 5)/2 it is not convex just below t = 1.
inline std::vector<std::pair<std::string, OrliczFunction>> builtin_functions() {
  return {{"power(1.5)", make_power(1.5)},
          {"power(2)", make_power(2.0)},
          {"power(3)", make_power(3.0)},
          {"power_log(3)", make_power_log(3.0)},
          {"max(power(2), power(3))", make_combination(CombineMode::max, {make_power(2.0), make_power(3.0)}, {1.0, 1.0})},
          {"sum(1*power(2), 0.5*power(3))",
           make_combination(CombineMode::sum, {make_power(2.0), make_power(3.0)}, {1.0, 0.5})}};
}

/// Returns the number of violated properties.
inline int run_check(const ExperimentConfig& c, const std::filesystem::path& out) {
  auto functions = c.G ? std::vector<std::pair<std::string, OrliczFunction>>{{c.G_spec, *c.G}} : builtin_functions();
  auto os = open_output(out, "check.csv");
  os << "G,property,trials,violations,worst\n";
  int failed = 0;
  GridPropertyOptions grid;
  grid.functions = c.functions;
  grid.seed = c.seed;
  grid.quadrature = c.quadrature;
  if (!c.s_list.empty()) grid.s_list = c.s_list;
  for (const auto& [name, G] : functions) {
    const auto h = verify_orlicz(G);
    std::vector<PropertyReport> reports;
    for (const auto& [label, check] : {std::pair{"H1 convex nondecreasing", h.h1}, std::pair{"H2 doubling", h.h2},
                                       std::pair{"H3 superlinear at 0", h.h3}}) {
      PropertyReport r{label};
      r.trials = 1;
      r.violations = check.pass ? 0 : 1;
      r.worst = check.worst_violation;
      reports.push_back(r);
    }
    auto guarded = [&](const char* group, auto&& produce) {
      try {
        for (auto& r : produce()) reports.push_back(r);
      } catch (const Error& e) {
        PropertyReport r{std::string(group) + " aborted: " + e.what()};
        r.trials = 1;
        r.violations = 1;
        reports.push_back(r);
      }
    };
    guarded("pointwise", [&] { return check_orlicz_properties(G, c.trials, c.seed); });
    guarded("grid", [&] { return check_grid_properties(G, grid); });
    for (const auto& r : reports) {
      os << '"' << name << "\",\"" << r.name << "\"," << r.trials << ',' << r.violations << ',' << num(r.worst) << '\n';
      if (!r.pass()) ++failed;
    }
  }
  return failed;
}

}  // namespace detail

/// Runs one experiment. Exit status: 0 success, 1 validation failure, 2
/// numeric failure (including property violations found by `check`).
inline int run(Command command, const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& err) {
  try {
    if (config.command && *config.command != command)
      throw Error(ErrorKind::invalid_input, std::string("config says command = ") + to_string(*config.command) +
                                                " but `" + to_string(command) + "` was requested");
    switch (command) {
      case Command::tilde: detail::run_tilde(config, out); break;
      case Command::bbm:
        if (config.s_list.empty()) throw Error(ErrorKind::invalid_input, "missing required key `s_list`");
        detail::run_bbm(config, out);
        break;
      case Command::poincare: detail::run_poincare(config, out); break;
      case Command::solve: detail::run_solve(config, out, err); break;
      case Command::gamma:
        if (config.s_list.empty()) throw Error(ErrorKind::invalid_input, "missing required key `s_list`");
        detail::run_gamma(config, out, err);
        break;
      case Command::check:
        if (const int failed = detail::run_check(config, out); failed > 0) {
          err << "error: " << failed << " propert" << (failed == 1 ? "y" : "ies") << " violated (see check.csv)\n";
          return 2;
        }
        break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

/// Parses the config file at `path` and runs `command_name`.
inline int run_file(const std::string& command_name, const std::filesystem::path& path,
                    const std::filesystem::path& out, std::ostream& err) {
  const auto command = command_from_string(command_name);
  if (!command) {
    err << "error: invalid-input: unknown command `" << command_name << "`\n";
    return 1;
  }
  std::ifstream in(path);
  if (!in) {
    err << "error: invalid-input: cannot read config " << path.string() << '\n';
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg;
  try {
    cfg = parse_config(ss.str(), command);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? 1 : 2;
  }
  return run(*command, cfg, out, err);
}

}  // namespace orlicz
