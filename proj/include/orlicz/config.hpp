#pragma once

// Flat `key = value` experiment configs and the Orlicz function spec grammar:
//
//   G    := power(p) | power_log(p) | power_abslog(p)
//         | max(G, G, ...) | sum(w*G, w*G, ...) | compose(G, G)

#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_input, "malformed number `" + t + "`");
  }
  if (used != t.size() || !std::isfinite(v)) throw Error(ErrorKind::invalid_input, "malformed number `" + t + "`");
  return v;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw Error(ErrorKind::invalid_input, "empty list");
  return out;
}

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : s_(text) {}

  OrliczFunction parse() {
    auto g = function();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing text");
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::invalid_input, "function spec: " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected `") + c + "`");
  }
  std::string word() {
    skip();
    const std::size_t a = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(a, pos_ - a));
  }
  double number() {
    skip();
    const std::size_t a = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                s_[pos_] == 'e' || s_[pos_] == 'E' || s_[pos_] == '-' || s_[pos_] == '+'))
      ++pos_;
    if (a == pos_) fail("expected a number");
    return parse_number(std::string(s_.substr(a, pos_ - a)));
  }

  OrliczFunction function() {
    const std::string name = word();
    if (name.empty()) fail("expected a function name");
    expect('(');
    if (name == "power" || name == "power_log" || name == "power_abslog") {
      const double p = number();
      expect(')');
      if (name == "power") return make_power(p);
      if (name == "power_log") return make_power_log(p);
      return make_power_abslog(p);
    }
    if (name == "max" || name == "sum") {
      std::vector<OrliczFunction> parts;
      std::vector<double> weights;
      do {
        double w = 1.0;
        if (name == "sum") {
          skip();
          if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
            w = number();
            expect('*');
          }
        }
        parts.push_back(function());
        weights.push_back(w);
      } while (accept(','));
      expect(')');
      return make_combination(name == "max" ? CombineMode::max : CombineMode::sum, std::move(parts),
                              std::move(weights));
    }
    if (name == "compose") {
      auto outer = function();
      expect(',');
      auto inner = function();
      expect(')');
      return make_composition(std::move(outer), std::move(inner));
    }
    fail("unknown function `" + name + "`");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a function spec such as `max(power(2), power(3))`.
inline OrliczFunction parse_function_spec(std::string_view text) { return detail::SpecParser(text).parse(); }

enum class Command { tilde, bbm, poincare, solve, gamma, check };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::tilde: return "tilde";
    case Command::bbm: return "bbm";
    case Command::poincare: return "poincare";
    case Command::solve: return "solve";
    case Command::gamma: return "gamma";
    case Command::check: return "check";
  }
  return "unknown";
}

inline std::optional<Command> command_from_string(std::string_view s) {
  for (auto c : {Command::tilde, Command::bbm, Command::poincare, Command::solve, Command::gamma, Command::check})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

/// Right-hand side spec: a number, `zero`, `const(c)` or `sin(k)` (sin(k pi x)).
struct RhsSpec {
  enum class Kind { constant, sine } kind = Kind::constant;
  double value = 0.0;
  double operator()(double x) const {
    return kind == Kind::constant ? value : std::sin(value * 3.14159265358979323846 * x);
  }
};

inline RhsSpec parse_rhs(const std::string& text) {
  const std::string t = detail::trim(text);
  auto inner = [&](std::size_t skip) {
    if (t.back() != ')') throw Error(ErrorKind::invalid_input, "rhs: missing `)`");
    return detail::parse_number(t.substr(skip, t.size() - skip - 1));
  };
  if (t == "zero") return {RhsSpec::Kind::constant, 0.0};
  if (t.rfind("const(", 0) == 0) return {RhsSpec::Kind::constant, inner(6)};
  if (t.rfind("sin(", 0) == 0) return {RhsSpec::Kind::sine, inner(4)};
  return {RhsSpec::Kind::constant, detail::parse_number(t)};
}

/// Shape of the test function for bbm / poincare: hat, bump, or `hat+bump`.
enum class Shape { hat, bump, hat_bump };

struct ExperimentConfig {
  std::optional<Command> command;
  std::string G_spec;
  std::optional<OrliczFunction> G;
  int n = 1;
  std::vector<double> a_list{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> s_list;
  std::optional<double> s;
  double left = 0.0, right = 1.0;
  std::size_t N = 129;
  Shape shape = Shape::hat;
  double amplitude = 1.0;
  RhsSpec rhs{};
  Scaling scaling = Scaling::bbm_scaled;
  QuadratureConfig quadrature{};
  SolveOptions solver{};
  int trials = 1000;
  int functions = 50;
  std::uint64_t seed = 1;
};

namespace detail {

struct ConfigIssue {
  int line;
  ErrorKind kind;
  std::string message;
};

}  // namespace detail

/// Parses `key = value` lines (`#` starts a comment). All problems are
/// collected and reported together, each with its line number; the thrown
/// Error carries the kind of the first problem. `fallback` supplies the
/// command when the text has no `command` key.
inline ExperimentConfig parse_config(std::string_view text, std::optional<Command> fallback = std::nullopt) {
  ExperimentConfig cfg;
  std::vector<detail::ConfigIssue> issues;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({lineno, ErrorKind::invalid_input, "expected `key = value`"});
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (seen.count(key)) {
      issues.push_back({lineno, ErrorKind::invalid_input, "duplicate key `" + key + "`"});
      continue;
    }
    seen[key] = lineno;
    try {
      auto positive_int = [&](const char* what) {
        const double v = detail::parse_number(value);
        if (v != std::floor(v) || v < 1.0) throw Error(ErrorKind::invalid_parameter, std::string(what) + " must be a positive integer");
        return v;
      };
      if (key == "command") {
        cfg.command = command_from_string(value);
        if (!cfg.command) throw Error(ErrorKind::invalid_input, "unknown command `" + value + "`");
      } else if (key == "G") {
        cfg.G_spec = value;
        cfg.G = parse_function_spec(value);
      } else if (key == "n") {
        cfg.n = static_cast<int>(positive_int("n"));
        if (cfg.n > 3) throw Error(ErrorKind::unsupported_dimension, "n must be 1, 2 or 3");
      } else if (key == "a_list") {
        cfg.a_list = detail::parse_list(value);
      } else if (key == "s") {
        cfg.s = detail::parse_number(value);
      } else if (key == "s_list") {
        cfg.s_list = detail::parse_list(value);
      } else if (key == "domain") {
        const auto d = detail::parse_list(value);
        if (d.size() != 2 || !(d[0] < d[1])) throw Error(ErrorKind::invalid_parameter, "domain must be `a, b` with a < b");
        cfg.left = d[0];
        cfg.right = d[1];
      } else if (key == "N") {
        cfg.N = static_cast<std::size_t>(positive_int("N"));
        if (cfg.N < 3) throw Error(ErrorKind::invalid_parameter, "N must be at least 3");
      } else if (key == "u") {
        if (value == "hat") cfg.shape = Shape::hat;
        else if (value == "bump") cfg.shape = Shape::bump;
        else if (value == "hat+bump") cfg.shape = Shape::hat_bump;
        else throw Error(ErrorKind::invalid_input, "unknown shape `" + value + "` (hat, bump, hat+bump)");
      } else if (key == "amplitude") {
        cfg.amplitude = detail::parse_number(value);
      } else if (key == "rhs") {
        cfg.rhs = parse_rhs(value);
      } else if (key == "scaling") {
        if (value == "bbm_scaled") cfg.scaling = Scaling::bbm_scaled;
        else if (value == "unscaled") cfg.scaling = Scaling::unscaled;
        else throw Error(ErrorKind::invalid_input, "scaling must be bbm_scaled or unscaled");
      } else if (key == "rel_tol") {
        cfg.quadrature.rel_tol = detail::parse_number(value);
      } else if (key == "abs_tol") {
        cfg.quadrature.abs_tol = detail::parse_number(value);
      } else if (key == "estimate_error") {
        if (value != "true" && value != "false") throw Error(ErrorKind::invalid_input, "estimate_error must be true or false");
        cfg.quadrature.estimate_error = value == "true";
      } else if (key == "near_diagonal_order") {
        cfg.quadrature.near_diagonal_order = static_cast<int>(positive_int("near_diagonal_order"));
      } else if (key == "far_order") {
        cfg.quadrature.far_order = static_cast<int>(positive_int("far_order"));
      } else if (key == "near_band") {
        cfg.quadrature.near_band = static_cast<int>(positive_int("near_band"));
      } else if (key == "tol") {
        cfg.solver.tol = detail::parse_number(value);
        if (cfg.solver.tol < 0.0) throw Error(ErrorKind::invalid_parameter, "tol must be >= 0");
      } else if (key == "max_iter") {
        cfg.solver.max_iter = static_cast<int>(positive_int("max_iter"));
      } else if (key == "method") {
        if (value == "newton") cfg.solver.method = Method::newton;
        else if (value == "nlcg") cfg.solver.method = Method::nlcg;
        else if (value == "gradient") cfg.solver.method = Method::gradient;
        else throw Error(ErrorKind::invalid_input, "method must be newton, nlcg or gradient");
      } else if (key == "trials") {
        cfg.trials = static_cast<int>(positive_int("trials"));
      } else if (key == "functions") {
        cfg.functions = static_cast<int>(positive_int("functions"));
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(detail::parse_number(value));
      } else {
        throw Error(ErrorKind::invalid_input, "unknown key `" + key + "`");
      }
    } catch (const Error& e) {
      issues.push_back({lineno, e.kind(), e.what()});
    }
  }

  if (!cfg.command) cfg.command = fallback;
  // Cross-field requirements.
  auto missing = [&](const char* key) { issues.push_back({0, ErrorKind::invalid_input, std::string("missing required key `") + key + "`"}); };
  if (cfg.command) {
    switch (*cfg.command) {
      case Command::tilde:
        if (!cfg.G) missing("G");
        break;
      case Command::bbm:
      case Command::gamma:
        if (!cfg.G) missing("G");
        if (cfg.s_list.empty()) missing("s_list");
        break;
      case Command::poincare:
        if (!cfg.G) missing("G");
        if (!cfg.s && cfg.s_list.empty()) missing("s");
        break;
      case Command::solve:
        if (!cfg.G) missing("G");
        if (!cfg.s) missing("s");
        break;
      case Command::check:
        break;
    }
  }
  if (!issues.empty()) {
    std::string msg;
    for (const auto& i : issues) {
      if (!msg.empty()) msg += "; ";
      msg += (i.line > 0 ? "line " + std::to_string(i.line) + ": " : std::string()) + i.message;
    }
    throw Error(issues.front().kind, msg);
  }
  return cfg;
}

}  // namespace orlicz
