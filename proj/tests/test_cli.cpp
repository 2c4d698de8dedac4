#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "orlicz/cli.hpp"

using namespace orlicz;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("orlicz_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "experiment.cfg";
  std::ofstream(p) << text;
  return p;
}

int run_text(Command c, const std::string& text, const fs::path& out, std::string* err_text = nullptr) {
  std::ostringstream err;
  int code = 0;
  try {
    code = run(c, parse_config(text, c), out, err);
  } catch (const Error& e) {
    err << e.what();
    code = is_validation_error(e.kind()) ? 1 : 2;
  }
  if (err_text) *err_text = err.str();
  return code;
}

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::numeric_overflow;
}

std::string parse_error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ParseConfig, BbmExample) {
  const auto c = parse_config("command = bbm\nG = power(2)\nN = 1025\ns_list = 0.9,0.95,0.99\ndomain = -1,1");
  ASSERT_TRUE(c.command);
  EXPECT_EQ(*c.command, Command::bbm);
  ASSERT_TRUE(c.G);
  EXPECT_EQ(c.G->kind(), Kind::power);
  EXPECT_EQ(c.N, 1025u);
  EXPECT_EQ(c.s_list, (std::vector<double>{0.9, 0.95, 0.99}));
  EXPECT_EQ(c.left, -1.0);
  EXPECT_EQ(c.right, 1.0);
}

TEST(ParseConfig, UnknownCommand) {
  EXPECT_EQ(parse_error_kind("command = warp"), ErrorKind::invalid_input);
  EXPECT_NE(parse_error_message("command = warp").find("unknown command"), std::string::npos);
}

TEST(ParseConfig, InvalidExponentSurfacesFromConstructor) {
  EXPECT_EQ(parse_error_kind("G = power(0.5)"), ErrorKind::invalid_parameter);
}

TEST(ParseConfig, CommentsAndBlankLines) {
  const auto c = parse_config("# tilde run\n\ncommand = tilde   # inline\nG = power(3)\nn = 2\na_list = 1, 2\n");
  EXPECT_EQ(*c.command, Command::tilde);
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.a_list, (std::vector<double>{1.0, 2.0}));
}

TEST(ParseConfig, ErrorsNameEveryLine) {
  const std::string text = "command = bbm\nG = power(2)\nbogus = 1\ns_list = 0.5, x\nN = 2.5\nG = power(3)\n";
  const auto msg = parse_error_message(text);
  for (const char* want : {"line 3", "unknown key `bogus`", "line 4", "line 5", "line 6", "duplicate key `G`"})
    EXPECT_NE(msg.find(want), std::string::npos) << want << " missing from: " << msg;
  EXPECT_EQ(msg.find("line 1:"), std::string::npos);
}

TEST(ParseConfig, MissingRequiredKeys) {
  const auto msg = parse_error_message("command = bbm\n");
  EXPECT_NE(msg.find("missing required key `G`"), std::string::npos) << msg;
  EXPECT_NE(msg.find("missing required key `s_list`"), std::string::npos) << msg;
  EXPECT_NE(parse_error_message("command = solve\nG = power(2)\n").find("`s`"), std::string::npos);
  EXPECT_NO_THROW(parse_config("command = check\n"));
}

TEST(ParseConfig, MalformedValues) {
  EXPECT_EQ(parse_error_kind("line without equals"), ErrorKind::invalid_input);
  EXPECT_EQ(parse_error_kind("domain = 1, 0"), ErrorKind::invalid_parameter);
  EXPECT_EQ(parse_error_kind("n = 4"), ErrorKind::unsupported_dimension);
  EXPECT_EQ(parse_error_kind("method = bfgs"), ErrorKind::invalid_input);
  EXPECT_EQ(parse_error_kind("N = 2"), ErrorKind::invalid_parameter);
  EXPECT_EQ(parse_error_kind("rhs = sin(2"), ErrorKind::invalid_input);
  EXPECT_EQ(parse_error_kind("u = triangle"), ErrorKind::invalid_input);
}

TEST(ParseConfig, RhsSpecs) {
  EXPECT_EQ(parse_config("rhs = zero").rhs(0.3), 0.0);
  EXPECT_EQ(parse_config("rhs = 2.5").rhs(0.3), 2.5);
  EXPECT_EQ(parse_config("rhs = const(-1)").rhs(0.7), -1.0);
  EXPECT_NEAR(parse_config("rhs = sin(1)").rhs(0.5), 1.0, 1e-15);
}

TEST(FunctionSpec, Grammar) {
  EXPECT_EQ(parse_function_spec("power(2)")(3.0), 9.0);
  EXPECT_EQ(parse_function_spec(" max( power(2) , power(3) ) ")(2.0), 8.0);
  EXPECT_EQ(parse_function_spec("sum(2*power(2), power(3))")(2.0), 16.0);
  EXPECT_EQ(parse_function_spec("compose(power(2), power(3))")(2.0), 64.0);
  EXPECT_EQ(parse_function_spec("power_log(2)").kind(), Kind::power_log);
  for (const char* bad : {"", "power", "power(2", "power(2))", "cube(2)", "max()", "power(x)"})
    EXPECT_THROW(parse_function_spec(bad), Error) << bad;
}

TEST(Run, TildeMatchesClosedForm) {
  const auto out = scratch("tilde");
  ASSERT_EQ(run_text(Command::tilde, "G = power(2)\nn = 1\na_list = 0.25, 0.5, 1, 2, 4\n", out), 0);
  const auto rows = read_rows(out / "tilde.csv");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "tilde_quadrature", "tilde_closed_form", "rel_diff"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 4u);
    EXPECT_LE(std::stod(rows[i][3]), 1e-6);
  }
}

TEST(Run, TildeWithoutClosedFormLeavesColumnEmpty) {
  const auto out = scratch("tilde_empty");
  ASSERT_EQ(run_text(Command::tilde, "G = compose(power(2), power(1.5))\na_list = 1\n", out), 0);
  const auto rows = read_rows(out / "tilde.csv");
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_EQ(rows[1].size(), 4u);
  EXPECT_TRUE(rows[1][2].empty());
  EXPECT_TRUE(rows[1][3].empty());
}

TEST(Run, SolveWithZeroLoadWritesZeros) {
  const auto out = scratch("solve");
  ASSERT_EQ(run_text(Command::solve, "G = power(2)\ns = 0.5\nN = 17\nrhs = zero\n", out), 0);
  std::ifstream in(out / "solution.csv");
  const auto u = read_csv(in);
  EXPECT_EQ(u.size(), 17u);
  EXPECT_TRUE(u.is_zero());
  const auto summary = slurp(out / "summary.txt");
  for (const char* key : {"energy=0\n", "iterations=0\n", "grad_norm=", "weak_residual=", "converged=true"})
    EXPECT_NE(summary.find(key), std::string::npos) << key;
}

TEST(Run, BbmHasExtrapolatedRow) {
  const auto out = scratch("bbm");
  ASSERT_EQ(run_text(Command::bbm, "G = power(2)\nN = 65\ns_list = 0.5, 0.9\ndomain = -1, 1\n", out), 0);
  const auto rows = read_rows(out / "bbm.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"s", "scaled_modular", "target", "rel_gap"}));
  EXPECT_EQ(rows.back().front(), "EXTRAPOLATED");
}

TEST(Run, PoincareAndGammaWriteTables) {
  const auto out = scratch("poincare_gamma");
  ASSERT_EQ(run_text(Command::poincare, "G = power(2)\nN = 33\ns = 0.5\ns_list = 0.9\nu = bump\n", out), 0);
  const auto p = read_rows(out / "poincare.csv");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[1][3], "true");
  ASSERT_EQ(run_text(Command::gamma, "G = power(2)\nN = 33\ns_list = 0.6, 0.9\nrhs = 1\n", out), 0);
  const auto g = read_rows(out / "gamma.csv");
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g.back().front(), "LOCAL");
  EXPECT_TRUE(fs::exists(out / "local_solution.csv"));
}

TEST(Run, ExitCodes) {
  const auto out = scratch("codes");
  std::string err;
  // Validation failures.
  EXPECT_EQ(run_text(Command::tilde, "G = power(0.5)\n", out, &err), 1);
  EXPECT_EQ(run_text(Command::solve, "G = power(2)\ns = 1.5\n", out, &err), 1);
  EXPECT_NE(err.find("invalid-parameter"), std::string::npos) << err;
  EXPECT_EQ(err.find('\n'), err.size() - 1) << "diagnostic should be one line: " << err;
  std::ostringstream e2;
  EXPECT_EQ(run(Command::bbm, parse_config("command = tilde\nG = power(2)\n"), out, e2), 1);
  // Numeric failure: t^2 |log t| vanishes at 1, so the contraction property fails.
  EXPECT_EQ(run_text(Command::check, "G = power_abslog(2)\ntrials = 50\nfunctions = 1\ns_list = 0.5\n", out, &err), 2);
  EXPECT_NE(err.find("check.csv"), std::string::npos);
  EXPECT_EQ(run_text(Command::check, "G = power(2)\ntrials = 50\nfunctions = 1\ns_list = 0.5\n", out, &err), 0);
}

TEST(Run, RunFileReportsUnreadableAndUnknown) {
  const auto out = scratch("run_file");
  std::ostringstream err;
  EXPECT_EQ(run_file("tilde", out / "missing.cfg", out, err), 1);
  EXPECT_EQ(run_file("warp", write_config(out, "G = power(2)\n"), out, err), 1);
  EXPECT_EQ(run_file("tilde", write_config(out, "G = power(2)\na_list = 1\n"), out, err), 0);
}

TEST(Run, Deterministic) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string solve_cfg = "G = power(3)\ns = 0.6\nN = 33\nrhs = sin(1)\n";
  const std::string bbm_cfg = "G = max(power(2), power(3))\nN = 129\ns_list = 0.5, 0.9\ndomain = -1, 1\nu = hat+bump\n";
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(run_text(Command::solve, solve_cfg, dir), 0);
    ASSERT_EQ(run_text(Command::bbm, bbm_cfg, dir), 0);
  }
  for (const char* f : {"solution.csv", "summary.txt", "bbm.csv"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

#ifdef ORLICZ_CLI_PATH
namespace {

int invoke(const std::string& args) {
  const std::string cmd = std::string(ORLICZ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Binary, Invocation) {
  const auto out = scratch("binary");
  const auto cfg = write_config(out, "command = tilde\nG = power(3)\nn = 3\n");
  EXPECT_EQ(invoke("tilde --config " + cfg.string() + " --out " + (out / "run").string()), 0);
  EXPECT_TRUE(fs::exists(out / "run" / "tilde.csv"));
  EXPECT_EQ(invoke("solve --config " + cfg.string() + " --out " + out.string()), 1);
  EXPECT_EQ(invoke("tilde"), 1);
  EXPECT_EQ(invoke("--help"), 0);
}

#ifdef ORLICZ_CONFIG_DIR
TEST(Binary, SampleConfigsParse) {
  for (const auto& entry : fs::directory_iterator(ORLICZ_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    const auto cfg = parse_config(slurp(entry.path()));
    EXPECT_TRUE(cfg.command.has_value()) << entry.path();
  }
}
#endif
#endif
