#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/properties.hpp"
#include "orlicz/transforms.hpp"

using namespace orlicz;

namespace {

OrliczFunction max23() { return make_combination(CombineMode::max, {make_power(2.0), make_power(3.0)}, {1.0, 1.0}); }

// Trapezoid: c on the interior nodes of (0, 1), zero at both ends.
GridFunction plateau(std::size_t nodes, double c) {
  std::vector<double> v(nodes, c);
  v.front() = v.back() = 0.0;
  return GridFunction(0.0, 1.0, v);
}

double integral(const GridFunction& u) {
  double acc = 0.0;
  for (std::size_t e = 0; e < u.elements(); ++e) acc += 0.5 * u.spacing() * (u[e] + u[e + 1]);
  return acc;
}

}  // namespace

TEST(GridFunctionType, ValidatesInput) {
  EXPECT_THROW(GridFunction(0.0, 1.0, std::vector<double>{1.0}), Error);
  EXPECT_THROW(GridFunction(1.0, 0.0, std::vector<double>{0.0, 0.0}), Error);
  EXPECT_THROW(GridFunction(0.0, 1.0, std::vector<double>{0.0, NAN}), Error);
}

TEST(GridFunctionType, InterpolatesAndZeroExtends) {
  const auto u = hat(-1.0, 1.0, 5);
  EXPECT_DOUBLE_EQ(u(0.0), 1.0);
  EXPECT_DOUBLE_EQ(u(0.25), 0.75);
  EXPECT_EQ(u(1.5), 0.0);
  EXPECT_EQ(u(-3.0), 0.0);
  EXPECT_TRUE(u.in_zero_cone());
  EXPECT_FALSE(plateau(5, 1.0).with_values({1, 1, 1, 1, 1}).in_zero_cone());
}

TEST(GridFunctionType, CsvRoundTripIsExact) {
  const auto u = bump(-0.3, 1.7, 33, 0.123456789);
  std::stringstream ss;
  write_csv(ss, u);
  EXPECT_EQ(ss.str().substr(0, 4), "x,u\n");
  const auto v = read_csv(ss);
  ASSERT_TRUE(v.same_mesh(u));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(v[i], u[i]);
}

TEST(GridFunctionType, CsvRejectsGarbage) {
  std::stringstream bad("x,u\n0,1\nfoo,2\n");
  EXPECT_THROW(read_csv(bad), Error);
}

TEST(Modular, HatSquare) {
  EXPECT_NEAR(modular(make_power(2.0), hat(-1.0, 1.0, 1025)), 2.0 / 3.0, 1e-6);
  EXPECT_EQ(modular(make_power(2.0), GridFunction::zero(0.0, 1.0, 9)), 0.0);
}

TEST(Modular, ThinRampPlateau) {
  const double c = 1.7;
  double prev = 0.0;
  for (std::size_t N : {17u, 129u, 1025u, 8193u}) {
    const auto u = plateau(N, c);
    const double h = u.spacing();
    const double exact = c * c * (1.0 - 2.0 * h) + 2.0 * h * c * c / 3.0;
    const double m = modular(make_power(2.0), u);
    EXPECT_NEAR(m, exact, 1e-12);
    EXPECT_GT(m, prev);
    prev = m;
  }
  EXPECT_NEAR(prev, c * c, 1e-3);
}

TEST(Modular, SignChangesMatchSimpson) {
  const auto u = GridFunction::sample(0.0, 1.0, 40, [](double x) { return std::sin(7.0 * x) * (1 - x); });
  for (const auto& G : {make_power(1.5), make_power_log(2.0), max23()}) {
    const double o = oracle::simpson([&](double x) { return G(std::abs(u(x))); }, 0.0, 1.0, 400000);
    EXPECT_NEAR(modular(G, u), o, 1e-7 * o) << G.describe();
  }
}

TEST(GradientModular, Examples) {
  const auto G = make_power(2.0);
  EXPECT_DOUBLE_EQ(gradient_modular(G, hat(-1.0, 1.0, 1025)), 2.0);
  EXPECT_EQ(gradient_modular(G, GridFunction::zero(0.0, 1.0, 3)), 0.0);
  const auto u = GridFunction::sample(0.0, 1.0, 2049, [](double x) { return x * (1 - x) / 4; });
  const double o = oracle::simpson([](double x) { return std::pow((1 - 2 * x) / 4, 2); }, 0.0, 1.0);
  EXPECT_NEAR(o, 1.0 / 48.0, 1e-12);
  EXPECT_NEAR(gradient_modular(G, u), o, 1e-5);
}

TEST(FractionalModular, ZeroAndValidation) {
  EXPECT_EQ(fractional_modular(make_power(2.0), 0.5, GridFunction::zero(0.0, 1.0, 9)), 0.0);
  for (double s : {0.0, 1.0, -0.1}) {
    try {
      fractional_modular(make_power(2.0), s, hat(-1, 1, 9));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
    }
  }
  QuadratureConfig bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(fractional_modular(make_power(2.0), 0.5, hat(-1, 1, 9), bad), Error);
}

TEST(FractionalModular, HatMatchesBruteForce) {
  const auto G = make_power(2.0);
  const auto u = hat(-1.0, 1.0, 513);
  const double o = oracle::brute_fractional(G, 0.5, u);
  EXPECT_NEAR(fractional_modular(G, 0.5, u), o, 0.01 * o);
}

TEST(FractionalModular, RandomFunctionsMatchBruteForce) {
  std::mt19937_64 rng(3);
  for (const auto& G : {make_power(3.0), make_power_log(2.0), max23()})
    for (double s : {0.25, 0.75}) {
      const auto u = random_w0_function(rng, 0.0, 2.0, 65);
      const double o = oracle::brute_fractional(G, s, u, 1000, 1500);
      EXPECT_NEAR(fractional_modular(G, s, u), o, 0.01 * o) << G.describe() << " s=" << s;
    }
}

TEST(FractionalModular, PowerHomogeneity) {
  const auto u = bump(-1.0, 1.0, 129);
  for (double s : {0.2, 0.8}) {
    const double a = fractional_modular(make_power(2.0), s, u);
    EXPECT_NEAR(fractional_modular(make_power(2.0), s, u.scaled(2.0)), 4.0 * a, 1e-12 * a);
    const double b = fractional_modular(make_power(3.0), s, u);
    EXPECT_NEAR(fractional_modular(make_power(3.0), s, u.scaled(-0.5)), b / 8.0, 1e-12 * b);
  }
}

TEST(FractionalModular, RefinementAgrees) {
  const auto u = hat(-1.0, 1.0, 65);
  QuadratureConfig q;
  q.estimate_error = true;
  q.rel_tol = 1e-4;
  for (const auto& G : {make_power(2.0), make_power_log(2.0)}) {
    const double fine = fractional_modular(G, 0.6, u, q);
    EXPECT_NEAR(fractional_modular(G, 0.6, u), fine, 1e-4 * fine);
  }
}

TEST(FractionalModular, BitIdenticalAcrossThreadCounts) {
  const auto u = bump(0.0, 1.0, 257).combine(1.0, hat(0.0, 1.0, 257), 0.3);
  const auto G = make_power_log(2.0);
  setenv("OF_THREADS", "1", 1);
  const double one = fractional_modular(G, 0.7, u);
  setenv("OF_THREADS", "4", 1);
  const double four = fractional_modular(G, 0.7, u);
  unsetenv("OF_THREADS");
  EXPECT_EQ(one, four);
}

TEST(Luxemburg, Examples) {
  const auto G = make_power(2.0);
  auto phi = [&](const GridFunction& v) { return modular(G, v); };
  EXPECT_EQ(luxemburg_norm(phi, GridFunction::zero(-1, 1, 5)), 0.0);
  const auto u = hat(-1.0, 1.0, 1025);
  EXPECT_NEAR(luxemburg_norm(phi, u), std::sqrt(2.0 / 3.0), 1e-6);
  const auto unit = u.scaled(1.0 / std::sqrt(modular(G, u)));
  EXPECT_NEAR(modular(G, unit), 1.0, 1e-12);
  EXPECT_NEAR(luxemburg_norm(phi, unit), 1.0, 1e-8);
}

TEST(Luxemburg, BisectionBrackets) {
  const auto G = make_power_log(2.0);
  auto phi = [&](const GridFunction& v) { return modular(G, v); };
  for (double amp : {1e-3, 0.7, 40.0}) {
    const auto u = bump(0.0, 3.0, 65, amp);
    const double lam = luxemburg_norm(phi, u);
    const double d = 1e-6 * lam;
    EXPECT_LE(phi(u.scaled(1.0 / (lam + d))), 1.0);
    EXPECT_GE(phi(u.scaled(1.0 / (lam - d))), 1.0);
  }
}

TEST(Luxemburg, FractionalAndGradientGauges) {
  const auto G = make_power(2.0);
  const auto u = hat(-1.0, 1.0, 129);
  const double frac = luxemburg_norm([&](const GridFunction& v) { return fractional_modular(G, 0.5, v); }, u);
  EXPECT_NEAR(frac, std::sqrt(fractional_modular(G, 0.5, u)), 1e-8);
  const double grad = luxemburg_norm([&](const GridFunction& v) { return gradient_modular(G, v); }, u);
  EXPECT_NEAR(grad, std::sqrt(2.0), 1e-8);
}

TEST(Luxemburg, DivergentModular) {
  try {
    luxemburg_norm([](const GridFunction&) { return 2.0; }, hat(-1, 1, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergent_modular);
  }
}

TEST(Translate, Examples) {
  const auto u = bump(-1.0, 1.0, 17);
  const auto t0 = translate(u, 0.0);
  ASSERT_TRUE(t0.same_mesh(u));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(t0[i], u[i]);
  const double h = u.spacing();
  const auto t1 = translate(u, h);
  // tau_h u(x) = u(x + h): node i of the padded mesh holds u[i].
  ASSERT_EQ(t1.size(), u.size() + 1);
  EXPECT_NEAR(t1.left(), u.left() - h, 1e-15);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(t1[i], u[i]);
  EXPECT_THROW(translate(u, 2.0), Error);
}

TEST(Translate, NonAlignedShiftInterpolates) {
  const auto u = hat(0.0, 1.0, 11);
  const auto t = translate(u, 0.033);
  EXPECT_LE(t.left(), u.left() - 0.033);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t[i], u(t.node(i) + 0.033), 1e-12) << i;
}

TEST(Translate, BoundHoldsOnHat) {
  const auto G = make_power(2.0);
  const auto u = hat(-1.0, 1.0, 257);
  const double s = 0.5, h = 0.5;
  const auto [a, b] = align(translate(u, h), u);
  const double lhs = modular(G, a - b);
  const double rhs = std::pow(2.0, 2.0 + s) * G.doubling_constant() / 2.0 * std::pow(h, s) * fractional_modular(G, s, u);
  EXPECT_GT(lhs, 0.0);
  EXPECT_LE(lhs, rhs);
}

TEST(Mollify, ZeroAndMass) {
  EXPECT_TRUE(mollify(GridFunction::zero(0.0, 1.0, 33), 0.1).is_zero());
  const auto u = hat(-1.0, 1.0, 257).combine(1.0, bump(-1.0, 1.0, 257), 2.0);
  for (double eps : {0.02, 0.1, 0.3}) EXPECT_NEAR(integral(mollify(u, eps)), integral(u), 1e-8) << eps;
}

TEST(Mollify, DegenerateWarning) {
  const auto u = hat(-1.0, 1.0, 9);
  std::vector<std::string> warnings;
  const auto v = mollify(u, 0.1, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  ASSERT_TRUE(v.same_mesh(u));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(v[i], u[i]);
  EXPECT_THROW(mollify(u, -1.0), Error);
}

TEST(Mollify, DoesNotIncreaseFractionalModular) {
  const auto G = make_power(2.0);
  const auto u = hat(-1.0, 1.0, 257);
  const auto ue = mollify(u, 0.1);
  EXPECT_GT(ue.size(), u.size());
  EXPECT_LE(fractional_modular(G, 0.5, ue), fractional_modular(G, 0.5, u) * (1 + 1e-3));
}

TEST(Truncate, Examples) {
  const auto u = hat(-1.0, 1.0, 33);
  const auto same = truncate(u, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(same[i], u[i]);
  EXPECT_TRUE(truncate(GridFunction::zero(-1, 1, 9), 0.5).is_zero());
  EXPECT_DOUBLE_EQ(cutoff(0.3, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(cutoff(0.75, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(cutoff(-1.0, 0.5), 0.0);
  EXPECT_THROW(truncate(u, 0.0), Error);
}

TEST(Truncate, BoundHoldsOnHat) {
  const auto G = make_power(2.0);
  const auto u = hat(-1.0, 1.0, 257);
  const double s = 0.5, k = 0.5, C = G.doubling_constant();
  const double lhs = fractional_modular(G, s, truncate(u, k));
  const double rhs = fractional_modular(G, s, u) + 0.5 * C * C * 2.0 * (1.0 / s + 1.0 / (k * (1.0 - s))) * modular(G, u);
  EXPECT_LE(lhs, rhs);
}

TEST(GridProperties, GradientBoundOnHat) {
  const auto G = make_power(2.0);
  const auto u = hat(-1.0, 1.0, 257);
  for (double s : {0.3, 0.6, 0.9})
    EXPECT_LE(fractional_modular(G, s, u),
              2.0 / (1.0 - s) * gradient_modular(G, u) + 4.0 * G.doubling_constant() / s * modular(G, u));
}

TEST(GridProperties, RandomSuiteSmall) {
  GridPropertyOptions o;
  o.functions = 6;
  o.nodes = 129;
  for (const auto& G : {make_power(2.0), max23()})
    for (const auto& r : check_grid_properties(G, o)) {
      EXPECT_EQ(r.trials, 18) << r.name;
      EXPECT_EQ(r.violations, 0) << G.describe() << ": " << r.name << " worst " << r.worst;
    }
}
