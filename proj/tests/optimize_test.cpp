// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mexec/optimize.hpp"
#include "mexec/sampling.hpp"

namespace mexec {
namespace {

double row_two(double x) {
  double y = x <= 1.0 ? (x + 1.0) * (x + 1.0) : x * x;
  return (y - 4.0) * (y - 4.0);
}

TEST(Brent, Quadratic) {
  LineMin m = brent_line_min([](double t) { return (t - 1.0) * (t - 1.0); }, {-10.0, 0.0, 10.0});
  EXPECT_NEAR(m.t, 1.0, 1e-6);
}

TEST(Brent, Kink) {
  LineMin m = brent_line_min([](double t) { return std::fabs(t); }, {-1.0, 0.1, 2.0});
  EXPECT_NEAR(m.t, 0.0, 1e-6);
}

TEST(Brent, Plateau) {
  auto g = [](double t) { return t <= 1.0 ? 0.0 : (t - 1.0) * (t - 1.0) + 1e-6; };
  double grid_min = INFINITY;
  for (int i = 0; i <= 5000; ++i) grid_min = std::min(grid_min, g(-2.0 + i * 0.001));
  LineMin m = brent_line_min(g, {-2.0, 0.0, 3.0});
  EXPECT_EQ(m.value, grid_min);
  EXPECT_EQ(m.value, 0.0);
}

TEST(Brent, InvalidBracket) {
  try {
    brent_line_min([](double t) { return t; }, {-1.0, 0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidBracket);
  }
  EXPECT_THROW(brent_line_min([](double t) { return t * t; }, {1.0, 0.0, 2.0}), Error);
}

TEST(Powell, OneDimensional) {
  Objective f(1, [](const Vec& x) { return (x[0] - 1.0) * (x[0] - 1.0); });
  LocalMin m = powell_minimize(f, {10.0});
  EXPECT_NEAR(m.x[0], 1.0, 1e-6);
  EXPECT_NEAR(m.value, 0.0, 1e-12);
}

TEST(Powell, SeparableQuadratic) {
  Objective f(2, [](const Vec& x) { return x[0] * x[0] + 10.0 * x[1] * x[1]; });
  LocalMin m = powell_minimize(f, {3.0, 3.0});
  EXPECT_NEAR(m.x[0], 0.0, 1e-5);
  EXPECT_NEAR(m.x[1], 0.0, 1e-5);
}

TEST(Powell, TableRowTwoNeverNegative) {
  Objective f(1, [](const Vec& x) { return row_two(x[0]); });
  LocalMin m = powell_minimize(f, {0.0});
  EXPECT_GE(m.value, 0.0);
  EXPECT_LE(m.value, row_two(0.0));
  bool at_root = std::fabs(m.x[0] + 3.0) < 1e-6 || std::fabs(m.x[0] - 1.0) < 1e-6;
  if (at_root) EXPECT_EQ(m.value, 0.0);
}

TEST(Powell, ConvexQuadraticsUpToFiveDimensions) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      // A = B^T B + I, minimizer c.
      std::vector<std::vector<double>> B(n, std::vector<double>(n));
      for (auto& row : B)
        for (double& v : row) v = u(rng);
      std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) A[i][j] += B[k][i] * B[k][j];
        }
        A[i][i] += 1.0;
      }
      Vec c(n);
      for (double& v : c) v = 5.0 * u(rng);
      Objective f(n, [A, c, n](const Vec& x) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += (x[i] - c[i]) * A[i][j] * (x[j] - c[j]);
        return s;
      });
      Vec x0(n);
      for (double& v : x0) v = 10.0 * u(rng);
      LocalMinConfig cfg;
      cfg.max_powell_rounds = n + 2;
      cfg.polish = false;
      LocalMin m = powell_minimize(f, x0, cfg);
      for (int i = 0; i < n; ++i) EXPECT_NEAR(m.x[i], c[i], 1e-5) << "n=" << n << " trial=" << trial;
      EXPECT_LE(m.rounds, n + 2);
    }
  }
}

TEST(Powell, NeverWorseThanStart) {
  Objective f(2, [](const Vec& x) { return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]) + 0.1 * x[0] * x[0]; });
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    Vec x0 = {u(rng), u(rng)};
    EXPECT_LE(powell_minimize(f, x0).value, f(x0));
  }
}

TEST(Objective, NonFiniteBecomesSentinel) {
  Objective f(1, [](const Vec& x) { return std::log(x[0]); });
  EXPECT_EQ(f({-1.0}), kSentinel);
  EXPECT_EQ(f({INFINITY}), kSentinel);
  EXPECT_EQ(f.evals(), 2);
}

TEST(Basinhopping, FindsARootOfRowTwo) {
  Objective f(1, [](const Vec& x) { return row_two(x[0]); });
  MCMCConfig cfg;
  cfg.seed = 8;
  cfg.local.stop_at = 0.0;
  BasinResult r = basinhopping(f, {-500.0}, cfg, [](const BasinStep& s) { return s.f_best == 0.0; });
  EXPECT_EQ(r.value, 0.0);
  bool near = false;
  for (double root : {-3.0, 1.0, 2.0}) near = near || std::fabs(r.x[0] - root) < 1e-6;
  EXPECT_TRUE(near) << r.x[0];
}

TEST(Basinhopping, ConstantObjectiveAcceptsEverything) {
  Objective f(1, [](const Vec&) { return 1.0; });
  MCMCConfig cfg;
  cfg.n_iter = 20;
  BasinResult r = basinhopping(f, {0.0}, cfg);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.accepted, 20);
}

TEST(Basinhopping, ZeroIterationsIsPowell) {
  Objective f(1, [](const Vec& x) { return (x[0] - 1.0) * (x[0] - 1.0); });
  MCMCConfig cfg;
  cfg.n_iter = 0;
  BasinResult r = basinhopping(f, {7.0}, cfg);
  LocalMin m = powell_minimize(f, {7.0});
  EXPECT_EQ(r.x, m.x);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
}

TEST(Basinhopping, MonotoneRecordAndDeterminism) {
  Objective f(2, [](const Vec& x) {
    return 2.0 + std::sin(x[0]) * std::sin(x[1]) + 0.001 * (x[0] * x[0] + x[1] * x[1]);
  });
  MCMCConfig cfg;
  cfg.seed = 31;
  cfg.n_iter = 15;
  std::vector<double> accepted;
  BasinResult a = basinhopping(f, {40.0, -40.0}, cfg, [&](const BasinStep& s) {
    if (s.accepted) accepted.push_back(s.f_current);
    return false;
  });
  for (double v : accepted) EXPECT_LE(a.value, v);
  EXPECT_LE(a.value, f({40.0, -40.0}));
  BasinResult b = basinhopping(f, {40.0, -40.0}, cfg);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.value, b.value);
}

TEST(Basinhopping, CallbackStopsEarly) {
  Objective f(1, [](const Vec& x) { return x[0] * x[0]; });
  MCMCConfig cfg;
  int calls = 0;
  BasinResult r = basinhopping(f, {3.0}, cfg, [&](const BasinStep&) { return ++calls == 2; });
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.iterations, 1);
}

TEST(Metropolis, LnTwoGapAcceptsHalf) {
  std::mt19937_64 rng(12345);
  int accepted = 0;
  for (int i = 0; i < 10000; ++i) accepted += metropolis_accept(3.0, 3.0 + std::log(2.0), 1.0, rng);
  EXPECT_NEAR(accepted / 10000.0, 0.5, 0.05);
  EXPECT_TRUE(metropolis_accept(3.0, 2.0, 1.0, rng));
}

TEST(Sampling, MixtureAndDeterminism) {
  Box box;
  std::mt19937_64 a(derive_seed(9, 0)), b(derive_seed(9, 0));
  int in_box = 0, outside = 0;
  for (int i = 0; i < 4000; ++i) {
    Vec x = sample_start(1, box, a);
    EXPECT_EQ(x, sample_start(1, box, b));
    EXPECT_TRUE(std::isfinite(x[0]));
    (std::fabs(x[0]) <= 1e3 ? in_box : outside)++;
  }
  EXPECT_GT(in_box, 3000);
  EXPECT_GT(outside, 200);
  EXPECT_NE(derive_seed(9, 0), derive_seed(9, 1));
  EXPECT_NE(derive_seed(9, 0), derive_seed(10, 0));
}

}  // namespace
}  // namespace mexec
