#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "streampca/stats.hpp"

using namespace streampca;

TEST(EmpiricalCdf, ThreePoints) {
  const EmpiricalCdf f({3.0, 1.0, 2.0});
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_DOUBLE_EQ(f(1.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(f(2.5), 2.0 / 3.0);
  EXPECT_EQ(f(3.0), 1.0);
  EXPECT_EQ(f.left_limit(1.0), 0.0);
  EXPECT_DOUBLE_EQ(f.left_limit(3.0), 2.0 / 3.0);
  EXPECT_EQ(f.sorted_samples(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_DOUBLE_EQ(f.mean(), 2.0);
}

TEST(EmpiricalCdf, TiesJumpTogether) {
  const EmpiricalCdf f({5.0, 5.0, 5.0});
  EXPECT_EQ(f(4.999), 0.0);
  EXPECT_EQ(f(5.0), 1.0);
  EXPECT_EQ(f.left_limit(5.0), 0.0);
}

TEST(EmpiricalCdf, SingleSample) {
  const EmpiricalCdf f({0.25});
  EXPECT_EQ(f.count(), 1u);
  EXPECT_EQ(f(0.2), 0.0);
  EXPECT_EQ(f(0.25), 1.0);
  EXPECT_EQ(f.quantile(0.5), 0.25);
}

TEST(EmpiricalCdf, RejectsBadInput) {
  EXPECT_THROW(EmpiricalCdf({}), std::invalid_argument);
  EXPECT_THROW(EmpiricalCdf({1.0, std::numeric_limits<double>::quiet_NaN()}),
               std::invalid_argument);
  EXPECT_THROW(EmpiricalCdf({std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST(Quantile, Examples) {
  const EmpiricalCdf f({4.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(f.quantile(0.0), 1.0);
  EXPECT_EQ(f.quantile(0.25), 1.0);
  EXPECT_EQ(f.quantile(0.26), 2.0);
  EXPECT_EQ(f.quantile(0.5), 2.0);
  EXPECT_EQ(f.quantile(1.0), 4.0);
}

TEST(Quantile, InvertsCdf) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<double> xs(257);
  for (double& x : xs) x = normal(gen);
  const EmpiricalCdf f(xs);
  for (double p = 0.01; p < 1.0; p += 0.0137) {
    const double q = f.quantile(p);
    EXPECT_GE(f(q), p);
    EXPECT_LT(f.left_limit(q), p);
  }
}

TEST(Kolmogorov, Examples) {
  const EmpiricalCdf a({1.0, 2.0, 3.0});
  EXPECT_EQ(kolmogorov_distance(a, a), 0.0);
  EXPECT_EQ(kolmogorov_distance(EmpiricalCdf({0.0}), EmpiricalCdf({1.0})), 1.0);
  EXPECT_DOUBLE_EQ(kolmogorov_distance(EmpiricalCdf({1.0, 2.0}), EmpiricalCdf({1.5})), 0.5);
}

TEST(Kolmogorov, SupremumCanSitAtALeftLimit) {
  // F jumps to 1 at 1; G jumps 0 -> 1/2 -> 1 at 1 and 2. Largest gap 1/2.
  EXPECT_DOUBLE_EQ(kolmogorov_distance(EmpiricalCdf({1.0}), EmpiricalCdf({1.0, 2.0})), 0.5);
}

TEST(Kolmogorov, MatchesBruteForceOverGrid) {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> pick(0, 20);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> xs(1 + rep % 7), ys(1 + rep % 5);
    for (double& x : xs) x = pick(gen);
    for (double& y : ys) y = pick(gen);
    const EmpiricalCdf f(xs), g(ys);
    // Integer support: checking every half-integer and integer is exhaustive.
    double brute = 0.0;
    for (double t = -1.0; t <= 21.0; t += 0.5) brute = std::max(brute, std::abs(f(t) - g(t)));
    EXPECT_DOUBLE_EQ(kolmogorov_distance(f, g), brute);
  }
}

TEST(Kolmogorov, MetricProperties) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  auto draw = [&](std::size_t k, double shift) {
    std::vector<double> v(k);
    for (double& x : v) x = normal(gen) + shift;
    return EmpiricalCdf(v);
  };
  for (int rep = 0; rep < 20; ++rep) {
    const EmpiricalCdf a = draw(30, 0.0), b = draw(45, 0.3), c = draw(17, -0.2);
    const double ab = kolmogorov_distance(a, b);
    EXPECT_EQ(ab, kolmogorov_distance(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_LE(ab, kolmogorov_distance(a, c) + kolmogorov_distance(c, b) + 1e-15);
  }
}
