#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "streampca/error.hpp"
#include "streampca/reference.hpp"

using namespace streampca;

namespace {

SpectralModel diagonal_model(double l1, double l2) {
  return spectral_decompose(ExplicitCovariance{SymMatrix::diagonal({l1, l2})});
}

}  // namespace

TEST(LambdaPerp, FormulaAndOrdering) {
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{12, 0.01, 1.0, 5.0});
  const double eta = std::log(1000.0);
  const auto rho = lambda_perp(m, eta, 1000);
  ASSERT_EQ(rho.size(), 11u);
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double expect =
        (1 + eta * m.eig.eigenvalues[j + 1] / 1000) / (1 + eta * m.lambda1 / 1000);
    EXPECT_DOUBLE_EQ(rho[j], expect);
    EXPECT_GT(rho[j], 0.0);
    EXPECT_LE(rho[j], 1.0);
    if (j > 0) EXPECT_LE(rho[j], rho[j - 1]);
  }
}

TEST(EstimateM, DiscreteSupportOrthogonalToComplement) {
  const SpectralModel m =
      spectral_decompose(DiscreteLaw{{Vector{1.0, 0.0}, Vector{-1.0, 0.0}}, {0.5, 0.5}});
  RngStream rng(1, {1});
  const SymMatrix mm = estimate_M(m, rng, 10);
  ASSERT_EQ(mm.dim(), 1u);
  EXPECT_EQ(mm(0, 0), 0.0);
}

TEST(EstimateM, DiagonalUniformProductMoment) {
  // (X^T e1)^2 (X^T e2)^2 = l1 l2 Z1^2 Z2^2 with mean l1 l2 and variance
  // l1^2 l2^2 ((9/5)^2 - 1).
  const double l1 = 4.0, l2 = 1.5;
  const SpectralModel m = diagonal_model(l1, l2);
  RngStream rng(2, {1});
  const std::size_t n = 200000;
  const double se = l1 * l2 * std::sqrt((81.0 / 25.0 - 1.0) / n);
  EXPECT_NEAR(estimate_M(m, rng, n)(0, 0), l1 * l2, 5 * se);
  EXPECT_NEAR(exact_M(m)(0, 0), l1 * l2, 1e-12);
}

TEST(EstimateM, DiscreteExactAgreesWithSampling) {
  const DiscreteLaw law{{Vector{2.0, 1.0}, Vector{-0.5, 0.5}, Vector{-1.0, -2.0}},
                        {0.25, 0.5, 0.25}};
  const SpectralModel m = spectral_decompose(law);
  RngStream unused(0, {0});
  const double exact = estimate_M(m, unused, 1)(0, 0);

  RngStream rng(3, {1});
  const std::size_t n = 200000;
  const Vector perp = m.v_perp.column(0);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vector x = sample_x(m, rng);
    const double val = std::pow(dot(x, m.v1) * dot(x, perp), 2);
    s1 += val;
    s2 += val * val;
  }
  const double mean = s1 / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - exact), 5 * se);
}

TEST(EstimateM, KernelMonteCarloMatchesExact) {
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{4, 0.3, 1.0, 2.0});
  const SymMatrix exact = exact_M(m);
  RngStream rng(4, {1});
  const std::size_t n = 200000;
  Matrix sum(3, 3), sumsq(3, 3);
  for (std::size_t k = 0; k < n; ++k) {
    const Vector x = sample_x(m, rng);
    const Vector y = dot(x, m.v1) * transpose_times(m.v_perp, x);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        sum(a, b) += y[a] * y[b];
        sumsq(a, b) += y[a] * y[b] * y[a] * y[b];
      }
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const double mean = sum(a, b) / n;
      const double se = std::sqrt((sumsq(a, b) / n - mean * mean) / n);
      EXPECT_LE(std::abs(mean - exact(a, b)), 5 * se) << a << "," << b;
    }
  }
}

TEST(AssembleVbar, SingleStep) {
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{5});
  const SymMatrix mm = exact_M(m);
  const double eta = 0.7;
  const SymMatrix v = assemble_vbar(mm, lambda_perp(m, eta, 1), eta, 1, m.v_perp);
  const SymMatrix expect = eta * conjugate(m.v_perp, mm);
  EXPECT_LE(frobenius_norm(v - expect), 1e-12 * frobenius_norm(expect));
}

TEST(AssembleVbar, ScalarDirectSummation) {
  const SpectralModel m = diagonal_model(3.0, 1.0);
  const std::size_t n = 250;
  const double eta = std::log(250.0);
  const SymMatrix mm{{2.5}};
  const auto rho = lambda_perp(m, eta, n);
  double direct = 0.0;
  for (std::size_t i = 1; i <= n; ++i) direct += std::pow(rho[0], 2.0 * (i - 1));
  direct *= eta / n * 2.5;
  const SymMatrix v = assemble_vbar(mm, rho, eta, n, m.v_perp);
  EXPECT_NEAR(v(1, 1), direct, 1e-12 * direct);
  EXPECT_NEAR(v(0, 0), 0.0, 1e-15);
}

TEST(AssembleVbar, UnitContractionLimit) {
  const SpectralModel m = diagonal_model(3.0, 1.0);
  const double eta = 2.0;
  const SymMatrix v = assemble_vbar(SymMatrix{{1.5}}, {1.0}, eta, 400, m.v_perp);
  EXPECT_NEAR(v(1, 1), eta * 1.5, 1e-12);
}

TEST(AssembleVbar, MatchesBruteForceSummation) {
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{10, 0.01, 1.0, 5.0});
  const SymMatrix mm = exact_M(m);
  for (std::size_t n : {1u, 2u, 37u, 1000u}) {
    const double eta = std::log(static_cast<double>(n)) + 1.0;
    const auto rho = lambda_perp(m, eta, n);
    Matrix l = Matrix::identity(9);
    Matrix sum(9, 9);
    Matrix lambda(9, 9);
    for (std::size_t j = 0; j < 9; ++j) lambda(j, j) = rho[j];
    for (std::size_t i = 1; i <= n; ++i) {
      sum += l * mm.matrix() * l;
      l = l * lambda;
    }
    sum *= eta / n;
    const SymMatrix brute = conjugate(m.v_perp, SymMatrix(sum));
    const SymMatrix closed = assemble_vbar(mm, rho, eta, n, m.v_perp);
    EXPECT_LE(frobenius_norm(closed - brute), 1e-10 * frobenius_norm(brute)) << "n=" << n;
  }
}

TEST(BuildReference, PsdRangeAndTrace) {
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{15});
  const ReferenceCovariance ref = build_reference(m, exact_M(m), std::log(2000.0), 2000);
  EXPECT_LE(norm(ref.vbar * m.v1), 1e-10);
  const WeightedChiSq law = chisq_weights(ref.vbar);
  for (double w : law.weights) EXPECT_GE(w, 0.0);
  EXPECT_NEAR(trace(ref.vbar), law.mean(), 1e-8);
}

TEST(BuildReference, DegenerateGapThrows) {
  const SpectralModel m = spectral_decompose(ExplicitCovariance{SymMatrix::identity(3)});
  EXPECT_THROW(build_reference(m, SymMatrix::identity(2), 1.0, 10), DegenerateGapError);
}

TEST(BuildReference, TwoDimensionalWeightClosedForm) {
  const double l1 = 5.0, l2 = 2.0;
  const SpectralModel m = diagonal_model(l1, l2);
  const std::size_t n = 800;
  const double eta = std::log(800.0);
  const WeightedChiSq law = chisq_weights(build_reference(m, exact_M(m), eta, n).vbar);
  const double r = (1 + eta * l2 / n) / (1 + eta * l1 / n);
  const double expect = eta / n * l1 * l2 * (1 - std::pow(r, 2.0 * n)) / (1 - r * r);
  EXPECT_NEAR(law.weights[0], expect, 1e-12 * expect);
  EXPECT_NEAR(law.weights[1], 0.0, 1e-12);
}

TEST(BuildReference, TraceAndFrobeniusGrowBounded) {
  // trace(Vbar) <= C trace(M) / gap and ||Vbar||_F <= C ||M||_F / gap, C = 2.
  for (std::size_t d : {20u, 100u}) {
    const SpectralModel m = spectral_decompose(KernelScaledCovariance{d, 0.01, 1.0, 5.0});
    const SymMatrix mm = exact_M(m);
    for (std::size_t n : {1000u, 5000u, 20000u}) {
      const double eta = std::log(static_cast<double>(n));
      const SymMatrix v = build_reference(m, mm, eta, n).vbar;
      EXPECT_LE(trace(v), 2.0 * trace(mm) / m.eigengap()) << d << " " << n;
      EXPECT_LE(frobenius_norm(v), 2.0 * frobenius_norm(mm) / m.eigengap()) << d << " " << n;
    }
  }
}

TEST(ChisqWeights, Examples) {
  EXPECT_EQ(chisq_weights(SymMatrix::diagonal({2.0, 0.0})).weights, (std::vector<double>{2.0, 0.0}));
  const auto eye = chisq_weights(SymMatrix::identity(3)).weights;
  for (double w : eye) EXPECT_NEAR(w, 1.0, 1e-15);

  const Vector u = normalized(Vector{1.0, 2.0, -2.0});
  const auto rank1 = chisq_weights(SymMatrix::outer(u, 3.5)).weights;
  EXPECT_NEAR(rank1[0], 3.5, 1e-12);
  EXPECT_NEAR(rank1[1], 0.0, 1e-12);
  EXPECT_NEAR(rank1[2], 0.0, 1e-12);
}

TEST(ChisqWeights, ClampsTinyNegativesRejectsLarge) {
  EXPECT_EQ(chisq_weights(SymMatrix::diagonal({1.0, -1e-10})).weights[1], 0.0);
  EXPECT_THROW(chisq_weights(SymMatrix::diagonal({1.0, -1e-3})), NotPsdError);
}

TEST(WeightedChiSq, MeanAndVariance) {
  const WeightedChiSq law{{3.0, 1.0, 0.5}};
  EXPECT_DOUBLE_EQ(law.mean(), 4.5);
  EXPECT_DOUBLE_EQ(law.variance(), 2.0 * (9.0 + 1.0 + 0.25));
}

TEST(SampleWeightedChiSq, SingleWeightQuantile) {
  RngStream rng(5, {1});
  const auto draws = sample_weighted_chisq(WeightedChiSq{{1.0}}, rng, 100000);
  const double below =
      std::count_if(draws.begin(), draws.end(), [](double x) { return x <= 3.8415; }) / 1e5;
  EXPECT_NEAR(below, 0.95, 0.005);
}

TEST(SampleWeightedChiSq, EqualPairIsExponential) {
  // a chi2(2) is exponential with mean 2a and standard deviation 2a.
  const double a = 0.7;
  const std::size_t n = 100000;
  RngStream rng(6, {1});
  const auto draws = sample_weighted_chisq(WeightedChiSq{{a, a}}, rng, n);
  double mean = 0.0;
  for (double x : draws) mean += x / n;
  EXPECT_NEAR(mean, 2 * a, 3 * 2 * a / std::sqrt(n));
}

TEST(SampleWeightedChiSq, ZeroWeights) {
  RngStream rng(7, {1});
  for (double x : sample_weighted_chisq(WeightedChiSq{{0.0, 0.0}}, rng, 100)) EXPECT_EQ(x, 0.0);
}

TEST(SampleWeightedChiSq, MomentsMatchLaw) {
  const WeightedChiSq law{{2.0, 1.0, 0.5, 0.25}};
  const std::size_t n = 200000;
  RngStream rng(8, {1});
  const auto draws = sample_weighted_chisq(law, rng, n);
  double s1 = 0.0, s2 = 0.0;
  for (double x : draws) {
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  // Cumulants: k2 = 2 sum w^2, k4 = 48 sum w^4; Var(s^2) ~ (k4 + 2 k2^2) / n.
  double w2 = 0.0, w4 = 0.0;
  for (double w : law.weights) {
    w2 += w * w;
    w4 += w * w * w * w;
  }
  const double k2 = 2 * w2, k4 = 48 * w4;
  EXPECT_NEAR(mean, law.mean(), 4 * std::sqrt(k2 / n));
  EXPECT_NEAR(var, law.variance(), 5 * std::sqrt((k4 + 2 * k2 * k2) / n));
}

TEST(AntiConcentration, SingleWeight) {
  RngStream rng(9, {1});
  const auto r = anticoncentration_check(WeightedChiSq{{1.0}}, 0.01, 100000, 200, rng);
  EXPECT_NEAR(r.bound, std::sqrt(0.04 / std::numbers::pi), 1e-15);
  EXPECT_NEAR(r.bound, 0.1128, 1e-4);
  EXPECT_TRUE(r.pass);
}

TEST(AntiConcentration, HugeWindowPassesVacuously) {
  RngStream rng(10, {1});
  const auto r = anticoncentration_check(WeightedChiSq{{1.0, 0.5}}, 100.0, 10000, 50, rng);
  EXPECT_GT(r.max_window_prob, 0.99);
  EXPECT_GT(r.bound, 1.0);
  EXPECT_TRUE(r.pass);
}

TEST(AntiConcentration, EqualWeightsSpreadMass) {
  RngStream a(11, {1}), b(11, {2});
  const auto single = anticoncentration_check(WeightedChiSq{{1.0}}, 0.01, 100000, 200, a);
  const auto spread =
      anticoncentration_check(WeightedChiSq{std::vector<double>(50, 1.0)}, 0.01, 100000, 200, b);
  EXPECT_TRUE(spread.pass);
  EXPECT_LT(spread.max_window_prob, 0.5 * single.max_window_prob);
}

TEST(AntiConcentration, InvalidInputs) {
  RngStream rng(12, {1});
  EXPECT_THROW(anticoncentration_check(WeightedChiSq{{0.0}}, 0.01, 10, 10, rng),
               std::invalid_argument);
  EXPECT_THROW(anticoncentration_check(WeightedChiSq{{1.0}}, 0.0, 10, 10, rng),
               std::invalid_argument);
}

TEST(SpectralDiscrepancy, Examples) {
  const SymMatrix a = SymMatrix::diagonal({3.0, 1.0});
  const auto same = spectral_discrepancy(a, a);
  EXPECT_EQ(same.delta1, 0.0);
  EXPECT_EQ(same.frob, 0.0);
  EXPECT_EQ(same.op, 0.0);

  const auto diff = spectral_discrepancy(a, SymMatrix::identity(2));
  EXPECT_EQ(diff.delta1, 2.0);
  EXPECT_NEAR(diff.op, 2.0, 1e-15);
  EXPECT_EQ(diff.frob, 2.0);
  EXPECT_DOUBLE_EQ(diff.f, std::sqrt(10.0));
}

TEST(SpectralDiscrepancy, TraceBoundedByFrobenius) {
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{7});
  const SymMatrix a = build_reference(m, exact_M(m), 3.0, 100).vbar;
  const auto disc = spectral_discrepancy(a, SymMatrix::identity(7));
  EXPECT_LE(std::abs(disc.delta1), std::sqrt(7.0) * disc.frob);
}
