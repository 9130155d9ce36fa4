#include "streampca/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "streampca/bootstrap.hpp"
#include "streampca/experiment.hpp"
#include "streampca/hoeffding.hpp"
#include "streampca/parallel.hpp"
#include "streampca/reference.hpp"

namespace streampca {

double CheckResult::value(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw std::out_of_range("CheckResult: no value '" + key + "' in " + name);
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

constexpr double kExactTol = 1e-10;

// Sub-labels under StreamPurpose::verify.
enum : std::uint64_t {
  kHoeffdingLabel = 1,
  kBootstrapHoeffdingLabel = 2,
  kMomentsLabel = 3,
  kAntiConcentrationLabel = 4,
  kCovarianceRateLabel = 5,
};

RngStream verify_stream(std::uint64_t seed, std::uint64_t check, std::uint64_t index) {
  return RngStream(seed, {static_cast<std::uint64_t>(StreamPurpose::verify), check, index});
}

struct Instance {
  std::size_t n;
  std::size_t d;
  double eta;
  SymMatrix sigma;
  std::vector<Vector> data;
};

// Instance k cycles through n in {4, 6}, d in {2, 3}, eta in {1, ln n}.
// Sigma = G G^T / d + I/2 with Gaussian G; samples are Sigma^{1/2} Z.
Instance random_instance(RngStream& stream, std::size_t k) {
  const std::size_t n = (k % 2 == 0) ? 4 : 6;
  const std::size_t d = ((k / 2) % 2 == 0) ? 2 : 3;
  const double eta = ((k / 4) % 2 == 0) ? 1.0 : std::log(static_cast<double>(n));
  Matrix g(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) g(a, b) = stream.next_standard_normal();
  }
  Matrix s = (1.0 / static_cast<double>(d)) * (g * g.transpose());
  for (std::size_t a = 0; a < d; ++a) s(a, a) += 0.5;
  const SpectralModel model = spectral_decompose(ExplicitCovariance{SymMatrix(s)});
  std::vector<Vector> data;
  for (std::size_t i = 0; i < n; ++i) data.push_back(sample_x(model, stream));
  return {n, d, eta, model.sigma, std::move(data)};
}

FactorFn maybe_flip(FactorFn f, bool flip) {
  if (!flip) return f;
  return [f = std::move(f)](std::size_t i, bool in_subset) {
    Matrix m = f(i, in_subset);
    if (in_subset) m *= -1.0;
    return m;
  };
}

}  // namespace

CheckResult check_hoeffding_exactness(std::uint64_t seed, std::size_t instances,
                                      const VerifyOptions& options) {
  RngStream stream = verify_stream(seed, kHoeffdingLabel, 0);
  double worst = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    const Instance inst = random_instance(stream, k);
    const Matrix direct = direct_product(inst.data, inst.eta);
    const FactorFn factor = maybe_flip(oja_projection_factors(inst.data, inst.sigma, inst.eta),
                                       options.inject_sign_error);
    const HoeffdingSum sum = enumerate_subset_products(inst.n, inst.d, factor);
    const double err = frobenius_norm(sum.total - direct) / std::max(1.0, frobenius_norm(direct));
    worst = std::max(worst, err);
  }
  return {"hoeffding_exactness",
          worst <= kExactTol,
          {{"max_relative_error", worst},
           {"tolerance", kExactTol},
           {"instances", static_cast<double>(instances)}}};
}

CheckResult check_bootstrap_hoeffding_exactness(std::uint64_t seed, std::size_t instances) {
  RngStream stream = verify_stream(seed, kBootstrapHoeffdingLabel, 0);
  double worst = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    const Instance inst = random_instance(stream, k);
    std::vector<double> weights(inst.n, 0.0);
    for (std::size_t i = 1; i < inst.n; ++i) {
      weights[i] = normal(stream, 0.0, kMultiplierVariance);
    }
    const Matrix direct = bootstrap_direct_product(inst.data, weights, inst.eta);
    const HoeffdingSum sum = bootstrap_hoeffding_sum(inst.data, weights, inst.eta);
    const double err = frobenius_norm(sum.total - direct) / std::max(1.0, frobenius_norm(direct));
    worst = std::max(worst, err);
  }
  return {"bootstrap_hoeffding_exactness",
          worst <= kExactTol,
          {{"max_relative_error", worst},
           {"tolerance", kExactTol},
           {"instances", static_cast<double>(instances)}}};
}

CheckResult check_orthogonality(const VerifyOptions& options) {
  const DiscreteLaw law{{Vector{2.0, 1.0}, Vector{-1.0, -0.5}}, {1.0 / 3.0, 2.0 / 3.0}};
  const std::size_t n = 4;
  const double eta = std::log(static_cast<double>(n));
  const bool flip = options.inject_sign_error;
  const OrthogonalityTable table = orthogonality_table(
      law, n, eta, [flip](std::span<const Vector> data, const SymMatrix& sigma, double e) {
        return maybe_flip(oja_projection_factors(data, sigma, e), flip);
      });
  return {"orthogonality",
          table.max_cross <= kExactTol && table.min_self > 0.0,
          {{"max_cross", table.max_cross},
           {"min_self", table.min_self},
           {"outcomes", static_cast<double>(table.outcomes)},
           {"tolerance", kExactTol}}};
}

CheckResult check_moments(std::uint64_t seed) {
  constexpr std::size_t kDraws = 1000000;
  CheckResult out{"moments", true, {}};

  auto mean_var = [](auto&& draw) {
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::size_t i = 0; i < kDraws; ++i) {
      const double z = draw();
      sum += z;
      sumsq += z * z;
    }
    const double mean = sum / kDraws;
    return std::pair{mean, sumsq / kDraws - mean * mean};
  };

  RngStream normals = verify_stream(seed, kMomentsLabel, 0);
  const auto [nm, nv] = mean_var([&] { return normals.next_standard_normal(); });
  RngStream halves = verify_stream(seed, kMomentsLabel, 1);
  const auto [hm, hv] = mean_var([&] { return normal(halves, 0.0, kMultiplierVariance); });
  RngStream uniforms = verify_stream(seed, kMomentsLabel, 2);
  const auto [um, uv] = mean_var([&] { return uniform_sym(uniforms); });

  // Kernel model second moments: 2e5 draws, entrywise within 5% of max |Sigma|.
  const SpectralModel model = spectral_decompose(KernelScaledCovariance{5, 0.01, 1.0, 5.0});
  RngStream xs = verify_stream(seed, kMomentsLabel, 3);
  constexpr std::size_t kModelDraws = 200000;
  Matrix second(5, 5);
  Vector x(5);
  Vector scratch(5);
  for (std::size_t i = 0; i < kModelDraws; ++i) {
    sample_x(model, xs, x, scratch);
    second += Matrix::outer(x, x);
  }
  second *= 1.0 / kModelDraws;
  double max_dev = 0.0;
  double max_entry = 0.0;
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      max_dev = std::max(max_dev, std::abs(second(a, b) - model.sigma(a, b)));
      max_entry = std::max(max_entry, std::abs(model.sigma(a, b)));
    }
  }
  const double relative_dev = max_dev / max_entry;

  out.pass = std::abs(nm) <= 0.01 && std::abs(nv - 1.0) <= 0.02 && std::abs(hv - 0.5) <= 0.01 &&
             std::abs(um) <= 0.01 && std::abs(uv - 1.0) <= 0.01 && relative_dev <= 0.05;
  out.values = {{"normal_mean", nm},         {"normal_var", nv},
                {"half_normal_var", hv},     {"uniform_mean", um},
                {"uniform_var", uv},         {"second_moment_rel_dev", relative_dev}};
  return out;
}

CheckResult check_anticoncentration(std::uint64_t seed, std::size_t n_mc) {
  RngStream stream = verify_stream(seed, kAntiConcentrationLabel, 0);
  const AntiConcentrationResult r =
      anticoncentration_check(WeightedChiSq{{1.0}}, 0.01, n_mc, 200, stream);
  return {"anticoncentration",
          r.pass,
          {{"max_window_prob", r.max_window_prob}, {"bound", r.bound}, {"slack", r.slack}}};
}

CheckResult check_covariance_rate(std::uint64_t seed, unsigned threads, std::size_t datasets) {
  const SpectralModel model = spectral_decompose(KernelScaledCovariance{20, 0.01, 1.0, 5.0});
  const SymMatrix m_matrix = exact_M(model);

  auto median_trace_diff = [&](std::size_t n, std::uint64_t sub) {
    const double eta = std::log(static_cast<double>(n));
    const ReferenceCovariance ref = build_reference(model, m_matrix, eta, n);
    std::vector<double> diffs(datasets);
    parallel_for(datasets, threads, [&](std::size_t k) {
      RngStream stream = verify_stream(seed, kCovarianceRateLabel, sub * 1000000 + k);
      std::vector<Vector> data;
      data.reserve(n);
      for (std::size_t i = 0; i < n; ++i) data.push_back(sample_x(model, stream));
      diffs[k] = covariance_discrepancy(data, model, eta, ref).trace_diff;
    });
    std::sort(diffs.begin(), diffs.end());
    const std::size_t h = datasets / 2;
    return datasets % 2 == 1 ? diffs[h] : 0.5 * (diffs[h - 1] + diffs[h]);
  };

  const double small = median_trace_diff(1000, 0);
  const double large = median_trace_diff(4000, 1);
  const double ratio = small / large;
  return {"covariance_rate",
          ratio >= 1.4 && ratio <= 3.0,
          {{"median_trace_diff_n1000", small},
           {"median_trace_diff_n4000", large},
           {"ratio", ratio}}};
}

CheckResult check_vbar_closed_form() {
  const std::size_t n = 1000;
  const double eta = std::log(static_cast<double>(n));
  const SpectralModel model = spectral_decompose(KernelScaledCovariance{10, 0.01, 1.0, 5.0});
  const SymMatrix m_matrix = exact_M(model);
  const std::vector<double> rho = lambda_perp(model, eta, n);
  const SymMatrix closed = assemble_vbar(m_matrix, rho, eta, n, model.v_perp);

  // sum_{i=1}^n L^{i-1} M L^{i-1}, one term at a time.
  const std::size_t k = rho.size();
  Matrix sum(k, k);
  std::vector<double> power(k, 1.0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) sum(a, b) += power[a] * m_matrix(a, b) * power[b];
    }
    for (std::size_t j = 0; j < k; ++j) power[j] *= rho[j];
  }
  sum *= eta / static_cast<double>(n);
  const SymMatrix brute = conjugate(model.v_perp, SymMatrix(sum));
  const double rel = frobenius_norm(closed - brute) / frobenius_norm(brute);
  return {"vbar_closed_form", rel <= kExactTol, {{"relative_error", rel}, {"tolerance", kExactTol}}};
}

VerifyReport run_verify(const ExperimentConfig& config, unsigned threads,
                        const VerifyOptions& options) {
  const std::uint64_t seed = config.master_seed;
  VerifyReport report;
  report.checks.push_back(check_hoeffding_exactness(seed, 20, options));
  report.checks.push_back(check_bootstrap_hoeffding_exactness(seed));
  report.checks.push_back(check_orthogonality(options));
  report.checks.push_back(check_moments(seed));
  report.checks.push_back(check_anticoncentration(seed));
  report.checks.push_back(check_covariance_rate(seed, threads));
  report.checks.push_back(check_vbar_closed_form());
  return report;
}

}  // namespace streampca
