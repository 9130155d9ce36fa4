#include "streampca/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "streampca/oja.hpp"
#include "streampca/parallel.hpp"

namespace streampca {

namespace {

std::uint64_t label(StreamPurpose purpose) { return static_cast<std::uint64_t>(purpose); }

// Draw counts per shard: the first (total % shards) shards get one extra.
std::vector<std::size_t> shard_sizes(std::size_t total, std::size_t shards) {
  std::vector<std::size_t> sizes(shards, total / shards);
  for (std::size_t s = 0; s < total % shards; ++s) ++sizes[s];
  return sizes;
}

}  // namespace

Vector draw_u0(const ExperimentConfig& config) {
  RngStream stream(config.master_seed, {label(StreamPurpose::u0)});
  Vector g(config.d);
  for (double& v : g.values()) v = stream.next_standard_normal();
  return normalized(g);
}

std::vector<Vector> draw_dataset(const SpectralModel& model, std::uint64_t master_seed,
                                 StreamPurpose purpose, std::uint64_t index, std::size_t n) {
  RngStream stream(master_seed, {label(purpose), index});
  std::vector<Vector> data;
  data.reserve(n);
  Vector scratch(model.dim());
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(model.dim());
    sample_x(model, stream, x, scratch);
    data.push_back(std::move(x));
  }
  return data;
}

SamplingResult run_sampling_experiment(const ExperimentConfig& config, const SpectralModel& model,
                                       unsigned threads) {
  config.validate();
  const double eta = config.eta_n();
  const Vector u0 = draw_u0(config);
  std::vector<double> errors(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t trial) {
    RngStream stream(config.master_seed, {label(StreamPurpose::sampling_data), trial});
    Vector scratch(model.dim());
    const Vector w = oja_run([&](Vector& x) { sample_x(model, stream, x, scratch); }, config.n, eta,
                             u0);
    errors[trial] = sin2(w, model.v1);
  });

  std::vector<double> scaled(errors.size());
  const double factor = static_cast<double>(config.n) / eta;
  std::transform(errors.begin(), errors.end(), scaled.begin(),
                 [factor](double e) { return factor * e; });
  EmpiricalCdf cdf(errors);
  const double mean = cdf.mean();
  const double median = cdf.quantile(0.5);
  return SamplingResult{std::move(errors), std::move(scaled), std::move(cdf), mean, median};
}

BootstrapResult run_bootstrap_experiment(const ExperimentConfig& config,
                                         const SpectralModel& model, unsigned threads) {
  config.validate();
  const double eta = config.eta_n();
  const Vector u0 = draw_u0(config);
  const auto data =
      draw_dataset(model, config.master_seed, StreamPurpose::bootstrap_data, 0, config.n);
  const GaussianMultipliers multipliers(config.master_seed, {label(StreamPurpose::multiplier)});
  BootstrapRun run = run_bootstrap(data, u0, config.replicates, eta, multipliers, threads);

  EmpiricalCdf cdf(run.errors);
  std::map<std::string, double> quantiles{
      {"0.9", cdf.quantile(0.9)}, {"0.95", cdf.quantile(0.95)}, {"0.99", cdf.quantile(0.99)}};
  const double vhat_error = sin2(run.v_hat, model.v1);
  return BootstrapResult{std::move(run), std::move(cdf), vhat_error, std::move(quantiles)};
}

SymMatrix estimate_M_sharded(const SpectralModel& model, std::uint64_t master_seed,
                             std::size_t n_mc, unsigned threads) {
  const auto sizes = shard_sizes(n_mc, kMonteCarloShards);
  std::vector<SymMatrix> partial(kMonteCarloShards);
  parallel_for(kMonteCarloShards, threads, [&](std::size_t s) {
    if (sizes[s] == 0) return;
    RngStream stream(master_seed, {label(StreamPurpose::moment_matrix), s});
    partial[s] = estimate_M(model, stream, sizes[s]);
  });
  Matrix total(model.dim() - 1, model.dim() - 1);
  for (std::size_t s = 0; s < kMonteCarloShards; ++s) {
    if (sizes[s] == 0) continue;
    total += (static_cast<double>(sizes[s]) / static_cast<double>(n_mc)) * partial[s].matrix();
  }
  return SymMatrix(total);
}

ReferenceResult run_reference(const ExperimentConfig& config, const SpectralModel& model,
                              unsigned threads) {
  config.validate();
  model.require_gap();
  const double eta = config.eta_n();
  const SymMatrix m_matrix = estimate_M_sharded(model, config.master_seed, config.mc_m_estimate,
                                                threads);
  ReferenceResult out;
  out.reference = build_reference(model, m_matrix, eta, config.n);
  out.law = chisq_weights(out.reference.vbar);
  out.trace_vbar = trace(out.reference.vbar);
  out.frob_vbar = frobenius_norm(out.reference.vbar);

  const auto sizes = shard_sizes(config.mc_chisq, kMonteCarloShards);
  std::vector<std::vector<double>> draws(kMonteCarloShards);
  parallel_for(kMonteCarloShards, threads, [&](std::size_t s) {
    if (sizes[s] == 0) return;
    RngStream stream(config.master_seed, {label(StreamPurpose::chisq), s});
    draws[s] = sample_weighted_chisq(out.law, stream, sizes[s]);
  });
  out.samples.reserve(config.mc_chisq);
  for (const auto& shard : draws) out.samples.insert(out.samples.end(), shard.begin(), shard.end());
  return out;
}

Comparison compare(const EmpiricalCdf& a, const EmpiricalCdf& b, std::string label) {
  return Comparison{std::move(label), kolmogorov_distance(a, b)};
}

ComparisonRun run_comparison(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const SpectralModel model = spectral_decompose(config.covariance());
  SamplingResult sampling = run_sampling_experiment(config, model, threads);
  BootstrapResult bootstrap = run_bootstrap_experiment(config, model, threads);
  ReferenceResult reference = run_reference(config, model, threads);
  Comparison boot = compare(bootstrap.cdf, sampling.cdf, "bootstrap_vs_sampling");
  Comparison ref = compare(EmpiricalCdf(sampling.scaled), EmpiricalCdf(reference.samples),
                           "sampling_vs_reference");
  return ComparisonRun{std::move(sampling), std::move(bootstrap), std::move(reference),
                       std::move(boot), std::move(ref)};
}

}  // namespace streampca
