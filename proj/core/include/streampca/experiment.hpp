#pragma once

// Monte Carlo experiments comparing three laws of the Oja eigenvector error:
//   * sampling:  sin^2(v_hat, v1) over independent datasets with a fixed u0,
//   * bootstrap: 1 - (v_hat^T v*)^2 over multiplier replicates on one dataset,
//   * reference: the weighted chi-square limit of (n / eta_n) sin^2.
// Every random consumer owns a substream keyed by (master_seed, purpose,
// unit index), so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streampca/bootstrap.hpp"
#include "streampca/config.hpp"
#include "streampca/model.hpp"
#include "streampca/reference.hpp"
#include "streampca/stats.hpp"

namespace streampca {

/// First label of every substream path.
enum class StreamPurpose : std::uint64_t {
  u0 = 1,
  sampling_data = 2,
  bootstrap_data = 3,
  multiplier = 4,
  moment_matrix = 5,
  chisq = 6,
  verify = 7,
};

inline constexpr std::size_t kMonteCarloShards = 16;

/// Uniform direction on the sphere from the config's "u0" substream.
Vector draw_u0(const ExperimentConfig& config);

/// n samples of the bootstrap dataset (substream {bootstrap_data, 0}).
std::vector<Vector> draw_dataset(const SpectralModel& model, std::uint64_t master_seed,
                                 StreamPurpose purpose, std::uint64_t index, std::size_t n);

struct SamplingResult {
  std::vector<double> errors;  // sin^2(v_hat, v1) per trial, trial order
  std::vector<double> scaled;  // (n / eta_n) * errors
  EmpiricalCdf cdf;
  double mean = 0.0;
  double median = 0.0;
};

SamplingResult run_sampling_experiment(const ExperimentConfig& config, const SpectralModel& model,
                                       unsigned threads);

struct BootstrapResult {
  BootstrapRun run;
  EmpiricalCdf cdf;
  double sin2_vhat = 0.0;  // sin^2(v_hat, v1) on the bootstrap dataset
  std::map<std::string, double> quantiles;  // "0.9", "0.95", "0.99"
};

BootstrapResult run_bootstrap_experiment(const ExperimentConfig& config,
                                         const SpectralModel& model, unsigned threads);

struct ReferenceResult {
  ReferenceCovariance reference;
  WeightedChiSq law;
  std::vector<double> samples;  // draws of Z^T Z, shard order
  double trace_vbar = 0.0;
  double frob_vbar = 0.0;
};

/// M from config.mc_m_estimate draws split over fixed shards.
SymMatrix estimate_M_sharded(const SpectralModel& model, std::uint64_t master_seed,
                             std::size_t n_mc, unsigned threads);

ReferenceResult run_reference(const ExperimentConfig& config, const SpectralModel& model,
                              unsigned threads);

struct Comparison {
  std::string label;
  double ks = 0.0;
};

Comparison compare(const EmpiricalCdf& a, const EmpiricalCdf& b, std::string label);

/// Sampling, bootstrap and reference runs for one config plus the KS
/// distances between them.
struct ComparisonRun {
  SamplingResult sampling;
  BootstrapResult bootstrap;
  ReferenceResult reference;
  Comparison bootstrap_vs_sampling;
  Comparison sampling_vs_reference;  // scaled sampling errors vs Z^T Z draws
};

ComparisonRun run_comparison(const ExperimentConfig& config, unsigned threads);

}  // namespace streampca
