#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "streampca/model.hpp"

namespace streampca {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EtaRule {
  enum class Kind { log_n, fixed };
  Kind kind = Kind::log_n;
  double value = 0.0;  // used when kind == fixed

  double eta_for(std::size_t n) const;
};

/// Experiment settings shared by every CLI subcommand. Defaults are the
/// desk-scale comparison run (d = 100, 300 trials and replicates).
struct ExperimentConfig {
  std::size_t n = 5000;
  std::size_t d = 100;
  double beta = 1.0;
  double c = 0.01;
  double scale = 5.0;
  std::size_t trials = 300;
  std::size_t replicates = 300;
  EtaRule eta_rule;
  std::uint64_t master_seed = 20221128;
  std::size_t mc_m_estimate = 100000;
  std::size_t mc_chisq = 100000;
  std::string output_dir = "out";

  double eta_n() const { return eta_rule.eta_for(n); }
  KernelScaledCovariance covariance() const { return {d, c, beta, scale}; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Parse a JSON config. Unknown keys are rejected; missing keys keep their
/// defaults. Throws ConfigError on malformed input.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON rendering (stable key order) of a config.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace streampca
