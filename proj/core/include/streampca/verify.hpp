#pragma once

// Self-check suite run by `streampca verify`. Each check recomputes a
// quantity two independent ways (or against a known law) and reports the
// measured discrepancy next to its pinned tolerance.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "streampca/config.hpp"

namespace streampca {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;  // measured quantities, insertion order

  double value(const std::string& key) const;
};

struct VerifyOptions {
  /// Mutation fixture: flip the sign of the in-subset projection factors.
  bool inject_sign_error = false;
};

/// Random instances n in {4, 6}, d in {2, 3}, eta in {1, ln n}:
/// ||sum_S H^S - B_n||_F <= 1e-10 max(1, ||B_n||_F).
CheckResult check_hoeffding_exactness(std::uint64_t seed, std::size_t instances = 20,
                                      const VerifyOptions& options = {});
/// Same for the bootstrap product with W_i ~ N(0, 1/2).
CheckResult check_bootstrap_hoeffding_exactness(std::uint64_t seed, std::size_t instances = 20);
/// Exact enumeration, n = 4, two-point centered law in d = 2.
CheckResult check_orthogonality(const VerifyOptions& options = {});
/// Normal, half-variance normal and uniform draws, and the kernel model's
/// second-moment matrix.
CheckResult check_moments(std::uint64_t seed);
/// Single chi-square(1) weight, h = 0.01.
CheckResult check_anticoncentration(std::uint64_t seed, std::size_t n_mc = 100000);
/// Median |trace(E*[Z* Z*^T] - Vbar_n)| over 50 datasets at n = 1000 and
/// n = 4000 (d = 20 kernel model); the ratio must lie in [1.4, 3.0].
CheckResult check_covariance_rate(std::uint64_t seed, unsigned threads = 1,
                                  std::size_t datasets = 50);
/// Closed-form Vbar_n against term-by-term summation, n = 1000, d = 10.
CheckResult check_vbar_closed_form();

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

VerifyReport run_verify(const ExperimentConfig& config, unsigned threads = 1,
                        const VerifyOptions& options = {});

}  // namespace streampca
