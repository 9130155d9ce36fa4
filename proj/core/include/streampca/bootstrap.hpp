#pragma once

// Online Gaussian multiplier bootstrap for Oja's algorithm. Each of m
// replicates follows the Oja recursion perturbed by a multiplier W ~ N(0, 1/2)
// applied to the change between consecutive rank-one updates:
//
//   h = (x_t^T v) x_t,  g = (x_{t-1}^T v) x_{t-1}
//   v <- normalize(v + (eta_n / n) (h + W (h - g)))
//
// At t = 1 there is no previous sample and replicates take a plain Oja step.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "streampca/linalg.hpp"
#include "streampca/model.hpp"
#include "streampca/reference.hpp"

namespace streampca {

/// Multiplier for (replicate index, 1-based step index).
using MultiplierSource = std::function<double(std::size_t replicate, std::size_t step)>;

inline constexpr double kMultiplierVariance = 0.5;

/// W ~ N(0, 1/2) drawn from the substream base_path + {replicate, step}, so a
/// given draw does not depend on evaluation order.
class GaussianMultipliers {
 public:
  GaussianMultipliers(std::uint64_t master_seed, std::vector<std::uint64_t> base_path)
      : seed_(master_seed), base_path_(std::move(base_path)) {}

  double operator()(std::size_t replicate, std::size_t step) const;

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> base_path_;
};

/// Unnormalized increment step_size * (h + w (h - g)); with no previous
/// sample this is the plain Oja increment step_size * h.
Vector bootstrap_increment(const Vector& v, const Vector& x, const Vector* prev_x, double w,
                           double step_size);

class BootstrapEnsemble {
 public:
  /// Throws std::invalid_argument if m == 0, u0 is zero, eta_n <= 0 or n == 0.
  static BootstrapEnsemble init(const Vector& u0, std::size_t m, double eta_n, std::size_t n);

  /// Advance every replicate by one sample. Replicate r at step t (1-based)
  /// uses multipliers(r, t).
  void step(const Vector& x, const MultiplierSource& multipliers);

  const std::vector<Vector>& replicates() const noexcept { return replicates_; }
  const std::optional<Vector>& prev_x() const noexcept { return prev_x_; }
  std::size_t steps() const noexcept { return t_; }
  std::size_t horizon() const noexcept { return n_; }
  std::size_t size() const noexcept { return replicates_.size(); }
  double step_size() const noexcept { return eta_n_ / static_cast<double>(n_); }

 private:
  BootstrapEnsemble(std::vector<Vector> reps, double eta_n, std::size_t n)
      : replicates_(std::move(reps)), eta_n_(eta_n), n_(n) {}

  std::vector<Vector> replicates_;
  std::optional<Vector> prev_x_;
  std::size_t t_ = 0;
  double eta_n_;
  std::size_t n_;
};

struct BootstrapRun {
  Vector v_hat;                 // plain Oja estimate on the same data
  std::vector<double> errors;   // 1 - (v_hat^T v*_r)^2 per replicate
  std::vector<Vector> replicates;
};

/// One pass over a stored sample. Replicates are independent given the data
/// and may be split across `threads` workers; results do not depend on the
/// thread count.
BootstrapRun run_bootstrap(std::span<const Vector> data, const Vector& u0, std::size_t m,
                           double eta_n, const MultiplierSource& multipliers,
                           unsigned threads = 1);

/// Closed-form conditional covariance of the linearized bootstrap vector
///   Z* = sqrt(eta_n / n) sum_{i>=2} W_i D^{(n-i)} Delta_i v1,
/// i.e. (eta_n / (2n)) sum_{i=2}^n D^{(n-i)} Delta_i v1 v1^T Delta_i D^{(n-i)},
/// with Delta_i = x_i x_i^T - x_{i-1} x_{i-1}^T and
/// D^{(k)} = V_perp diag(lambda_perp^k) V_perp^T. The power n - i counts the
/// updates applied after sample i. Single O(n d^2) pass in the eigenbasis.
SymMatrix bootstrap_covariance(std::span<const Vector> data, const SpectralModel& model,
                               double eta_n);

struct CovarianceDiscrepancy {
  double trace_diff = 0.0;  // |trace(E*[Z* Z*^T] - Vbar_n)|
  double frob_diff = 0.0;
  double op_diff = 0.0;
};

CovarianceDiscrepancy covariance_discrepancy(std::span<const Vector> data,
                                             const SpectralModel& model, double eta_n,
                                             const ReferenceCovariance& reference);

}  // namespace streampca
