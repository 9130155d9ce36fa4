#pragma once

// Data-generating models: the exponential-kernel covariance family with
// power-law scales, arbitrary explicit covariances driven by standardized
// uniform coordinates, and finite-support laws for exact enumeration.

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "streampca/linalg.hpp"
#include "streampca/random.hpp"

namespace streampca {

/// Sigma_ij = exp(-|i-j| c) sigma_i sigma_j with sigma_i = scale * i^(-beta),
/// i counted from 1.
struct KernelScaledCovariance {
  std::size_t d = 0;
  double c = 0.01;
  double beta = 1.0;
  double scale = 5.0;
};

/// X = Sigma^{1/2} Z with Z_j iid Uniform(-sqrt 3, sqrt 3).
struct ExplicitCovariance {
  SymMatrix sigma;
};

/// X takes value points[k] with probability probabilities[k]. Supports must
/// be centered: sum_k p_k x_k = 0.
struct DiscreteLaw {
  std::vector<Vector> points;
  std::vector<double> probabilities;

  std::size_t dim() const { return points.front().dim(); }
  std::size_t support_size() const { return points.size(); }
};

using CovarianceSpec = std::variant<KernelScaledCovariance, ExplicitCovariance, DiscreteLaw>;

/// Throws std::invalid_argument when a spec violates its invariants.
void validate(const CovarianceSpec& spec);

SymMatrix build_kernel_covariance(std::size_t d, double c, double beta, double scale);

/// Sigma implied by a spec (for discrete laws, sum_k p_k x_k x_k^T).
SymMatrix covariance_of(const CovarianceSpec& spec);

struct SpectralModel {
  SymMatrix sigma;
  SymMatrix sqrt_sigma;
  EigenDecomposition eig;
  Vector v1;
  Matrix v_perp;  // d x (d-1), eigenvectors 2..d
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  CovarianceSpec law;
  /// lambda1 - lambda2 <= 1e-10 lambda1. Sampling and Oja runs still work;
  /// reference-distribution operations refuse the model.
  bool degenerate_gap = false;

  std::size_t dim() const noexcept { return sigma.dim(); }
  double eigengap() const noexcept { return lambda1 - lambda2; }
  /// Throws DegenerateGapError if the top eigenvalue is not separated.
  void require_gap() const;
};

SpectralModel spectral_decompose(const CovarianceSpec& spec);

/// One draw of X. The overload writing into `out` avoids allocation in hot
/// loops; `scratch` must have the model dimension.
Vector sample_x(const SpectralModel& model, RngStream& stream);
void sample_x(const SpectralModel& model, RngStream& stream, Vector& out, Vector& scratch);

/// Calls visit(indices, probability) for every length-n sequence of support
/// indices of a discrete law. Throws EnumerationTooLarge if s^n > 1e6.
void enumerate_outcomes(const DiscreteLaw& law, std::size_t n,
                        const std::function<void(std::span<const std::size_t>, double)>& visit);

inline constexpr std::size_t kMaxEnumeratedOutcomes = 1'000'000;

struct Diagnostics {
  double m_d_hat = 0.0;  // mean of ||X X^T - Sigma||_op^2
  double alpha_n = 0.0;  // max ||X_i||^2
};

Diagnostics diagnostics(const SpectralModel& model, RngStream& stream, std::size_t n_samples);

}  // namespace streampca
