#pragma once

// Reference law for the scaled eigenvector error (n / eta_n) sin^2. The
// leading fluctuation of Oja's estimate is a Gaussian vector Z_n with
// covariance
//
//   Vbar_n = (eta_n / n) V_perp ( sum_{i=1}^n L^{i-1} M L^{i-1} ) V_perp^T,
//
// where M = E[V_perp^T (X^T v1)^2 X X^T V_perp] and L = diag(lambda_perp)
// with lambda_perp_j = (1 + eta_n lambda_{j+1} / n) / (1 + eta_n lambda_1 / n).
// Z_n^T Z_n is a weighted chi-square with the eigenvalues of Vbar_n as
// weights.

#include <cstddef>
#include <vector>

#include "streampca/linalg.hpp"
#include "streampca/model.hpp"
#include "streampca/random.hpp"

namespace streampca {

struct ReferenceCovariance {
  SymMatrix m_matrix;               // (d-1) x (d-1), V_perp frame
  std::vector<double> lambda_perp;  // d-1 contraction factors, nonincreasing
  SymMatrix vbar;                   // d x d
  double eta_n = 0.0;
  std::size_t n = 0;
};

/// Contraction factors (1 + eta_n lambda_{j+1}/n) / (1 + eta_n lambda_1/n),
/// j = 1..d-1.
std::vector<double> lambda_perp(const SpectralModel& model, double eta_n, std::size_t n);

/// Exact M. Discrete laws sum over their support; kernel and explicit laws
/// use the fourth-moment identity for X = S Z with iid standardized uniform
/// coordinates (E Z^4 = 9/5):
///   E[(v^T X)^2 X X^T] = (v^T Sigma v) Sigma + 2 Sigma v v^T Sigma
///                        + (E Z^4 - 3) sum_k (v^T s_k)^2 s_k s_k^T.
SymMatrix exact_M(const SpectralModel& model);

/// Monte Carlo estimate of M from n_mc draws of X. Discrete laws are
/// computed exactly and ignore n_mc and the stream.
SymMatrix estimate_M(const SpectralModel& model, RngStream& stream, std::size_t n_mc);

/// Closed-form geometric sum: inner(k,l) = M(k,l) (1 - r^n) / (1 - r) with
/// r = lambda_perp[k] lambda_perp[l] (n when r == 1), then scaled by
/// eta_n / n and conjugated by v_perp.
SymMatrix assemble_vbar(const SymMatrix& m_matrix, const std::vector<double>& lambda_perp,
                        double eta_n, std::size_t n, const Matrix& v_perp);

/// Requires a positive eigengap.
ReferenceCovariance build_reference(const SpectralModel& model, const SymMatrix& m_matrix,
                                    double eta_n, std::size_t n);

/// Law of sum_r w_r xi_r with xi_r iid chi-square(1).
struct WeightedChiSq {
  std::vector<double> weights;  // descending, nonnegative

  double mean() const;
  double variance() const;
};

/// Eigenvalues of vbar clamped at zero. Throws NotPsdError when an
/// eigenvalue is below -1e-8 ||vbar||_op.
WeightedChiSq chisq_weights(const SymMatrix& vbar);

std::vector<double> sample_weighted_chisq(const WeightedChiSq& law, RngStream& stream,
                                          std::size_t n_mc);

struct AntiConcentrationResult {
  double max_window_prob = 0.0;
  double bound = 0.0;  // sqrt(4h / pi)
  double slack = 0.0;  // 3 sqrt(0.25 / n_mc)
  bool pass = false;
};

/// Empirical check of sup_t P(t <= sum a_r xi_r <= t + h) <= sqrt(4h/pi)
/// for weights rescaled to sum a_r^2 = 1. Window starts are a uniform grid
/// over the empirical [0.1%, 99.9%] quantile range.
AntiConcentrationResult anticoncentration_check(const WeightedChiSq& law, double h,
                                                std::size_t n_mc, std::size_t grid_points,
                                                RngStream& stream);

struct SpectralDiscrepancy {
  double delta1 = 0.0;  // trace(a - b)
  double frob = 0.0;    // ||a - b||_F
  double op = 0.0;      // ||a - b||_op
  double f = 0.0;       // ||a||_F
};

SpectralDiscrepancy spectral_discrepancy(const SymMatrix& a, const SymMatrix& b);

}  // namespace streampca
