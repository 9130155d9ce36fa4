#pragma once

// Exact, small-n oracles for the Hoeffding decomposition of the Oja matrix
// product
//
//   B_n = F_n F_{n-1} ... F_1,   F_i = I + (eta_n / n) x_i x_i^T,
//
// and of its multiplier-bootstrap counterpart. Factor i is the i-th update
// applied to u0, so index 1 is the rightmost factor. Every product in this
// module goes through ordered_product() so all identities share that order.
//
// The projection onto a subset S replaces factor i by
//   (eta_n / n)(x_i x_i^T - Sigma)   if i in S,
//   I + (eta_n / n) Sigma            otherwise,
// and B_n is the sum of these projections over all 2^n subsets.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "streampca/linalg.hpp"
#include "streampca/model.hpp"

namespace streampca {

inline constexpr std::size_t kMaxHoeffdingN = 20;

/// Subsets are bitmasks: bit (i - 1) set means sample i is in S.
using SubsetMask = std::uint32_t;

/// Factor for 1-based index i, given whether i belongs to the subset.
using FactorFn = std::function<Matrix(std::size_t i, bool in_subset)>;

/// factor(n) * ... * factor(1).
Matrix ordered_product(std::size_t n, const std::function<Matrix(std::size_t)>& factor);

/// B_n = prod (I + (eta_n / n) x_i x_i^T). An empty sample gives the
/// identity of size dim_if_empty.
Matrix direct_product(std::span<const Vector> data, double eta_n, std::size_t dim_if_empty = 0);

/// Projection factors A_i^{(S)} for the sample with covariance sigma.
FactorFn oja_projection_factors(std::span<const Vector> data, const SymMatrix& sigma, double eta_n);

/// H^{(S)} = A_n^{(S)} ... A_1^{(S)}.
Matrix hoeffding_term(std::span<const Vector> data, const SymMatrix& sigma, double eta_n,
                      SubsetMask subset);

struct HoeffdingSum {
  Matrix total;                 // sum over all subsets
  std::vector<Matrix> by_order; // T_0 .. T_n, T_k = sum over |S| = k
};

/// Sum of subset products for arbitrary factors, grouped by |S|. Subsets
/// containing an index in `excluded` are skipped. Throws
/// EnumerationTooLarge for n > 20.
HoeffdingSum enumerate_subset_products(std::size_t n, std::size_t dim, const FactorFn& factor,
                                       SubsetMask excluded = 0);

HoeffdingSum hoeffding_sum(std::span<const Vector> data, const SymMatrix& sigma, double eta_n);

/// Direct product of the bootstrap factors
///   F*_1 = I + (eta_n / n) x_1 x_1^T,
///   F*_i = I + (eta_n / n)(x_i x_i^T + W_i Delta_i),  i >= 2,
/// with Delta_i = x_i x_i^T - x_{i-1} x_{i-1}^T. weights[0] is unused.
Matrix bootstrap_direct_product(std::span<const Vector> data, std::span<const double> weights,
                                double eta_n);

/// Bootstrap projection factors: (eta_n / n) W_i Delta_i inside S,
/// I + (eta_n / n) x_i x_i^T outside. Index 1 never enters S.
FactorFn bootstrap_projection_factors(std::span<const Vector> data,
                                      std::span<const double> weights, double eta_n);

HoeffdingSum bootstrap_hoeffding_sum(std::span<const Vector> data, std::span<const double> weights,
                                     double eta_n);

struct OrthogonalityTable {
  double max_cross = 0.0;     // max_{S != R} |E <H^S, H^R>_F|
  double min_self = 0.0;      // min_{S != {}} E ||H^S||_F^2
  std::size_t outcomes = 0;
};

/// Exact expectations by enumerating every length-n outcome sequence of a
/// discrete law. `factors` builds the projection factors for one outcome;
/// the default is oja_projection_factors with the law's covariance.
OrthogonalityTable orthogonality_table(const DiscreteLaw& law, std::size_t n, double eta_n);
OrthogonalityTable orthogonality_table(
    const DiscreteLaw& law, std::size_t n, double eta_n,
    const std::function<FactorFn(std::span<const Vector>, const SymMatrix&, double)>& factors);

/// First-order term of the expansion seen along v1, normalized by the
/// top-eigenvalue growth:
///   V_perp V_perp^T T_1 v1 / (1 + eta_n lambda_1 / n)^n
///     = (eta_n / n)(1 + eta_n lambda_1 / n)^{-1} sum_i D^{(n-i)} (x_i x_i^T - Sigma) v1,
/// with D^{(k)} = V_perp diag(lambda_perp^k) V_perp^T.
Vector hajek_term_v1(std::span<const Vector> data, const SpectralModel& model, double eta_n);

}  // namespace streampca
