#include "streampca/hoeffding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "streampca/error.hpp"
#include "streampca/reference.hpp"

namespace streampca {

namespace {

void require_enumerable(std::size_t n) {
  if (n > kMaxHoeffdingN) {
    throw EnumerationTooLarge("Hoeffding enumeration capped at n = 20 (got " + std::to_string(n) +
                              ")");
  }
}

std::size_t common_dim(std::span<const Vector> data, std::size_t fallback) {
  if (data.empty()) return fallback;
  const std::size_t d = data.front().dim();
  for (const Vector& x : data) {
    if (x.dim() != d) throw DimensionError("Hoeffding: inconsistent sample dimensions");
  }
  return d;
}

// Every subset product for one fixed set of factors, indexed by mask.
std::vector<Matrix> all_subset_products(std::size_t n, std::size_t dim, const FactorFn& factor) {
  require_enumerable(n);
  std::vector<Matrix> inside(n);
  std::vector<Matrix> outside(n);
  for (std::size_t i = 0; i < n; ++i) {
    inside[i] = factor(i + 1, true);
    outside[i] = factor(i + 1, false);
  }
  std::vector<Matrix> products(std::size_t{1} << n);
  products[0] = Matrix::identity(dim);
  // Masks using only indices < i are complete before index i is added;
  // the new factor multiplies on the left.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < half; ++mask) {
      products[mask | half] = inside[i] * products[mask];
      products[mask] = outside[i] * products[mask];
    }
  }
  return products;
}

}  // namespace

Matrix ordered_product(std::size_t n, const std::function<Matrix(std::size_t)>& factor) {
  Matrix product;
  for (std::size_t i = 1; i <= n; ++i) {
    Matrix f = factor(i);
    product = i == 1 ? std::move(f) : f * product;
  }
  return product;
}

Matrix direct_product(std::span<const Vector> data, double eta_n, std::size_t dim_if_empty) {
  const std::size_t n = data.size();
  if (n == 0) {
    if (dim_if_empty == 0) throw std::invalid_argument("direct_product: empty data has no dimension");
    return Matrix::identity(dim_if_empty);
  }
  common_dim(data, 0);
  const double step = eta_n / static_cast<double>(n);
  return ordered_product(n, [&](std::size_t i) {
    return Matrix::identity(data[i - 1].dim()) + step * Matrix::outer(data[i - 1], data[i - 1]);
  });
}

FactorFn oja_projection_factors(std::span<const Vector> data, const SymMatrix& sigma,
                                double eta_n) {
  const std::size_t d = common_dim(data, sigma.dim());
  if (d != sigma.dim()) throw DimensionError("Hoeffding: data and sigma disagree in dimension");
  const double step = data.empty() ? 0.0 : eta_n / static_cast<double>(data.size());
  const Matrix centered_mean = Matrix::identity(d) + step * sigma.matrix();
  return [data, sigma, step, centered_mean](std::size_t i, bool in_subset) -> Matrix {
    if (!in_subset) return centered_mean;
    return step * (Matrix::outer(data[i - 1], data[i - 1]) - sigma.matrix());
  };
}

Matrix hoeffding_term(std::span<const Vector> data, const SymMatrix& sigma, double eta_n,
                      SubsetMask subset) {
  const std::size_t n = data.size();
  require_enumerable(n);
  if ((subset >> n) != 0) throw std::invalid_argument("hoeffding_term: subset out of range");
  if (n == 0) return Matrix::identity(sigma.dim());
  const FactorFn factor = oja_projection_factors(data, sigma, eta_n);
  return ordered_product(n, [&](std::size_t i) { return factor(i, ((subset >> (i - 1)) & 1u) != 0); });
}

HoeffdingSum enumerate_subset_products(std::size_t n, std::size_t dim, const FactorFn& factor,
                                       SubsetMask excluded) {
  require_enumerable(n);
  HoeffdingSum out;
  out.total = Matrix(dim, dim);
  out.by_order.assign(n + 1, Matrix(dim, dim));
  if (n == 0) {
    out.total = Matrix::identity(dim);
    out.by_order[0] = out.total;
    return out;
  }
  std::vector<Matrix> inside(n);
  std::vector<Matrix> outside(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (((excluded >> i) & 1u) == 0) inside[i] = factor(i + 1, true);
    outside[i] = factor(i + 1, false);
  }
  // Depth-first over indices 1..n carrying the partial product of the
  // factors chosen so far; 2^(n+1) matrix products in total.
  struct Frame {
    std::size_t next;
    std::size_t order;
    Matrix partial;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, Matrix::identity(dim)});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    if (frame.next == n) {
      out.by_order[frame.order] += frame.partial;
      continue;
    }
    const std::size_t i = frame.next;
    if (((excluded >> i) & 1u) == 0) {
      stack.push_back({i + 1, frame.order + 1, inside[i] * frame.partial});
    }
    stack.push_back({i + 1, frame.order, outside[i] * frame.partial});
  }
  for (const Matrix& t : out.by_order) out.total += t;
  return out;
}

HoeffdingSum hoeffding_sum(std::span<const Vector> data, const SymMatrix& sigma, double eta_n) {
  return enumerate_subset_products(data.size(), sigma.dim(),
                                   oja_projection_factors(data, sigma, eta_n));
}

Matrix bootstrap_direct_product(std::span<const Vector> data, std::span<const double> weights,
                                double eta_n) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("bootstrap_direct_product: empty data");
  if (weights.size() != n) throw DimensionError("bootstrap_direct_product: need one weight per sample");
  common_dim(data, 0);
  const double step = eta_n / static_cast<double>(n);
  return ordered_product(n, [&](std::size_t i) {
    const Vector& x = data[i - 1];
    Matrix f = Matrix::identity(x.dim()) + step * Matrix::outer(x, x);
    if (i >= 2) {
      const Vector& p = data[i - 2];
      f += (step * weights[i - 1]) * (Matrix::outer(x, x) - Matrix::outer(p, p));
    }
    return f;
  });
}

FactorFn bootstrap_projection_factors(std::span<const Vector> data,
                                      std::span<const double> weights, double eta_n) {
  if (weights.size() != data.size()) {
    throw DimensionError("bootstrap_projection_factors: need one weight per sample");
  }
  common_dim(data, 0);
  const double step = eta_n / static_cast<double>(data.size());
  return [data, weights, step](std::size_t i, bool in_subset) -> Matrix {
    const Vector& x = data[i - 1];
    if (!in_subset) return Matrix::identity(x.dim()) + step * Matrix::outer(x, x);
    if (i == 1) throw std::logic_error("bootstrap projection: index 1 has no increment");
    const Vector& p = data[i - 2];
    return (step * weights[i - 1]) * (Matrix::outer(x, x) - Matrix::outer(p, p));
  };
}

HoeffdingSum bootstrap_hoeffding_sum(std::span<const Vector> data, std::span<const double> weights,
                                     double eta_n) {
  if (data.empty()) throw std::invalid_argument("bootstrap_hoeffding_sum: empty data");
  return enumerate_subset_products(data.size(), data.front().dim(),
                                   bootstrap_projection_factors(data, weights, eta_n),
                                   /*excluded=*/SubsetMask{1});
}

OrthogonalityTable orthogonality_table(const DiscreteLaw& law, std::size_t n, double eta_n) {
  return orthogonality_table(law, n, eta_n, [](std::span<const Vector> data, const SymMatrix& sigma,
                                               double eta) {
    return oja_projection_factors(data, sigma, eta);
  });
}

OrthogonalityTable orthogonality_table(
    const DiscreteLaw& law, std::size_t n, double eta_n,
    const std::function<FactorFn(std::span<const Vector>, const SymMatrix&, double)>& factors) {
  if (n == 0) throw std::invalid_argument("orthogonality_table: n must be >= 1");
  if (n > 10) throw EnumerationTooLarge("orthogonality_table: n capped at 10 (4^n subset pairs)");
  const SymMatrix sigma = covariance_of(law);
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> gram(subsets * subsets, 0.0);

  OrthogonalityTable out;
  std::vector<Vector> sample(n);
  enumerate_outcomes(law, n, [&](std::span<const std::size_t> idx, double prob) {
    for (std::size_t i = 0; i < n; ++i) sample[i] = law.points[idx[i]];
    const auto products = all_subset_products(n, sigma.dim(), factors(sample, sigma, eta_n));
    for (std::size_t s = 0; s < subsets; ++s) {
      for (std::size_t r = s; r < subsets; ++r) {
        gram[s * subsets + r] += prob * frobenius_inner(products[s], products[r]);
      }
    }
    ++out.outcomes;
  });

  out.min_self = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < subsets; ++s) {
    if (s != 0) out.min_self = std::min(out.min_self, gram[s * subsets + s]);
    for (std::size_t r = s + 1; r < subsets; ++r) {
      out.max_cross = std::max(out.max_cross, std::abs(gram[s * subsets + r]));
    }
  }
  return out;
}

Vector hajek_term_v1(std::span<const Vector> data, const SpectralModel& model, double eta_n) {
  model.require_gap();
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("hajek_term_v1: empty data");
  const std::size_t k = model.dim() - 1;
  const std::vector<double> rho = lambda_perp(model, eta_n, n);
  const Vector sigma_v1 = model.sigma * model.v1;

  std::vector<double> power(k, 1.0);
  Vector inner(k);
  for (std::size_t i = n; i >= 1; --i) {
    const Vector& x = data[i - 1];
    if (x.dim() != model.dim()) throw DimensionError("hajek_term_v1: sample dimension mismatch");
    Vector centered = dot(x, model.v1) * x;
    axpy(-1.0, sigma_v1, centered);
    const Vector y = transpose_times(model.v_perp, centered);
    for (std::size_t j = 0; j < k; ++j) {
      inner[j] += power[j] * y[j];
      power[j] *= rho[j];
    }
  }
  const double step = eta_n / static_cast<double>(n);
  return (step / (1.0 + step * model.lambda1)) * (model.v_perp * inner);
}

}  // namespace streampca
