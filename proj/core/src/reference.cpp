#include "streampca/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "streampca/error.hpp"

namespace streampca {

namespace {

constexpr double kUniformFourthMoment = 9.0 / 5.0;

// sum_{i=0}^{n-1} r^i, accurate when r is close to 1.
double geometric_sum(double r, std::size_t n) {
  const double nd = static_cast<double>(n);
  if (std::abs(1.0 - r) < 1e-12) return nd;
  if (r == 0.0) return 1.0;
  return std::expm1(nd * std::log1p(r - 1.0)) / (r - 1.0);
}

// Accumulates scale * y y^T into the upper triangle of acc.
void add_outer_upper(Matrix& acc, const Vector& y, double scale) {
  const std::size_t k = y.dim();
  for (std::size_t a = 0; a < k; ++a) {
    const double ya = scale * y[a];
    double* row = acc.data() + a * k;
    for (std::size_t b = a; b < k; ++b) row[b] += ya * y[b];
  }
}

SymMatrix from_upper(Matrix acc) {
  const std::size_t k = acc.rows();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) acc(a, b) = acc(b, a);
  }
  return SymMatrix(acc);
}

SymMatrix discrete_M(const SpectralModel& model, const DiscreteLaw& law) {
  const std::size_t k = model.dim() - 1;
  Matrix acc(k, k);
  for (std::size_t s = 0; s < law.points.size(); ++s) {
    const Vector& x = law.points[s];
    const double proj = dot(x, model.v1);
    add_outer_upper(acc, transpose_times(model.v_perp, x), law.probabilities[s] * proj * proj);
  }
  return from_upper(std::move(acc));
}

}  // namespace

std::vector<double> lambda_perp(const SpectralModel& model, double eta_n, std::size_t n) {
  if (n == 0) throw std::invalid_argument("lambda_perp: n must be positive");
  const double step = eta_n / static_cast<double>(n);
  const double top = 1.0 + step * model.lambda1;
  std::vector<double> out;
  out.reserve(model.dim() - 1);
  for (std::size_t j = 1; j < model.dim(); ++j) {
    out.push_back((1.0 + step * model.eig.eigenvalues[j]) / top);
  }
  return out;
}

SymMatrix exact_M(const SpectralModel& model) {
  if (model.dim() < 2) throw DimensionError("exact_M: dimension must be >= 2");
  if (const auto* law = std::get_if<DiscreteLaw>(&model.law)) return discrete_M(model, *law);

  const Vector& v = model.v1;
  const Vector sigma_v = model.sigma * v;
  Matrix full = dot(v, sigma_v) * model.sigma.matrix();
  full += 2.0 * Matrix::outer(sigma_v, sigma_v);
  const std::size_t d = model.dim();
  for (std::size_t k = 0; k < d; ++k) {
    const Vector s_k = model.sqrt_sigma.matrix().column(k);
    const double proj = dot(v, s_k);
    full += ((kUniformFourthMoment - 3.0) * proj * proj) * Matrix::outer(s_k, s_k);
  }
  return restrict_to(SymMatrix(full), model.v_perp);
}

SymMatrix estimate_M(const SpectralModel& model, RngStream& stream, std::size_t n_mc) {
  if (model.dim() < 2) throw DimensionError("estimate_M: dimension must be >= 2");
  if (const auto* law = std::get_if<DiscreteLaw>(&model.law)) return discrete_M(model, *law);
  if (n_mc == 0) throw std::invalid_argument("estimate_M: n_mc must be >= 1");

  const std::size_t d = model.dim();
  Matrix acc(d - 1, d - 1);
  Vector x(d);
  Vector scratch(d);
  for (std::size_t draw = 0; draw < n_mc; ++draw) {
    sample_x(model, stream, x, scratch);
    const double proj = dot(x, model.v1);
    add_outer_upper(acc, transpose_times(model.v_perp, x), proj * proj);
  }
  acc *= 1.0 / static_cast<double>(n_mc);
  return from_upper(std::move(acc));
}

SymMatrix assemble_vbar(const SymMatrix& m_matrix, const std::vector<double>& lambda_perp,
                        double eta_n, std::size_t n, const Matrix& v_perp) {
  const std::size_t k = m_matrix.dim();
  if (lambda_perp.size() != k || v_perp.cols() != k) {
    throw DimensionError("assemble_vbar: M, lambda_perp and v_perp disagree in size");
  }
  if (n == 0) throw std::invalid_argument("assemble_vbar: n must be positive");
  const double scale = eta_n / static_cast<double>(n);
  Matrix inner(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      inner(a, b) = scale * m_matrix(a, b) * geometric_sum(lambda_perp[a] * lambda_perp[b], n);
    }
  }
  return conjugate(v_perp, SymMatrix(inner));
}

ReferenceCovariance build_reference(const SpectralModel& model, const SymMatrix& m_matrix,
                                    double eta_n, std::size_t n) {
  model.require_gap();
  ReferenceCovariance ref;
  ref.m_matrix = m_matrix;
  ref.lambda_perp = lambda_perp(model, eta_n, n);
  ref.vbar = assemble_vbar(m_matrix, ref.lambda_perp, eta_n, n, model.v_perp);
  ref.eta_n = eta_n;
  ref.n = n;
  return ref;
}

double WeightedChiSq::mean() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double WeightedChiSq::variance() const {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return 2.0 * s;
}

WeightedChiSq chisq_weights(const SymMatrix& vbar) {
  const auto eig = eigh(vbar);
  const double op = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  WeightedChiSq law;
  law.weights.reserve(eig.dim());
  for (double lambda : eig.eigenvalues) {
    if (lambda < -1e-8 * op) {
      throw NotPsdError("chisq_weights: covariance has eigenvalue " + std::to_string(lambda), lambda);
    }
    law.weights.push_back(std::max(lambda, 0.0));
  }
  return law;
}

std::vector<double> sample_weighted_chisq(const WeightedChiSq& law, RngStream& stream,
                                          std::size_t n_mc) {
  if (n_mc == 0) throw std::invalid_argument("sample_weighted_chisq: n_mc must be >= 1");
  std::vector<double> out(n_mc, 0.0);
  for (double& value : out) {
    double s = 0.0;
    for (double w : law.weights) s += w * chisq1(stream);
    value = s;
  }
  return out;
}

AntiConcentrationResult anticoncentration_check(const WeightedChiSq& law, double h,
                                                std::size_t n_mc, std::size_t grid_points,
                                                RngStream& stream) {
  if (!(h > 0.0)) throw std::invalid_argument("anticoncentration_check: h must be positive");
  if (grid_points < 2) throw std::invalid_argument("anticoncentration_check: grid too small");
  double sumsq = 0.0;
  for (double w : law.weights) sumsq += w * w;
  if (!(sumsq > 0.0)) throw std::invalid_argument("anticoncentration_check: all weights zero");

  WeightedChiSq unit = law;
  const double inv = 1.0 / std::sqrt(sumsq);
  for (double& w : unit.weights) w *= inv;

  std::vector<double> draws = sample_weighted_chisq(unit, stream, n_mc);
  std::sort(draws.begin(), draws.end());
  const auto at_quantile = [&](double p) {
    const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(n_mc - 1)));
    return draws[idx];
  };
  const double lo = at_quantile(0.001);
  const double hi = at_quantile(0.999);

  AntiConcentrationResult out;
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double t = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
    const auto first = std::lower_bound(draws.begin(), draws.end(), t);
    const auto last = std::upper_bound(draws.begin(), draws.end(), t + h);
    const double prob = static_cast<double>(last - first) / static_cast<double>(n_mc);
    out.max_window_prob = std::max(out.max_window_prob, prob);
  }
  out.bound = std::sqrt(4.0 * h / std::numbers::pi);
  out.slack = 3.0 * std::sqrt(0.25 / static_cast<double>(n_mc));
  out.pass = out.max_window_prob <= out.bound + out.slack;
  return out;
}

SpectralDiscrepancy spectral_discrepancy(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("spectral_discrepancy: dimension mismatch");
  const SymMatrix diff = a - b;
  return {trace(diff), frobenius_norm(diff), operator_norm(diff), frobenius_norm(a)};
}

}  // namespace streampca
