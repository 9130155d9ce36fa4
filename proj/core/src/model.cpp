#include "streampca/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "streampca/error.hpp"

namespace streampca {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_discrete(const DiscreteLaw& law) {
  if (law.points.empty()) throw std::invalid_argument("DiscreteLaw: empty support");
  if (law.points.size() != law.probabilities.size()) {
    throw std::invalid_argument("DiscreteLaw: points/probabilities size mismatch");
  }
  const std::size_t d = law.points.front().dim();
  double total = 0.0;
  Vector mean(d);
  for (std::size_t k = 0; k < law.points.size(); ++k) {
    if (law.points[k].dim() != d) throw DimensionError("DiscreteLaw: inconsistent point dimension");
    const double p = law.probabilities[k];
    if (!(p > 0.0)) throw std::invalid_argument("DiscreteLaw: probabilities must be positive");
    total += p;
    axpy(p, law.points[k], mean);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteLaw: probabilities must sum to 1");
  }
  if (norm(mean) > 1e-10) throw std::invalid_argument("DiscreteLaw: support must have mean zero");
}

}  // namespace

void validate(const CovarianceSpec& spec) {
  std::visit(overloaded{
                 [](const KernelScaledCovariance& k) {
                   if (k.d < 2) throw std::invalid_argument("kernel covariance: d must be >= 2");
                   if (!(k.c >= 0.0)) throw std::invalid_argument("kernel covariance: c must be >= 0");
                   if (!(k.scale > 0.0)) {
                     throw std::invalid_argument("kernel covariance: scale must be > 0");
                   }
                   if (!std::isfinite(k.beta)) {
                     throw std::invalid_argument("kernel covariance: beta must be finite");
                   }
                 },
                 [](const ExplicitCovariance&) {},
                 [](const DiscreteLaw& law) { validate_discrete(law); },
             },
             spec);
}

SymMatrix build_kernel_covariance(std::size_t d, double c, double beta, double scale) {
  validate(KernelScaledCovariance{d, c, beta, scale});
  std::vector<double> sigma(d);
  for (std::size_t i = 0; i < d; ++i) sigma[i] = scale * std::pow(static_cast<double>(i + 1), -beta);
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double gap = std::abs(static_cast<double>(i) - static_cast<double>(j));
      m(i, j) = std::exp(-gap * c) * sigma[i] * sigma[j];
    }
  }
  return SymMatrix(m);
}

SymMatrix covariance_of(const CovarianceSpec& spec) {
  validate(spec);
  return std::visit(overloaded{
                        [](const KernelScaledCovariance& k) {
                          return build_kernel_covariance(k.d, k.c, k.beta, k.scale);
                        },
                        [](const ExplicitCovariance& e) { return e.sigma; },
                        [](const DiscreteLaw& law) {
                          const std::size_t d = law.dim();
                          Matrix m(d, d);
                          for (std::size_t k = 0; k < law.points.size(); ++k) {
                            m += law.probabilities[k] * Matrix::outer(law.points[k], law.points[k]);
                          }
                          return SymMatrix(m);
                        },
                    },
                    spec);
}

void SpectralModel::require_gap() const {
  if (degenerate_gap) {
    throw DegenerateGapError("model has no eigengap: lambda1 = " + std::to_string(lambda1) +
                             ", lambda2 = " + std::to_string(lambda2));
  }
}

SpectralModel spectral_decompose(const CovarianceSpec& spec) {
  SpectralModel model;
  model.law = spec;
  model.sigma = covariance_of(spec);
  model.eig = eigh(model.sigma);
  model.sqrt_sigma = sqrt_psd(model.sigma);

  const std::size_t d = model.sigma.dim();
  model.v1 = model.eig.eigenvector(0);
  model.lambda1 = model.eig.eigenvalues[0];
  model.lambda2 = d > 1 ? model.eig.eigenvalues[1] : 0.0;
  model.v_perp = Matrix(d, d - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 1; k < d; ++k) model.v_perp(i, k - 1) = model.eig.eigenvectors(i, k);
  }
  model.degenerate_gap = d < 2 || model.lambda1 - model.lambda2 <= 1e-10 * std::abs(model.lambda1);
  return model;
}

void sample_x(const SpectralModel& model, RngStream& stream, Vector& out, Vector& scratch) {
  const std::size_t d = model.dim();
  if (const auto* law = std::get_if<DiscreteLaw>(&model.law)) {
    const double u = stream.next_open01();
    double cumulative = 0.0;
    std::size_t pick = law->points.size() - 1;
    for (std::size_t k = 0; k < law->points.size(); ++k) {
      cumulative += law->probabilities[k];
      if (u < cumulative) {
        pick = k;
        break;
      }
    }
    out = law->points[pick];
    return;
  }
  if (out.dim() != d || scratch.dim() != d) {
    throw DimensionError("sample_x: output buffers must match the model dimension");
  }
  for (std::size_t j = 0; j < d; ++j) scratch[j] = uniform_sym(stream);
  const Matrix& root = model.sqrt_sigma.matrix();
  for (std::size_t i = 0; i < d; ++i) {
    const double* row = root.data() + i * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += row[j] * scratch[j];
    out[i] = s;
  }
}

Vector sample_x(const SpectralModel& model, RngStream& stream) {
  Vector out(model.dim());
  Vector scratch(model.dim());
  sample_x(model, stream, out, scratch);
  return out;
}

void enumerate_outcomes(const DiscreteLaw& law, std::size_t n,
                        const std::function<void(std::span<const std::size_t>, double)>& visit) {
  validate_discrete(law);
  const std::size_t s = law.support_size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= s;
    if (total > kMaxEnumeratedOutcomes) {
      throw EnumerationTooLarge("enumerate_outcomes: support^n exceeds 1e6");
    }
  }
  // Odometer over support indices; index 0 varies fastest.
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t count = 0; count < total; ++count) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= law.probabilities[idx[i]];
    visit(idx, p);
    for (std::size_t i = 0; i < n; ++i) {
      if (++idx[i] < s) break;
      idx[i] = 0;
    }
  }
}

Diagnostics diagnostics(const SpectralModel& model, RngStream& stream, std::size_t n_samples) {
  if (n_samples == 0) throw std::invalid_argument("diagnostics: n_samples must be >= 1");
  Diagnostics out;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Vector x = sample_x(model, stream);
    const double op = operator_norm(SymMatrix::outer(x) - model.sigma);
    sum += op * op;
    out.alpha_n = std::max(out.alpha_n, dot(x, x));
  }
  out.m_d_hat = sum / static_cast<double>(n_samples);
  return out;
}

}  // namespace streampca
