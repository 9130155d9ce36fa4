#include "streampca/bootstrap.hpp"

#include <cmath>
#include <stdexcept>

#include "streampca/error.hpp"
#include "streampca/oja.hpp"
#include "streampca/parallel.hpp"

namespace streampca {

namespace {

void normalize_in_place(Vector& v) {
  const double len = norm(v);
  for (double& e : v.values()) e /= len;
}

// v <- normalize(v + step (h + w (h - g))) without temporaries.
void replicate_update(Vector& v, const Vector& x, const Vector* prev_x, double w, double step) {
  const double hx = dot(x, v);
  if (prev_x == nullptr) {
    axpy(step * hx, x, v);
  } else {
    const double gx = dot(*prev_x, v);
    axpy(step * (1.0 + w) * hx, x, v);
    axpy(-step * w * gx, *prev_x, v);
  }
  normalize_in_place(v);
}

}  // namespace

double GaussianMultipliers::operator()(std::size_t replicate, std::size_t step) const {
  std::vector<std::uint64_t> path = base_path_;
  path.push_back(replicate);
  path.push_back(step);
  RngStream stream(seed_, path);
  return normal(stream, 0.0, kMultiplierVariance);
}

Vector bootstrap_increment(const Vector& v, const Vector& x, const Vector* prev_x, double w,
                           double step_size) {
  const Vector h = dot(x, v) * x;
  if (prev_x == nullptr) return step_size * h;
  const Vector g = dot(*prev_x, v) * *prev_x;
  return step_size * (h + w * (h - g));
}

BootstrapEnsemble BootstrapEnsemble::init(const Vector& u0, std::size_t m, double eta_n,
                                          std::size_t n) {
  if (m == 0) throw std::invalid_argument("BootstrapEnsemble: m must be >= 1");
  if (!(eta_n > 0.0)) throw std::invalid_argument("BootstrapEnsemble: eta_n must be positive");
  if (n == 0) throw std::invalid_argument("BootstrapEnsemble: horizon must be positive");
  return BootstrapEnsemble(std::vector<Vector>(m, normalized(u0)), eta_n, n);
}

void BootstrapEnsemble::step(const Vector& x, const MultiplierSource& multipliers) {
  if (x.dim() != replicates_.front().dim()) {
    throw DimensionError("BootstrapEnsemble::step: sample dimension mismatch");
  }
  if (t_ >= n_) throw std::out_of_range("BootstrapEnsemble::step: horizon exceeded");
  ++t_;
  const Vector* prev = prev_x_ ? &*prev_x_ : nullptr;
  for (std::size_t r = 0; r < replicates_.size(); ++r) {
    const double w = prev ? multipliers(r, t_) : 0.0;
    replicate_update(replicates_[r], x, prev, w, step_size());
  }
  prev_x_ = x;
}

BootstrapRun run_bootstrap(std::span<const Vector> data, const Vector& u0, std::size_t m,
                           double eta_n, const MultiplierSource& multipliers, unsigned threads) {
  if (m == 0) throw std::invalid_argument("run_bootstrap: m must be >= 1");
  if (data.empty()) throw std::invalid_argument("run_bootstrap: empty data");
  for (const Vector& x : data) {
    if (x.dim() != u0.dim()) throw DimensionError("run_bootstrap: sample dimension mismatch");
  }
  BootstrapRun out;
  out.v_hat = oja_run(data, eta_n, u0);

  const double step = eta_n / static_cast<double>(data.size());
  const Vector start = normalized(u0);
  out.replicates.assign(m, start);
  parallel_for(m, threads, [&](std::size_t r) {
    Vector& v = out.replicates[r];
    for (std::size_t t = 0; t < data.size(); ++t) {
      const Vector* prev = t == 0 ? nullptr : &data[t - 1];
      const double w = prev ? multipliers(r, t + 1) : 0.0;
      replicate_update(v, data[t], prev, w, step);
    }
  });

  out.errors.resize(m);
  for (std::size_t r = 0; r < m; ++r) out.errors[r] = sin2(out.v_hat, out.replicates[r]);
  return out;
}

SymMatrix bootstrap_covariance(std::span<const Vector> data, const SpectralModel& model,
                               double eta_n) {
  model.require_gap();
  const std::size_t n = data.size();
  const std::size_t d = model.dim();
  if (n == 0) throw std::invalid_argument("bootstrap_covariance: empty data");
  const std::vector<double> rho = lambda_perp(model, eta_n, n);
  const std::size_t k = d - 1;

  // power[j] = rho_j^(n - i), walking i from n down to 2.
  std::vector<double> power(k, 1.0);
  Matrix acc(k, k);
  for (std::size_t i = n; i >= 2; --i) {
    const Vector& xi = data[i - 1];
    const Vector& xp = data[i - 2];
    Vector delta_v1 = dot(xi, model.v1) * xi;
    axpy(-dot(xp, model.v1), xp, delta_v1);
    Vector y = transpose_times(model.v_perp, delta_v1);
    for (std::size_t j = 0; j < k; ++j) y[j] *= power[j];
    for (std::size_t a = 0; a < k; ++a) {
      double* row = acc.data() + a * k;
      for (std::size_t b = a; b < k; ++b) row[b] += y[a] * y[b];
    }
    for (std::size_t j = 0; j < k; ++j) power[j] *= rho[j];
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) acc(a, b) = acc(b, a);
  }
  acc *= kMultiplierVariance * eta_n / static_cast<double>(n);
  return conjugate(model.v_perp, SymMatrix(acc));
}

CovarianceDiscrepancy covariance_discrepancy(std::span<const Vector> data,
                                             const SpectralModel& model, double eta_n,
                                             const ReferenceCovariance& reference) {
  if (reference.n != data.size() || reference.eta_n != eta_n) {
    throw std::invalid_argument("covariance_discrepancy: reference built for a different (n, eta_n)");
  }
  const auto disc = spectral_discrepancy(bootstrap_covariance(data, model, eta_n), reference.vbar);
  return {std::abs(disc.delta1), disc.frob, disc.op};
}

}  // namespace streampca
