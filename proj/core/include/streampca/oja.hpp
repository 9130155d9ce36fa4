#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>

#include "streampca/linalg.hpp"

namespace streampca {

/// Learning rate eta_n = ln(n), the default schedule.
inline double log_learning_rate(std::size_t n) { return std::log(static_cast<double>(n)); }

/// Oja's streaming iteration with constant step eta_n / n over a planned
/// horizon of n samples:
///
///   w <- normalize(w + (eta_n / n) (w^T x) x)
///
/// The direction is renormalized after every sample. Since the update is
/// linear in w, this matches normalizing once at the end.
class OjaState {
 public:
  /// Throws std::invalid_argument on a zero u0, eta_n <= 0 or n == 0.
  static OjaState init(const Vector& u0, double eta_n, std::size_t n);

  /// Consume one sample. Throws DimensionError on a dimension mismatch and
  /// std::out_of_range once n samples have been consumed.
  void step(const Vector& x);

  const Vector& w() const noexcept { return w_; }
  std::size_t steps() const noexcept { return t_; }
  std::size_t horizon() const noexcept { return n_; }
  double eta_n() const noexcept { return eta_n_; }
  double step_size() const noexcept { return eta_n_ / static_cast<double>(n_); }

 private:
  OjaState(Vector w, double eta_n, std::size_t n) : w_(std::move(w)), eta_n_(eta_n), n_(n) {}

  Vector w_;
  std::size_t t_ = 0;
  double eta_n_;
  std::size_t n_;
};

/// Run Oja over a stored sample. The horizon is data.size(); an empty sample
/// returns u0 / ||u0||.
Vector oja_run(std::span<const Vector> data, double eta_n, const Vector& u0);

/// Run Oja over n samples pulled from `source`, a callable filling a Vector.
template <class Source>
  requires std::invocable<Source&, Vector&>
Vector oja_run(Source&& source, std::size_t n, double eta_n, const Vector& u0) {
  if (n == 0) return normalized(u0);
  auto state = OjaState::init(u0, eta_n, n);
  Vector x(u0.dim());
  for (std::size_t t = 0; t < n; ++t) {
    source(x);
    state.step(x);
  }
  return state.w();
}

/// 1 - (u^T v)^2 / (||u||^2 ||v||^2), clamped to [0, 1].
double sin2(const Vector& u, const Vector& v);

}  // namespace streampca
