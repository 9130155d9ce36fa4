#include "streampca/oja.hpp"

#include <algorithm>
#include <stdexcept>

#include "streampca/error.hpp"

namespace streampca {

OjaState OjaState::init(const Vector& u0, double eta_n, std::size_t n) {
  if (!(eta_n > 0.0)) throw std::invalid_argument("OjaState: eta_n must be positive");
  if (n == 0) throw std::invalid_argument("OjaState: horizon must be positive");
  return OjaState(normalized(u0), eta_n, n);
}

void OjaState::step(const Vector& x) {
  if (x.dim() != w_.dim()) throw DimensionError("OjaState::step: sample dimension mismatch");
  if (t_ >= n_) throw std::out_of_range("OjaState::step: horizon exceeded");
  const double coeff = step_size() * dot(w_, x);
  axpy(coeff, x, w_);
  const double len = norm(w_);
  for (double& v : w_.values()) v /= len;
  ++t_;
}

Vector oja_run(std::span<const Vector> data, double eta_n, const Vector& u0) {
  if (data.empty()) return normalized(u0);
  auto state = OjaState::init(u0, eta_n, data.size());
  for (const Vector& x : data) state.step(x);
  return state.w();
}

double sin2(const Vector& u, const Vector& v) {
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (!(uu > 0.0) || !(vv > 0.0)) throw std::invalid_argument("sin2: zero vector");
  const double uv = dot(u, v);
  return std::clamp(1.0 - (uv * uv) / (uu * vv), 0.0, 1.0);
}

}  // namespace streampca
