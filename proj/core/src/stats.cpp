#include "streampca/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace streampca {

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: no samples");
  for (double x : sorted_) {
    if (!std::isfinite(x)) throw std::invalid_argument("EmpiricalCdf: non-finite sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::left_limit(double t) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1]");
  const double count = static_cast<double>(sorted_.size());
  // Smallest k with k / count >= p, guarding against p * count rounding up.
  auto k = static_cast<std::size_t>(std::ceil(p * count));
  while (k > 0 && static_cast<double>(k - 1) / count >= p) --k;
  while (k < sorted_.size() && static_cast<double>(k) / count < p) ++k;
  return sorted_[k == 0 ? 0 : k - 1];
}

double EmpiricalCdf::mean() const {
  double s = 0.0;
  for (double x : sorted_) s += x;
  return s / static_cast<double>(sorted_.size());
}

double kolmogorov_distance(const EmpiricalCdf& f, const EmpiricalCdf& g) {
  double best = 0.0;
  const auto scan = [&](const std::vector<double>& jumps) {
    for (double t : jumps) {
      best = std::max(best, std::abs(f(t) - g(t)));
      best = std::max(best, std::abs(f.left_limit(t) - g.left_limit(t)));
    }
  };
  scan(f.sorted_samples());
  scan(g.sorted_samples());
  return best;
}

}  // namespace streampca
