#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace streampca {

/// Right-continuous empirical CDF F(t) = #{x_i <= t} / count.
class EmpiricalCdf {
 public:
  /// Throws std::invalid_argument on empty input or non-finite values.
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double t) const;
  /// F(t-) = #{x_i < t} / count.
  double left_limit(double t) const;

  /// Smallest sample x with F(x) >= p; p = 0 gives the minimum.
  double quantile(double p) const;

  std::size_t count() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const noexcept { return sorted_; }
  double mean() const;

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf ecdf(std::vector<double> samples) { return EmpiricalCdf(std::move(samples)); }

/// sup_t |F(t) - G(t)|, evaluated at every pooled jump point including the
/// left limits there.
double kolmogorov_distance(const EmpiricalCdf& f, const EmpiricalCdf& g);

}  // namespace streampca
