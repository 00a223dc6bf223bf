#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rwde {

/// Two-sided asymptotic Kolmogorov-Smirnov critical constant at the 5% level.
inline constexpr double kKs5Percent = 1.358;

/// sup_x |F_n(x) - cdf(x)|.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
/// Two-sample statistic sup_x |F_n(x) - G_m(x)|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// c(5%) / sqrt(n).
double ks_threshold(std::size_t n);
/// c(5%) * sqrt((n + m) / (n m)).
double ks_two_sample_threshold(std::size_t n, std::size_t m);

/// Hill estimator of kappa for P(X > t) ~ t^{-kappa} from the top k order
/// statistics.
double hill_tail_exponent(std::span<const double> samples, std::size_t k);
/// Same with the default k = round(n^{2/3}).
double hill_tail_exponent(std::span<const double> samples);
std::size_t default_hill_k(std::size_t n);

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);
/// Linear-interpolated quantile, q in [0,1].
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);
double correlation(std::span<const double> xs, std::span<const double> ys);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

/// Running mean / variance (Welford).
class RunningStats {
 public:
  void add(double x) noexcept;
  /// Merge another accumulator (Chan et al.).
  void merge(const RunningStats& other) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;
  double standard_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rwde
