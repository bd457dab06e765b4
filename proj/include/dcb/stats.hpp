#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace dcb {

struct AggregateStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double median = 0.0;
  /// One-sample Kolmogorov-Smirnov test against a normal with the sample's own
  /// mean and std (classical K-S p-value, no Lilliefors correction). Unset when
  /// the sample has zero spread.
  std::optional<double> ks_statistic;
  std::optional<double> ks_p_value;
};

/// Throws InsufficientData for fewer than two values.
AggregateStats aggregate(std::span<const double> values);

double normal_cdf(double x, double mean, double std);

/// D_n = sup |F_n(x) - F(x)| against N(mean, std).
double ks_statistic_normal(std::span<const double> values, double mean, double std);

/// P(D_n < d) for the two-sided one-sample statistic (Marsaglia, Tsang & Wang 2003).
double kolmogorov_cdf(int n, double d);

}  // namespace dcb
