#pragma once

#include <span>
#include <vector>

namespace hjlab {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> x);
/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::span<const double> x, double q);
double median(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
/// Fit of log y against log x; non-positive pairs are skipped.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace hjlab
