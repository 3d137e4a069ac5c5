#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fraclab {

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
// Sorts a copy of the samples.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Critical value at the 1% level, c(0.01) = 1.63 (one-sample: D* = 1.63/sqrt(n);
// two-sample: D* = 1.63 sqrt((n+m)/(n m))).
inline constexpr double ks_critical_1pct = 1.63;

// Pearson chi-squared statistic for binned counts.
double chi2_statistic(std::span<const long> observed, std::span<const double> expected);

// 99th percentile of chi-squared with `dof` degrees of freedom
// (Wilson-Hilferty approximation).
double chi2_critical_99(int dof);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // from per-point sigmas when provided
};

// Ordinary least squares y = a + b x. If sigma is nonempty it is used for
// weighting and for the slope standard error.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> sigma = {});

}  // namespace fraclab
