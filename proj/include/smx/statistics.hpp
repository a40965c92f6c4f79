#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smx {

/// Sample mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::size_t n = 0;
};

Estimate estimate(std::span<const double> samples);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // from residuals; 0 for two points
  double max_residual = 0.0;
};

// Ordinary least squares y = intercept + slope x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Least-squares order in log2-log2 coordinates.
struct OrderFit {
  std::vector<double> dt;
  std::vector<double> error;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double max_residual = 0.0;
  std::vector<double> pairwise;  // log2(e_i / e_{i+1}) / log2(dt_i / dt_{i+1})
};

// Needs >= 3 points, positive errors and distinct step sizes.
OrderFit fit_order(std::span<const double> dt, std::span<const double> error);

// Two-sided Kolmogorov-Smirnov distance between the sample and N(0, 1).
double ks_distance_normal(std::vector<double> samples);
// Asymptotic critical value c(alpha) / (sqrt n + 0.12 + 0.11 / sqrt n).
double ks_critical_value(std::size_t n, double alpha);

/// Mean of a serially correlated series from the means of contiguous batches.
struct BatchMeans {
  std::vector<double> batches;
  Estimate summary;  // over the batch means
  double ci_low = 0.0, ci_high = 0.0;
};

inline constexpr std::size_t kMinBatches = 20;

// Series length must be divisible into `batches` equal parts (the remainder
// at the end is dropped). confidence is two-sided, e.g. 0.95.
BatchMeans batch_means(std::span<const double> series, std::size_t batches, double confidence = 0.95);
// Same from precomputed batch values.
BatchMeans from_batches(std::vector<double> batches, double confidence = 0.95);

double student_t_quantile(double p, double dof);
double normal_cdf(double x);

}  // namespace smx
