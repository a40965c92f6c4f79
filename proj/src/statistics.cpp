#include "smx/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "smx/summation.hpp"

namespace smx {

Estimate estimate(std::span<const double> samples) {
  Estimate e;
  e.n = samples.size();
  if (e.n == 0) throw std::invalid_argument("no samples");
  e.mean = pairwise_sum(samples) / static_cast<double>(e.n);
  if (e.n > 1) {
    std::vector<double> dev(samples.begin(), samples.end());
    for (double& d : dev) d -= e.mean;
    e.variance = pairwise_sum_squares(dev) / static_cast<double>(e.n - 1);
    e.se = std::sqrt(e.variance / static_cast<double>(e.n));
  }
  return e;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("need at least two points");
  const double xm = pairwise_sum(x) / static_cast<double>(n);
  const double ym = pairwise_sum(y) / static_cast<double>(n);
  std::vector<double> sxx(n), sxy(n);
  for (std::size_t i = 0; i < n; ++i) {
    sxx[i] = (x[i] - xm) * (x[i] - xm);
    sxy[i] = (x[i] - xm) * (y[i] - ym);
  }
  const double denom = pairwise_sum(sxx);
  if (!(denom > 0.0)) throw std::invalid_argument("abscissae are all equal");
  LineFit f;
  f.slope = pairwise_sum(sxy) / denom;
  f.intercept = ym - f.slope * xm;
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) {
    res[i] = y[i] - (f.intercept + f.slope * x[i]);
    f.max_residual = std::max(f.max_residual, std::abs(res[i]));
  }
  if (n > 2) f.slope_se = std::sqrt(pairwise_sum_squares(res) / static_cast<double>(n - 2) / denom);
  return f;
}

OrderFit fit_order(std::span<const double> dt, std::span<const double> error) {
  if (dt.size() != error.size()) throw std::invalid_argument("step and error lists differ in length");
  if (dt.size() < 3) throw std::invalid_argument("order fit needs at least three points");
  OrderFit fit;
  fit.dt.assign(dt.begin(), dt.end());
  fit.error.assign(error.begin(), error.end());
  std::vector<double> x, y;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (!(dt[i] > 0.0) || !std::isfinite(dt[i])) throw std::invalid_argument("step sizes must be positive");
    if (!(error[i] > 0.0) || !std::isfinite(error[i])) throw std::invalid_argument("errors must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (dt[j] == dt[i]) throw std::invalid_argument("repeated step size");
    x.push_back(std::log2(dt[i]));
    y.push_back(std::log2(error[i]));
  }
  const LineFit lf = least_squares(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.slope_se = lf.slope_se;
  fit.max_residual = lf.max_residual;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) fit.pairwise.push_back((y[i] - y[i + 1]) / (x[i] - x[i + 1]));
  return fit;
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

double ks_distance_normal(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bad KS parameters");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

double student_t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

BatchMeans from_batches(std::vector<double> batches, double confidence) {
  if (batches.size() < 2) throw std::invalid_argument("need at least two batches");
  BatchMeans b;
  b.batches = std::move(batches);
  b.summary = estimate(b.batches);
  const double t = student_t_quantile(0.5 + 0.5 * confidence, static_cast<double>(b.batches.size() - 1));
  b.ci_low = b.summary.mean - t * b.summary.se;
  b.ci_high = b.summary.mean + t * b.summary.se;
  return b;
}

BatchMeans batch_means(std::span<const double> series, std::size_t batches, double confidence) {
  if (batches < 2) throw std::invalid_argument("need at least two batches");
  const std::size_t len = series.size() / batches;
  if (len == 0) throw std::invalid_argument("series shorter than the batch count");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b)
    means[b] = pairwise_sum(series.subspan(b * len, len)) / static_cast<double>(len);
  return from_batches(std::move(means), confidence);
}

}  // namespace smx
