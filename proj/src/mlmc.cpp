#include "smx/mlmc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/zeta.hpp>

namespace smx {

MlmcPlan sample_schedule(int base_level, int corrections, double epsilon, double horizon) {
  if (base_level < 0) throw std::invalid_argument("base level must be >= 0");
  if (corrections < 1) throw std::invalid_argument("need at least one correction level");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (2 * base_level + 2 * corrections > 62) throw std::overflow_error("M_0 = 2^(2 L0 + 2 L) does not fit in 64 bits");

  MlmcPlan p{base_level, corrections, epsilon, horizon, {}};
  p.samples.push_back(std::uint64_t{1} << (2 * base_level + 2 * corrections));
  for (int l = 1; l <= corrections; ++l) {
    const double m = std::ldexp(std::pow(static_cast<double>(l), 1.0 + epsilon), base_level + 2 * corrections - l);
    if (!(m < 1.8e19)) throw std::overflow_error("sample count does not fit in 64 bits");
    p.samples.push_back(static_cast<std::uint64_t>(std::ceil(m)));
  }
  return p;
}

namespace {

LevelStats summarise(int l, const std::vector<double>& values, std::uint64_t cost) {
  const Estimate e = estimate(values);
  LevelStats s;
  s.level = l;
  s.samples = values.size();
  s.mean = e.mean;
  s.variance = e.variance;
  // Var of the sample variance: (m4 - (n-3)/(n-1) var^2) / n.
  std::vector<double> c4(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - e.mean;
    c4[i] = d * d * d * d;
  }
  const double n = static_cast<double>(values.size());
  const double m4 = estimate(c4).mean;
  if (n > 1) s.variance_se = std::sqrt(std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * e.variance * e.variance) / n));
  s.cost = cost;
  return s;
}

}  // namespace

LevelStats mlmc_level(const ModelSpec& m, const Functional& phi, const StateVector& u0, int base_level, int l,
                      double horizon, std::uint64_t samples, const RunOptions& opts) {
  if (samples < 2) throw std::invalid_argument("need at least two samples per level");
  if (l < 0 || base_level < 0) throw std::invalid_argument("levels must be >= 0");
  if (l > static_cast<int>(kMaxLevelTag)) throw std::invalid_argument("level does not fit the stream tag");
  require_compatible(u0, m.spectrum());
  const auto started = std::chrono::steady_clock::now();
  const int fine = base_level + l;
  std::vector<double> values(samples);
  const auto tag = static_cast<std::uint32_t>(l);
  std::uint64_t cost_per_sample = std::uint64_t{1} << fine;
  if (l == 0) {
    const CoupledStepper stepper(m, std::ldexp(horizon, -fine), {0}, opts.solver);
    for_each_index(samples, opts.execution, [&](std::size_t r) {
      std::vector<StateVector> s{u0};
      stepper.run(s, {opts.root_seed, r, tag}, cost_per_sample);
      values[r] = phi(s[0]);
    });
  } else {
    // Fine and coarse lanes read the same increments; the coarse lane's are the pairwise sums.
    const CoupledStepper stepper(m, std::ldexp(horizon, -fine), {0, 1}, opts.solver);
    for_each_index(samples, opts.execution, [&](std::size_t r) {
      std::vector<StateVector> s{u0, u0};
      stepper.run(s, {opts.root_seed, r, tag}, std::uint64_t{1} << fine);
      values[r] = phi(s[0]) - phi(s[1]);
    });
    cost_per_sample += cost_per_sample / 2;
  }
  LevelStats s = summarise(l, values, cost_per_sample * samples);
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return s;
}

MlmcResult mlmc_estimate(const ModelSpec& m, const Functional& phi, const StateVector& u0, const MlmcPlan& plan,
                         const RunOptions& opts) {
  if (plan.samples.size() != static_cast<std::size_t>(plan.corrections) + 1)
    throw std::invalid_argument("plan has the wrong number of levels");
  MlmcResult res;
  res.plan = plan;
  for (int l = 0; l <= plan.corrections; ++l) {
    res.levels.push_back(mlmc_level(m, phi, u0, plan.base_level, l, plan.horizon, plan.samples[l], opts));
    const auto& s = res.levels.back();
    res.estimate += s.mean;
    res.variance_term += s.variance / static_cast<double>(s.samples);
  }
  // Bias from the finest correction; with two or more, the halved
  // next-to-finest one guards against an unluckily small last term.
  const double last = std::abs(res.levels.back().mean);
  res.bias_proxy = plan.corrections >= 2 ? std::max(last, 0.5 * std::abs(res.levels[plan.corrections - 1].mean)) : last;
  res.rmse_proxy = std::sqrt(res.variance_term + res.bias_proxy * res.bias_proxy);
  return res;
}

std::vector<LevelStats> level_variance_profile(const ModelSpec& m, const Functional& phi, const StateVector& u0,
                                               int base_level, int corrections, std::uint64_t probe_samples,
                                               double horizon, const RunOptions& opts) {
  if (corrections < 1) throw std::invalid_argument("need at least one correction level");
  std::vector<LevelStats> out;
  for (int l = 1; l <= corrections; ++l)
    out.push_back(mlmc_level(m, phi, u0, base_level, l, horizon, probe_samples, opts));
  return out;
}

Estimate plain_estimate(const ModelSpec& m, const Functional& phi, const StateVector& u0, int level, double horizon,
                        std::uint64_t samples, std::uint32_t level_tag, const RunOptions& opts) {
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  if (level_tag > kMaxLevelTag) throw std::invalid_argument("level tag out of range");
  require_compatible(u0, m.spectrum());
  const CoupledStepper stepper(m, std::ldexp(horizon, -level), {0}, opts.solver);
  std::vector<double> values(samples);
  for_each_index(samples, opts.execution, [&](std::size_t r) {
    std::vector<StateVector> s{u0};
    stepper.run(s, {opts.root_seed, r, level_tag}, std::uint64_t{1} << level);
    values[r] = phi(s[0]);
  });
  return estimate(values);
}

double zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta needs s > 1");
  return boost::math::zeta(s);
}

double mlmc_statistical_factor(double epsilon) { return std::sqrt(1.0 + zeta(1.0 + epsilon)); }

}  // namespace smx
