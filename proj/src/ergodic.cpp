#include "smx/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "smx/audit.hpp"
#include "smx/summation.hpp"

namespace smx {

namespace {

std::uint64_t steps_for(double time, double dt) {
  return static_cast<std::uint64_t>(std::llround(time / dt));
}

// Per-lane batch averages of phi over (burn_in, horizon], lanes at dt_ref 2^{depth}.
std::vector<std::vector<double>> batch_averages(const ModelSpec& m, const Functional& phi, const StateVector& u0,
                                                double dt_ref, const std::vector<int>& depths, double horizon,
                                                double burn_in, std::size_t batches, const RunOptions& opts) {
  if (!(burn_in >= 0.0) || !(burn_in < horizon)) throw std::invalid_argument("burn-in must lie in [0, horizon)");
  if (batches < 2) throw std::invalid_argument("need at least two batches");
  const CoupledStepper stepper(m, dt_ref, depths, opts.solver);
  const std::uint64_t stride = std::uint64_t{1} << stepper.max_depth();
  std::uint64_t total = steps_for(horizon, dt_ref);
  total = (total + stride - 1) / stride * stride;
  const std::uint64_t skip = steps_for(burn_in, dt_ref);
  const std::uint64_t len = (total - skip) / batches;
  if (len == 0) throw std::invalid_argument("horizon too short for the batch count");

  std::vector<std::vector<double>> sums(depths.size(), std::vector<double>(batches, 0.0));
  std::vector<std::vector<std::uint64_t>> counts(depths.size(), std::vector<std::uint64_t>(batches, 0));
  std::vector<StateVector> states(depths.size(), u0);
  stepper.run(states, {opts.root_seed, 0, 0}, total, [&](std::size_t lane, std::uint64_t k, const StateVector& u) {
    const std::uint64_t n = k << depths[lane];
    if (n <= skip) return;
    const std::uint64_t b = (n - skip - 1) / len;
    if (b >= batches) return;
    sums[lane][b] += phi(u);
    ++counts[lane][b];
  });
  for (std::size_t lane = 0; lane < depths.size(); ++lane)
    for (std::size_t b = 0; b < batches; ++b) {
      if (counts[lane][b] == 0) throw std::invalid_argument("a batch is shorter than the coarsest step");
      sums[lane][b] /= static_cast<double>(counts[lane][b]);
    }
  return sums;
}

}  // namespace

InvariantErrorReport invariant_measure_error(const ModelSpec& m, const Functional& phi, const StateVector& u0,
                                             const InvariantErrorOptions& o, const RunOptions& opts) {
  if (o.depths.empty()) throw std::invalid_argument("need at least one coarse step size");
  if (!(o.dt_ref > 0.0)) throw std::invalid_argument("reference step must be positive");
  std::vector<int> depths = o.depths;
  depths.push_back(0);
  const auto avg = batch_averages(m, phi, u0, o.dt_ref, depths, o.horizon, o.burn_in, o.batches, opts);
  const auto& ref = avg.back();

  InvariantErrorReport rep;
  rep.dt_ref = o.dt_ref;
  rep.reference_average = pairwise_sum(ref) / static_cast<double>(ref.size());
  for (std::size_t lane = 0; lane < o.depths.size(); ++lane) {
    InvariantErrorLane l;
    l.dt = std::ldexp(o.dt_ref, o.depths[lane]);
    l.time_average = pairwise_sum(avg[lane]) / static_cast<double>(avg[lane].size());
    std::vector<double> diff(o.batches);
    for (std::size_t b = 0; b < o.batches; ++b) diff[b] = avg[lane][b] - ref[b];
    l.difference = from_batches(std::move(diff), o.confidence);
    l.error = std::abs(l.difference.summary.mean);
    rep.lanes.push_back(std::move(l));
  }
  return rep;
}

BatchMeans invariant_mean(const ModelSpec& m, const Functional& f, const StateVector& u0, double dt, double horizon,
                          double burn_in, std::size_t batches, const RunOptions& opts) {
  auto avg = batch_averages(m, f, u0, dt, {0}, horizon, burn_in, batches, opts);
  return from_batches(std::move(avg.front()));
}

SllnReport slln_check(const ModelSpec& m, const Functional& f, const StateVector& u0, double dt,
                      std::span<const std::uint64_t> checkpoints, std::size_t replications,
                      const RunOptions& opts) {
  if (checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
  if (replications < 2) throw std::invalid_argument("need at least two replications");
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw std::invalid_argument("checkpoints must be positive and increasing");
  require_compatible(u0, m.spectrum());

  SllnReport rep;
  rep.dt = dt;
  rep.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  rep.averages.assign(checkpoints.size(), std::vector<double>(replications));
  const CoupledStepper stepper(m, dt, {0}, opts.solver);
  const std::uint64_t last = checkpoints.back();
  for_each_index(replications, opts.execution, [&](std::size_t r) {
    double sum = f(u0);
    std::size_t next = 0;
    if (checkpoints[0] == 1) rep.averages[next++][r] = sum;
    std::vector<StateVector> state{u0};
    stepper.run(state, {opts.root_seed, r, 0}, last - 1, [&](std::size_t, std::uint64_t k, const StateVector& u) {
      sum += f(u);
      if (next < checkpoints.size() && k + 1 == checkpoints[next])
        rep.averages[next++][r] = sum / static_cast<double>(k + 1);
    });
  });
  for (const auto& a : rep.averages) {
    const double pooled = estimate(a).mean;
    double spread = 0.0;
    for (double x : a) spread = std::max(spread, std::abs(x - pooled));
    rep.pooled_mean.push_back(pooled);
    rep.spread.push_back(spread);
  }
  rep.shrinking = true;
  for (std::size_t i = 1; i < rep.spread.size(); ++i)
    if (!(rep.spread[i] < rep.spread[i - 1])) rep.shrinking = false;
  return rep;
}

CltConstraint clt_constraint(const ModelSpec& m, const Functional& f, double lambda) {
  CltConstraint c;
  c.growth = f.growth_exponent();
  c.hoelder = f.hoelder_exponent();
  const double need = std::max(3.0, (1.0 + lambda) / lambda) * (c.growth + 3.0 * c.hoelder);
  c.min_q = static_cast<int>(std::ceil(need / 2.0));
  c.min_r = std::max(2, static_cast<int>(std::ceil(need)));
  if (c.min_r % 2) ++c.min_r;
  const auto a = audit(m, c.min_r, c.min_q);
  c.audit_holds = a.holds("exact_moments") && a.holds("numerical_moments");
  return c;
}

CltReport clt_statistic(const ModelSpec& m, const Functional& f, const StateVector& u0, double dt, double lambda,
                        std::size_t replications, double pi_hat, double v_hat, double burn_in,
                        const RunOptions& opts, double alpha) {
  const double upper = f.smooth_bounded() ? f.hoelder_exponent() : 0.5 * f.hoelder_exponent();
  if (!(lambda > 0.0 && lambda < upper)) throw std::invalid_argument("lambda outside the admissible range");
  if (replications < 2) throw std::invalid_argument("need at least two replications");
  if (!(burn_in >= 0.0)) throw std::invalid_argument("burn-in must be >= 0");
  require_compatible(u0, m.spectrum());

  CltReport rep;
  rep.dt = dt;
  rep.lambda = lambda;
  rep.k = clt_steps(dt, lambda);
  rep.pi_hat = pi_hat;
  rep.v_hat = v_hat;
  rep.alpha = alpha;
  rep.constraint = clt_constraint(m, f, lambda);
  rep.zeta.resize(replications);

  const std::uint64_t skip = steps_for(burn_in, dt);
  const std::uint64_t k = rep.k;
  const double scale = dt / std::sqrt(static_cast<double>(k) * dt);
  const CoupledStepper stepper(m, dt, {0}, opts.solver);
  for_each_index(replications, opts.execution, [&](std::size_t r) {
    double sum = skip == 0 ? f(u0) - pi_hat : 0.0;
    std::vector<StateVector> state{u0};
    stepper.run(state, {opts.root_seed, r, 0}, skip + k - 1, [&](std::size_t, std::uint64_t n, const StateVector& u) {
      if (n >= skip) sum += f(u) - pi_hat;
    });
    rep.zeta[r] = scale * sum;
  });

  rep.critical = ks_critical_value(replications, alpha);
  if (!(v_hat > 1e-300)) {
    rep.degenerate = true;
    rep.ks = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  for (double z : rep.zeta) rep.standardized.push_back(z / v_hat);
  rep.ks = ks_distance_normal(rep.standardized);
  return rep;
}

AsymptoticVariance estimate_asymptotic_variance(const ModelSpec& m, const Functional& f, const StateVector& u0,
                                                double dt, const AsymptoticVarianceOptions& o,
                                                const RunOptions& opts) {
  if (o.inner_paths < 2 || o.inner_paths % 2) throw std::invalid_argument("inner path count must be even and >= 2");
  if (o.outer_samples < 2) throw std::invalid_argument("need at least two outer samples");
  if (o.batches < kMinBatches) throw std::invalid_argument("need at least 20 batches");
  require_compatible(u0, m.spectrum());

  const std::uint64_t skip = steps_for(o.burn_in, dt);
  const std::uint64_t n = steps_for(o.horizon, dt);
  const std::uint64_t gap = n / o.outer_samples;
  if (gap == 0 || n / o.batches == 0) throw std::invalid_argument("horizon too short");

  // One long run: the series for batch means and the outer states for the formula.
  std::vector<double> series;
  series.reserve(n);
  std::vector<StateVector> outer;
  const CoupledStepper chain(m, dt, {0}, opts.solver);
  std::vector<StateVector> state{u0};
  chain.run(state, {opts.root_seed, 0, 0}, skip + n, [&](std::size_t, std::uint64_t k, const StateVector& u) {
    if (k <= skip) return;
    series.push_back(f(u));
    if ((k - skip) % gap == 0 && outer.size() < o.outer_samples) outer.push_back(u);
  });

  AsymptoticVariance out;
  out.invariant_mean = pairwise_sum(series) / static_cast<double>(series.size());
  {
    const auto bm = batch_means(series, o.batches);
    const double window = static_cast<double>(series.size() / o.batches) * dt;
    out.batch_means.mean = window * bm.summary.variance;
    out.batch_means.se = out.batch_means.mean * std::sqrt(2.0 / static_cast<double>(o.batches - 1));
    out.batch_means.n = o.batches;
  }

  const std::size_t coupled = m.coupled_modes();
  const std::size_t modes = m.modes();
  const auto q = m.covariance().eigenvalues();
  const std::uint64_t relax = std::max<std::uint64_t>(1, steps_for(o.relax_horizon, dt));
  const TangentStepper tangent(m, dt, opts.solver);
  StateVector unit_e(modes), unit_h(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    unit_e.e(j) = 1.0;
    unit_h.h(j) = 1.0;
  }

  // Every block of the linearisation acts on one mode only, so a tangent
  // started from all e-coordinates at once carries each mode's derivative
  // along e_j independently (likewise for h).
  std::vector<double> values(outer.size());
  const std::size_t half = o.inner_paths / 2;
  for_each_index(outer.size(), opts.execution, [&](std::size_t i) {
    // [half][direction][mode] of sum_k dt <grad f(u_k), eta_k>_mode
    std::vector<double> acc(2 * 2 * modes, 0.0);
    auto add = [&](std::size_t h, const StateVector& u, const std::vector<StateVector>& eta) {
      const StateVector g = f.gradient(u);
      for (std::size_t d = 0; d < 2; ++d) {
        double* a = &acc[(h * 2 + d) * modes];
        for (std::size_t j = 0; j < modes; ++j) a[j] += dt * (g.e(j) * eta[d].e(j) + g.h(j) * eta[d].h(j));
      }
    };
    for (std::size_t p = 0; p < o.inner_paths; ++p) {
      const std::size_t h = p < half ? 0 : 1;
      StateVector u = outer[i];
      std::vector<StateVector> eta{unit_e, unit_h};
      add(h, u, eta);
      tangent.run(u, eta, {opts.root_seed, i * o.inner_paths + p, 1}, relax - 1,
                  [&](std::uint64_t, const StateVector& s, const std::vector<StateVector>& t) { add(h, s, t); });
    }
    // The scheme injects S_dt B(u) dW rather than B(u) dW; using the same
    // loading keeps the estimate consistent with the discrete chain.
    StateVector loading(modes);
    for (std::size_t j = 0; j < coupled; ++j) std::tie(loading.e(j), loading.h(j)) = diffusion_stencil(outer[i], j, m);
    loading = resolvent_apply(loading, m.spectrum(), m.sigma0(), dt);
    // Product of two independent half-sample means is unbiased for the square.
    std::vector<double> terms(coupled);
    for (std::size_t j = 0; j < coupled; ++j) {
      const double se = loading.e(j), sh = loading.h(j);
      const double a = (se * acc[0 * modes + j] + sh * acc[1 * modes + j]) / static_cast<double>(half);
      const double b = (se * acc[2 * modes + j] + sh * acc[3 * modes + j]) / static_cast<double>(half);
      terms[j] = q[j] * a * b;
    }
    values[i] = pairwise_sum(terms);
  });
  out.formula = estimate(values);
  out.relative_gap = out.batch_means.mean > 0.0
                         ? std::abs(out.formula.mean - out.batch_means.mean) / out.batch_means.mean
                         : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace smx
