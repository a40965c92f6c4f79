#include "smx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smx {

namespace {

double power_q(double norm2, int q) {
  double r = 1.0;
  for (int i = 0; i < q; ++i) r *= norm2;
  return r;
}

// Column i of a replication-major matrix.
std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t i) {
  std::vector<double> c(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r][i];
  return c;
}

}  // namespace

MomentSeries moment_series(const ModelSpec& m, const StateVector& u0, double dt, std::uint64_t steps, int q,
                           std::size_t replications, std::uint64_t log_every, GraphOrder rho,
                           const RunOptions& opts, std::size_t batches) {
  if (q < 1) throw std::invalid_argument("moment order must be >= 1");
  if (replications == 0 || log_every == 0) throw std::invalid_argument("replications and log stride must be positive");
  require_compatible(u0, m.spectrum());

  MomentSeries s;
  s.q = q;
  s.norm_order = rho.value();
  s.dt = dt;
  for (std::uint64_t k = 0; k <= steps; k += log_every) {
    s.step.push_back(k);
    s.t.push_back(static_cast<double>(k) * dt);
  }
  const std::size_t n_log = s.step.size();
  const auto& spec = m.spectrum();
  const double initial = power_q(std::pow(graph_norm(u0, spec, rho), 2), q);

  const CoupledStepper stepper(m, dt, {0}, opts.solver);
  std::vector<std::vector<double>> values(replications, std::vector<double>(n_log, initial));
  for_each_index(replications, opts.execution, [&](std::size_t r) {
    std::vector<StateVector> state{u0};
    auto& row = values[r];
    stepper.run(state, {opts.root_seed, r, 0}, steps, [&](std::size_t, std::uint64_t k, const StateVector& u) {
      if (k % log_every == 0) row[k / log_every] = power_q(std::pow(graph_norm(u, spec, rho), 2), q);
    });
  });

  for (std::size_t i = 0; i < n_log; ++i) s.moment.push_back(estimate(column(values, i)));
  if (batches >= 2 && replications >= batches) {
    s.batch_moment.assign(batches, std::vector<double>(n_log));
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * replications / batches, hi = (b + 1) * replications / batches;
      for (std::size_t i = 0; i < n_log; ++i) {
        std::vector<double> c;
        for (std::size_t r = lo; r < hi; ++r) c.push_back(values[r][i]);
        s.batch_moment[b][i] = estimate(c).mean;
      }
    }
  }
  return s;
}

StabilitySlope stability_slope(std::span<const double> t, std::span<const double> values, double tail_fraction) {
  if (t.size() != values.size()) throw std::invalid_argument("time and value lists differ in length");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("tail fraction must be in (0, 1]");
  StabilitySlope out;
  std::size_t end = values.size();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0)) {
      end = i;
      out.truncated = true;
      break;
    }
  const auto start = static_cast<std::size_t>(std::floor(static_cast<double>(end) * (1.0 - tail_fraction)));
  if (end < start + 2) throw std::invalid_argument("fewer than two positive points in the tail");
  std::vector<double> x(t.begin() + static_cast<std::ptrdiff_t>(start), t.begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<double> y;
  for (std::size_t i = start; i < end; ++i) y.push_back(std::log(values[i]));
  out.slope = least_squares(x, y).slope;
  out.points = x.size();
  return out;
}

StabilitySlope stability_slope(const MomentSeries& series, double tail_fraction) {
  std::vector<double> means;
  for (const auto& e : series.moment) means.push_back(e.mean);
  StabilitySlope out = stability_slope(series.t, means, tail_fraction);
  if (series.batch_moment.size() >= 2) {
    // Same window for every batch so the spread reflects sampling only.
    std::size_t end = 0;
    while (end < means.size() && means[end] > 0.0) ++end;
    std::vector<double> slopes;
    for (const auto& b : series.batch_moment) {
      const auto sub = stability_slope(std::span(series.t).first(end), std::span(b).first(end), tail_fraction);
      if (sub.truncated) out.truncated = true;
      slopes.push_back(sub.slope);
    }
    out.se = estimate(slopes).se;
  }
  return out;
}

namespace {

struct LevelLanes {
  std::vector<int> all;  // levels followed by the reference
  std::size_t ref_lane;
};

LevelLanes lanes_for(std::span<const int> levels, int level_ref) {
  if (levels.empty()) throw std::invalid_argument("need at least one level");
  for (int l : levels)
    if (l < 0 || l > level_ref) throw std::invalid_argument("levels must lie in [0, level_ref]");
  LevelLanes lanes{{levels.begin(), levels.end()}, levels.size()};
  lanes.all.push_back(level_ref);
  return lanes;
}

ConvergenceStudy study_skeleton(std::span<const int> levels, int level_ref, double T, std::size_t replications) {
  if (replications < 2) throw std::invalid_argument("need at least two replications");
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
  ConvergenceStudy st;
  st.levels.assign(levels.begin(), levels.end());
  st.level_ref = level_ref;
  st.horizon = T;
  st.replications = replications;
  const int finest = *std::max_element(levels.begin(), levels.end());
  if (level_ref <= finest + 2) st.flags.push_back("reference level is within two levels of the finest level");
  for (int l : levels) st.dt.push_back(std::ldexp(T, -l));
  return st;
}

// Final states of every lane for every replication: [lane][replication].
std::vector<std::vector<StateVector>> final_states(const ModelSpec& m, const StateVector& u0, const LevelLanes& lanes,
                                                   double T, std::size_t replications, const RunOptions& opts) {
  require_compatible(u0, m.spectrum());
  const auto stepper = CoupledStepper::for_levels(m, T, lanes.all, opts.solver);
  const std::uint64_t fine_steps = std::uint64_t{1} << *std::max_element(lanes.all.begin(), lanes.all.end());
  std::vector<std::vector<StateVector>> out(lanes.all.size(), std::vector<StateVector>(replications));
  for_each_index(replications, opts.execution, [&](std::size_t r) {
    std::vector<StateVector> states(lanes.all.size(), u0);
    stepper.run(states, {opts.root_seed, r, 0}, fine_steps);
    for (std::size_t lane = 0; lane < states.size(); ++lane) out[lane][r] = std::move(states[lane]);
  });
  return out;
}

void fit_if_possible(ConvergenceStudy& st) {
  std::vector<double> dt, err;
  for (std::size_t i = 0; i < st.error.size(); ++i)
    if (st.in_fit[i]) {
      dt.push_back(st.dt[i]);
      err.push_back(st.error[i]);
    }
  if (dt.size() >= 3)
    st.fit = fit_order(dt, err);
  else
    st.flags.push_back("fewer than three usable levels; no order fit");
}

}  // namespace

ConvergenceStudy strong_error(const ModelSpec& m, const StateVector& u0, std::span<const int> levels, int level_ref,
                              double T, std::size_t replications, const RunOptions& opts) {
  const auto lanes = lanes_for(levels, level_ref);
  ConvergenceStudy st = study_skeleton(levels, level_ref, T, replications);
  const auto finals = final_states(m, u0, lanes, T, replications, opts);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<double> d(replications);
    for (std::size_t r = 0; r < replications; ++r) d[r] = norm_squared(finals[lanes.ref_lane][r] - finals[i][r]);
    const Estimate e = estimate(d);
    st.samples.push_back(e);
    const double err = std::sqrt(e.mean);
    st.error.push_back(err);
    st.error_se.push_back(err > 0.0 ? e.se / (2.0 * err) : 0.0);
    st.in_fit.push_back(err > 0.0);
    if (!(err > 0.0)) st.flags.push_back("level " + std::to_string(levels[i]) + " has zero error; excluded from fit");
  }
  fit_if_possible(st);
  return st;
}

ConvergenceStudy weak_error(const ModelSpec& m, const StateVector& u0, const Functional& phi,
                            std::span<const int> levels, int level_ref, double T, std::size_t replications,
                            const RunOptions& opts) {
  const auto lanes = lanes_for(levels, level_ref);
  ConvergenceStudy st = study_skeleton(levels, level_ref, T, replications);
  const auto finals = final_states(m, u0, lanes, T, replications, opts);
  std::vector<double> ref(replications);
  for (std::size_t r = 0; r < replications; ++r) ref[r] = phi(finals[lanes.ref_lane][r]);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<double> d(replications);
    for (std::size_t r = 0; r < replications; ++r) d[r] = phi(finals[i][r]) - ref[r];
    const Estimate e = estimate(d);
    st.samples.push_back(e);
    st.error.push_back(std::abs(e.mean));
    st.error_se.push_back(e.se);
    // A level whose error is not resolved above two standard errors only adds noise to the fit.
    const bool resolved = std::abs(e.mean) > 2.0 * e.se;
    st.in_fit.push_back(resolved && e.mean != 0.0);
    if (e.mean == 0.0)
      st.flags.push_back("level " + std::to_string(levels[i]) + " has zero error; excluded from fit");
    else if (!resolved)
      st.flags.push_back("level " + std::to_string(levels[i]) + " is below the Monte Carlo noise floor; excluded from fit");
  }
  fit_if_possible(st);
  return st;
}

ContractionSeries contraction_series(const ModelSpec& m, const StateVector& u0, const StateVector& v0, double dt,
                                     std::uint64_t steps, std::size_t replications, std::uint64_t log_every,
                                     const RunOptions& opts) {
  if (replications == 0 || log_every == 0) throw std::invalid_argument("replications and log stride must be positive");
  require_compatible(u0, m.spectrum());
  require_compatible(v0, u0);
  ContractionSeries s;
  s.dt = dt;
  s.initial = norm_squared(u0 - v0);
  const std::size_t n_log = static_cast<std::size_t>(steps / log_every) + 1;
  for (std::size_t i = 0; i < n_log; ++i) s.t.push_back(static_cast<double>(i * log_every) * dt);

  const CoupledStepper stepper(m, dt, {0, 0}, opts.solver);
  std::vector<std::vector<double>> values(replications, std::vector<double>(n_log, s.initial));
  for_each_index(replications, opts.execution, [&](std::size_t r) {
    std::vector<StateVector> states{u0, v0};
    auto& row = values[r];
    stepper.run(states, {opts.root_seed, r, 0}, steps, [&](std::size_t lane, std::uint64_t k, const StateVector&) {
      if (lane == 1 && k % log_every == 0) row[k / log_every] = norm_squared(states[0] - states[1]);
    });
  });
  for (std::size_t i = 0; i < n_log; ++i) s.distance.push_back(estimate(column(values, i)));
  return s;
}

TangentMoment tangent_moment(const ModelSpec& m, const StateVector& u0, const StateVector& h, double dt,
                             std::uint64_t steps, std::size_t replications, const RunOptions& opts) {
  if (replications < 2) throw std::invalid_argument("need at least two replications");
  require_compatible(u0, m.spectrum());
  require_compatible(h, u0);
  const TangentStepper stepper(m, dt, opts.solver);
  std::vector<double> values(replications);
  for_each_index(replications, opts.execution, [&](std::size_t r) {
    StateVector u = u0;
    std::vector<StateVector> eta{h};
    stepper.run(u, eta, {opts.root_seed, r, 0}, steps);
    values[r] = norm_squared(eta[0]);
  });
  return {dt, dt * static_cast<double>(steps), norm_squared(h), estimate(values)};
}

}  // namespace smx
