#include "smx/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "kernels/kernels.hpp"

namespace smx {

SchemeParams SchemeParams::for_level(double T, int level, SolverOptions opts) {
  if (level < 0) throw std::invalid_argument("level must be >= 0");
  return {std::ldexp(T, -level), std::size_t{1} << level, opts.fp_tol, opts.fp_max_iter};
}

double contraction_factor(const ModelSpec& m, double dt) {
  return dt * m.drift_constants().d1 / (1.0 + m.sigma0() * dt);
}

namespace {

kernels::Drift kernel_drift(DriftFamily f) {
  switch (f) {
    case DriftFamily::zero: return kernels::Drift::zero;
    case DriftFamily::linear_damp: return kernels::Drift::linear;
    case DriftFamily::bounded_smooth: return kernels::Drift::tanh;
  }
  return kernels::Drift::zero;
}

kernels::Noise kernel_noise(DiffusionFamily f) {
  switch (f) {
    case DiffusionFamily::zero: return kernels::Noise::zero;
    case DiffusionFamily::additive: return kernels::Noise::additive;
    case DiffusionFamily::multiplicative_bounded: return kernels::Noise::sine;
  }
  return kernels::Noise::zero;
}

void require_finite(const StateVector& u, const StepStats& s) {
  if (!u.all_finite()) throw StepError("state became non-finite", s.iterations, s.residual);
}

}  // namespace

Stepper::Stepper(const ModelSpec& m, double dt, SolverOptions opts) : model_(m), dt_(dt), opts_(opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step size must be positive");
  if (!(opts.fp_tol > 0.0)) throw std::invalid_argument("fixed-point tolerance must be positive");
  if (opts.fp_max_iter < 1) throw std::invalid_argument("fixed-point iteration cap must be >= 1");
  const double kappa = contraction_factor(m, dt);
  if (!(kappa < 1.0))
    throw GuardError("dt ||DF|| / (1 + sigma0 dt) = " + std::to_string(kappa) + " >= 1; reduce dt");
  const std::size_t J = m.modes();
  diag_.resize(J);
  off_.resize(J);
  const double a = 1.0 + m.sigma0() * dt;
  for (std::size_t j = 0; j < J; ++j) {
    const double b = m.spectrum()[j] * dt;
    const double det = a * a + b * b;
    diag_[j] = a / det;
    off_[j] = b / det;
  }
}

Stepper::Workspace Stepper::workspace() const {
  return {std::vector<double>(model_.modes(), 0.0), std::vector<double>(4 * model_.modes(), 0.0)};
}

void Stepper::load_scaled(std::span<const double> scaled, Workspace& ws) const {
  if (scaled.size() != model_.noise_modes()) throw DimensionError("increment length differs from noise mode count");
  ws.xi.assign(model_.modes(), 0.0);
  std::copy_n(scaled.begin(), model_.coupled_modes(), ws.xi.begin());
}

void Stepper::load_brownian(std::span<const double> brownian, Workspace& ws) const {
  if (brownian.size() != model_.noise_modes()) throw DimensionError("increment length differs from noise mode count");
  const auto s = model_.covariance().sqrt_eigenvalues();
  ws.xi.resize(model_.modes());
  const std::size_t n = model_.coupled_modes();
  for (std::size_t j = 0; j < n; ++j) ws.xi[j] = s[j] * brownian[j];
  for (std::size_t j = n; j < ws.xi.size(); ++j) ws.xi[j] = 0.0;
}

StepStats Stepper::run(StateVector& u, Workspace& ws) const {
  require_compatible(u, model_.spectrum());
  ws.scratch.resize(4 * model_.modes());
  const kernels::StepCoefficients c{model_.modes(),
                                    diag_.data(),
                                    off_.data(),
                                    dt_,
                                    kernel_drift(model_.drift().family),
                                    model_.drift().amplitude,
                                    kernel_noise(model_.diffusion().family),
                                    model_.diffusion().amplitude,
                                    opts_.fp_tol,
                                    opts_.fp_max_iter};
  const auto conv =
      kernels::semi_implicit_step(c, u.e_values().data(), u.h_values().data(), ws.xi.data(), ws.scratch.data());
  const StepStats s{conv.iterations, conv.residual};
  if (conv.iterations > opts_.fp_max_iter)
    throw StepError("fixed-point solve did not converge in " + std::to_string(opts_.fp_max_iter) +
                        " iterations (residual " + std::to_string(conv.residual) + ")",
                    opts_.fp_max_iter, conv.residual);
  require_finite(u, s);
  return s;
}

StepStats Stepper::run_tangent(StateVector& eta, const StateVector& u_k, const StateVector& u_next,
                               Workspace& ws) const {
  require_compatible(eta, model_.spectrum());
  require_compatible(u_k, eta);
  require_compatible(u_next, eta);
  ws.scratch.resize(4 * model_.modes());
  const kernels::StepCoefficients c{model_.modes(),
                                    diag_.data(),
                                    off_.data(),
                                    dt_,
                                    kernel_drift(model_.drift().family),
                                    model_.drift().amplitude,
                                    kernel_noise(model_.diffusion().family),
                                    model_.diffusion().amplitude,
                                    opts_.fp_tol,
                                    opts_.fp_max_iter};
  const auto conv = kernels::tangent_step(c, u_k.e_values().data(), u_k.h_values().data(), u_next.e_values().data(),
                                          u_next.h_values().data(), eta.e_values().data(), eta.h_values().data(),
                                          ws.xi.data(), ws.scratch.data());
  const StepStats s{conv.iterations, conv.residual};
  if (conv.iterations > opts_.fp_max_iter)
    throw StepError("tangent fixed-point solve did not converge", opts_.fp_max_iter, conv.residual);
  require_finite(eta, s);
  return s;
}

StepStats Stepper::advance(StateVector& u, std::span<const double> brownian, Workspace& ws) const {
  load_brownian(brownian, ws);
  return run(u, ws);
}

StepStats Stepper::advance_scaled(StateVector& u, std::span<const double> scaled, Workspace& ws) const {
  load_scaled(scaled, ws);
  return run(u, ws);
}

StepStats Stepper::advance_tangent(StateVector& eta, const StateVector& u_k, const StateVector& u_next,
                                   std::span<const double> brownian, Workspace& ws) const {
  load_brownian(brownian, ws);
  return run_tangent(eta, u_k, u_next, ws);
}

StateVector step(const StateVector& u_k, std::span<const double> scaled_increment, const ModelSpec& m,
                 const SchemeParams& p) {
  const Stepper stepper(m, p.dt, p.solver());
  auto ws = stepper.workspace();
  StateVector u = u_k;
  stepper.advance_scaled(u, scaled_increment, ws);
  return u;
}

namespace {

void check_level(const NoisePath& path, int level, const ModelSpec& m, const SchemeParams& p) {
  if (path.noise_modes() != m.noise_modes()) throw DimensionError("noise path and model disagree on K");
  if (p.steps != path.steps(level)) throw std::invalid_argument("step count differs from the path level");
  const double dt = path.step_size(level);
  if (std::abs(p.dt - dt) > 1e-12 * dt) throw std::invalid_argument("step size differs from the path level");
}

}  // namespace

Trajectory integrate(const StateVector& u0, const NoisePath& path, int level, const ModelSpec& m,
                     const SchemeParams& p) {
  check_level(path, level, m, p);
  require_compatible(u0, m.spectrum());
  const Stepper stepper(m, p.dt, p.solver());
  auto ws = stepper.workspace();
  Trajectory traj{{}, p, path.seed(), level};
  traj.states.reserve(p.steps + 1);
  traj.states.push_back(u0);
  StateVector u = u0;
  for (std::size_t k = 0; k < p.steps; ++k) {
    stepper.advance(u, path.increment(level, k), ws);
    traj.states.push_back(u);
  }
  return traj;
}

Trajectory integrate_tangent(const Trajectory& u_traj, const StateVector& h, const NoisePath& path,
                             const ModelSpec& m, const SchemeParams& p) {
  check_level(path, u_traj.level, m, p);
  if (u_traj.states.size() != p.steps + 1) throw std::invalid_argument("trajectory length differs from step count");
  require_compatible(h, m.spectrum());
  const Stepper stepper(m, p.dt, p.solver());
  auto ws = stepper.workspace();
  Trajectory eta{{}, p, path.seed(), u_traj.level};
  eta.states.reserve(p.steps + 1);
  eta.states.push_back(h);
  StateVector v = h;
  for (std::size_t k = 0; k < p.steps; ++k) {
    stepper.advance_tangent(v, u_traj.states[k], u_traj.states[k + 1], path.increment(u_traj.level, k), ws);
    eta.states.push_back(v);
  }
  return eta;
}

std::pair<Trajectory, Trajectory> integrate_coupled(const StateVector& u0, const StateVector& u0_tilde,
                                                    const NoisePath& path, int level, const ModelSpec& m,
                                                    const SchemeParams& p) {
  return {integrate(u0, path, level, m, p), integrate(u0_tilde, path, level, m, p)};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,mode,e,h\n";
  char buf[128];
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = static_cast<double>(k) * traj.params.dt;
    const auto& u = traj.states[k];
    for (std::size_t j = 0; j < u.modes(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", t, j, u.e(j), u.h(j));
      out << buf;
    }
  }
}

CoupledStepper::CoupledStepper(const ModelSpec& m, double fine_dt, std::vector<int> depths, SolverOptions opts)
    : model_(m), fine_dt_(fine_dt), depths_(std::move(depths)) {
  if (depths_.empty()) throw std::invalid_argument("coupled stepper needs at least one lane");
  std::vector<int> distinct;
  for (int d : depths_) {
    if (d < 0 || d > 40) throw std::invalid_argument("lane depth out of range");
    if (std::find(distinct.begin(), distinct.end(), d) == distinct.end()) distinct.push_back(d);
  }
  max_depth_ = *std::max_element(depths_.begin(), depths_.end());
  for (int d : distinct) steppers_.emplace_back(m, std::ldexp(fine_dt, d), opts);
  for (int d : depths_)
    stepper_of_lane_.push_back(
        static_cast<std::size_t>(std::find(distinct.begin(), distinct.end(), d) - distinct.begin()));
}

CoupledStepper CoupledStepper::for_levels(const ModelSpec& m, double T, std::span<const int> levels,
                                          SolverOptions opts) {
  if (levels.empty()) throw std::invalid_argument("need at least one level");
  const int finest = *std::max_element(levels.begin(), levels.end());
  std::vector<int> depths;
  for (int l : levels) {
    if (l < 0) throw std::invalid_argument("levels must be >= 0");
    depths.push_back(finest - l);
  }
  return CoupledStepper(m, std::ldexp(T, -finest), std::move(depths), opts);
}

double CoupledStepper::dt(std::size_t lane) const { return std::ldexp(fine_dt_, depths_.at(lane)); }

void CoupledStepper::run(std::vector<StateVector>& states, const SeedSpec& seed, std::uint64_t fine_steps,
                         const Observer& observer) const {
  if (states.size() != lanes()) throw std::invalid_argument("one state per lane required");
  if (fine_steps % (std::uint64_t{1} << max_depth_) != 0)
    throw std::invalid_argument("fine step count must be a multiple of the coarsest lane's stride");
  for (const auto& u : states) require_compatible(u, model_.spectrum());

  DyadicIncrementStream stream(seed, fine_dt_, model_.noise_modes(), max_depth_);
  std::vector<Stepper::Workspace> ws;
  for (const auto& s : steppers_) ws.push_back(s.workspace());
  std::vector<std::uint64_t> count(lanes(), 0);

  for (std::uint64_t n = 0; n < fine_steps; ++n) {
    stream.advance([&](int d, std::uint64_t, std::span<const double> inc) {
      for (std::size_t lane = 0; lane < lanes(); ++lane) {
        if (depths_[lane] != d) continue;
        const std::size_t s = stepper_of_lane_[lane];
        steppers_[s].advance(states[lane], inc, ws[s]);
        ++count[lane];
        if (observer) observer(lane, count[lane], states[lane]);
      }
    });
  }
}

TangentStepper::TangentStepper(const ModelSpec& m, double dt, SolverOptions opts) : stepper_(m, dt, opts) {}

void TangentStepper::run(StateVector& state, std::vector<StateVector>& tangents, const SeedSpec& seed,
                         std::uint64_t steps, const Observer& observer) const {
  const auto& m = stepper_.model();
  require_compatible(state, m.spectrum());
  for (const auto& t : tangents) require_compatible(t, m.spectrum());
  DyadicIncrementStream stream(seed, stepper_.dt(), m.noise_modes(), 0);
  auto ws = stepper_.workspace();
  StateVector previous = state;
  for (std::uint64_t k = 0; k < steps; ++k) {
    stream.advance([&](int, std::uint64_t, std::span<const double> inc) {
      previous = state;
      stepper_.advance(state, inc, ws);
      for (auto& t : tangents) stepper_.advance_tangent(t, previous, state, inc, ws);
    });
    if (observer) observer(k + 1, state, tangents);
  }
}

}  // namespace smx
