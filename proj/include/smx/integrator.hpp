#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smx/model.hpp"
#include "smx/noise.hpp"

namespace smx {

struct SolverOptions {
  double fp_tol = 1e-12;
  int fp_max_iter = 64;
};

struct SchemeParams {
  double dt = 0.0;
  std::size_t steps = 0;
  double fp_tol = 1e-12;
  int fp_max_iter = 64;

  SolverOptions solver() const { return {fp_tol, fp_max_iter}; }
  // dt = T 2^{-level}, steps = 2^level.
  static SchemeParams for_level(double T, int level, SolverOptions opts = {});
};

/// The fixed-point solve did not reach the tolerance.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// dt ||DF|| / (1 + sigma0 dt) >= 1: the implicit drift solve is not a contraction.
class GuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
};

// Contraction factor of the fixed-point map; must be < 1.
double contraction_factor(const ModelSpec& m, double dt);

/// Semi-implicit Euler step for one step size. Immutable after construction
/// and safe to share between threads; each caller supplies its own Workspace.
class Stepper {
 public:
  struct Workspace {
    std::vector<double> xi;
    std::vector<double> scratch;
  };

  Stepper(const ModelSpec& m, double dt, SolverOptions opts = {});

  const ModelSpec& model() const noexcept { return model_; }
  double dt() const noexcept { return dt_; }
  const SolverOptions& options() const noexcept { return opts_; }
  Workspace workspace() const;

  // u <- u_{k+1} given the Brownian increment dW (length K, not yet scaled).
  StepStats advance(StateVector& u, std::span<const double> brownian, Workspace& ws) const;
  // Same, with the increment already multiplied by Q^{1/2}.
  StepStats advance_scaled(StateVector& u, std::span<const double> scaled, Workspace& ws) const;

  // eta <- eta_{k+1} along the step u_k -> u_next, same increment as that step.
  StepStats advance_tangent(StateVector& eta, const StateVector& u_k, const StateVector& u_next,
                            std::span<const double> brownian, Workspace& ws) const;

 private:
  void load_scaled(std::span<const double> scaled, Workspace& ws) const;
  void load_brownian(std::span<const double> brownian, Workspace& ws) const;
  StepStats run(StateVector& u, Workspace& ws) const;
  StepStats run_tangent(StateVector& eta, const StateVector& u_k, const StateVector& u_next, Workspace& ws) const;

  ModelSpec model_;
  double dt_;
  SolverOptions opts_;
  std::vector<double> diag_, off_;
};

// One step with a Q^{1/2}-scaled increment.
StateVector step(const StateVector& u_k, std::span<const double> scaled_increment, const ModelSpec& m,
                 const SchemeParams& p);

struct Trajectory {
  std::vector<StateVector> states;
  SchemeParams params;
  SeedSpec seed;
  int level = 0;
};

Trajectory integrate(const StateVector& u0, const NoisePath& path, int level, const ModelSpec& m,
                     const SchemeParams& p);
Trajectory integrate_tangent(const Trajectory& u_traj, const StateVector& h, const NoisePath& path,
                             const ModelSpec& m, const SchemeParams& p);
std::pair<Trajectory, Trajectory> integrate_coupled(const StateVector& u0, const StateVector& u0_tilde,
                                                    const NoisePath& path, int level, const ModelSpec& m,
                                                    const SchemeParams& p);

// Columns t,mode,e,h; one row per mode per stored state.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Several lanes with step sizes fine_dt 2^{depth} driven by one Brownian
/// path generated on the fly. Lanes may share a depth (e.g. two initial data
/// under the same noise).
class CoupledStepper {
 public:
  // Called after every lane step with the lane, its step count so far and its state.
  using Observer = std::function<void(std::size_t lane, std::uint64_t step, const StateVector& state)>;

  CoupledStepper(const ModelSpec& m, double fine_dt, std::vector<int> depths, SolverOptions opts = {});

  // Lanes at levels of [0, T]: depth = finest - level, finest = max(levels).
  static CoupledStepper for_levels(const ModelSpec& m, double T, std::span<const int> levels, SolverOptions opts = {});

  std::size_t lanes() const noexcept { return depths_.size(); }
  int depth(std::size_t lane) const { return depths_.at(lane); }
  int max_depth() const noexcept { return max_depth_; }
  double dt(std::size_t lane) const;
  double fine_dt() const noexcept { return fine_dt_; }

  // fine_steps must be a multiple of 2^{max depth}.
  void run(std::vector<StateVector>& states, const SeedSpec& seed, std::uint64_t fine_steps,
           const Observer& observer = {}) const;

 private:
  ModelSpec model_;
  double fine_dt_;
  std::vector<int> depths_;
  int max_depth_ = 0;
  std::vector<Stepper> steppers_;  // one per distinct depth
  std::vector<std::size_t> stepper_of_lane_;
};

/// State plus first variations along several directions, one step size.
class TangentStepper {
 public:
  using Observer = std::function<void(std::uint64_t step, const StateVector& state,
                                      const std::vector<StateVector>& tangents)>;

  TangentStepper(const ModelSpec& m, double dt, SolverOptions opts = {});
  const Stepper& stepper() const noexcept { return stepper_; }

  void run(StateVector& state, std::vector<StateVector>& tangents, const SeedSpec& seed, std::uint64_t steps,
           const Observer& observer = {}) const;

 private:
  Stepper stepper_;
};

}  // namespace smx
