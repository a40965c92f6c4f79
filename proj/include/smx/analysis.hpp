#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smx/functional.hpp"
#include "smx/integrator.hpp"
#include "smx/parallel.hpp"
#include "smx/statistics.hpp"

namespace smx {

struct RunOptions {
  std::uint64_t root_seed = 0;
  Execution execution = Execution::parallel;
  SolverOptions solver{};
};

/// Sample E|u_k|^{2q} in the D(M^rho) norm at every logged step. Replications
/// are also grouped into contiguous batches so that derived quantities (e.g.
/// a decay slope) can be given a standard error.
struct MomentSeries {
  int q = 1;
  int norm_order = 0;
  double dt = 0.0;
  std::vector<std::uint64_t> step;
  std::vector<double> t;
  std::vector<Estimate> moment;
  std::vector<std::vector<double>> batch_moment;  // [batch][log index]
};

MomentSeries moment_series(const ModelSpec& m, const StateVector& u0, double dt, std::uint64_t steps, int q,
                           std::size_t replications, std::uint64_t log_every, GraphOrder rho,
                           const RunOptions& opts = {}, std::size_t batches = kMinBatches);

struct StabilitySlope {
  double slope = 0.0;
  double se = 0.0;  // spread of the per-batch slopes; 0 without batches
  std::size_t points = 0;
  bool truncated = false;  // series reached zero and was cut there
};

// Least-squares slope of log E|u_k|^2 against t_k over the trailing
// `tail_fraction` of the series.
StabilitySlope stability_slope(const MomentSeries& series, double tail_fraction = 0.5);
StabilitySlope stability_slope(std::span<const double> t, std::span<const double> values,
                               double tail_fraction = 0.5);

/// Errors of several levels against a finer reference level, all driven by
/// the same Brownian path within a replication.
struct ConvergenceStudy {
  std::vector<int> levels;
  int level_ref = 0;
  double horizon = 0.0;
  std::size_t replications = 0;
  std::vector<double> dt;
  std::vector<Estimate> samples;  // strong: |u_ref - u_l|^2; weak: phi(u_l) - phi(u_ref)
  std::vector<double> error;
  std::vector<double> error_se;
  std::vector<bool> in_fit;
  std::vector<std::string> flags;
  std::optional<OrderFit> fit;
};

ConvergenceStudy strong_error(const ModelSpec& m, const StateVector& u0, std::span<const int> levels, int level_ref,
                              double T, std::size_t replications, const RunOptions& opts = {});

ConvergenceStudy weak_error(const ModelSpec& m, const StateVector& u0, const Functional& phi,
                            std::span<const int> levels, int level_ref, double T, std::size_t replications,
                            const RunOptions& opts = {});

/// Sample E|u_k - v_k|^2 for two solutions from different initial data under
/// the same noise.
struct ContractionSeries {
  double dt = 0.0;
  double initial = 0.0;  // |u0 - v0|^2
  std::vector<double> t;
  std::vector<Estimate> distance;
};

ContractionSeries contraction_series(const ModelSpec& m, const StateVector& u0, const StateVector& v0, double dt,
                                     std::uint64_t steps, std::size_t replications, std::uint64_t log_every,
                                     const RunOptions& opts = {});

/// Sample E|eta_N|^2 for the first variation in direction h.
struct TangentMoment {
  double dt = 0.0;
  double horizon = 0.0;
  double initial = 0.0;  // |h|^2
  Estimate norm2;
};

TangentMoment tangent_moment(const ModelSpec& m, const StateVector& u0, const StateVector& h, double dt,
                             std::uint64_t steps, std::size_t replications, const RunOptions& opts = {});

}  // namespace smx
