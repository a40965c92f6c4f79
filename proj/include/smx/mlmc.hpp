#pragma once

#include <cstdint>
#include <vector>

#include "smx/analysis.hpp"

namespace smx {

/// Sample counts M_0 = 2^{2 L0 + 2 L}, M_l = ceil(2^{L0 + 2L - l} l^{1 + eps}),
/// level l using T 2^{-(L0 + l)}.
struct MlmcPlan {
  int base_level = 0;  // L0
  int corrections = 1; // L
  double epsilon = 0.5;
  double horizon = 1.0;
  std::vector<std::uint64_t> samples;  // M_0..M_L

  int finest_level() const noexcept { return base_level + corrections; }
};

MlmcPlan sample_schedule(int base_level, int corrections, double epsilon, double horizon = 1.0);

struct LevelStats {
  int level = 0;  // 0..L; level 0 is phi itself, l >= 1 the fine-minus-coarse difference
  std::uint64_t samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  std::uint64_t cost = 0;  // time steps over all samples (both lanes for corrections)
  double wall_seconds = 0.0;
};

struct MlmcResult {
  MlmcPlan plan;
  double estimate = 0.0;
  double variance_term = 0.0;  // sum_l var_l / M_l
  double bias_proxy = 0.0;
  double rmse_proxy = 0.0;
  std::vector<LevelStats> levels;
};

MlmcResult mlmc_estimate(const ModelSpec& m, const Functional& phi, const StateVector& u0, const MlmcPlan& plan,
                         const RunOptions& opts = {});

// Statistics of one MLMC level with an explicit sample count; level_tag keys the streams.
LevelStats mlmc_level(const ModelSpec& m, const Functional& phi, const StateVector& u0, int base_level, int l,
                      double horizon, std::uint64_t samples, const RunOptions& opts = {});

// Coupled-difference statistics for l = 1..L at a fixed probe sample count.
std::vector<LevelStats> level_variance_profile(const ModelSpec& m, const Functional& phi, const StateVector& u0,
                                               int base_level, int corrections, std::uint64_t probe_samples,
                                               double horizon = 1.0, const RunOptions& opts = {});

// Plain Monte Carlo E[phi(u_T)] at a single level.
Estimate plain_estimate(const ModelSpec& m, const Functional& phi, const StateVector& u0, int level, double horizon,
                        std::uint64_t samples, std::uint32_t level_tag, const RunOptions& opts = {});

// zeta(s) for s > 1.
double zeta(double s);

// (1 + zeta(1 + eps))^{1/2}, the statistical part of the error constant.
double mlmc_statistical_factor(double epsilon);

}  // namespace smx
