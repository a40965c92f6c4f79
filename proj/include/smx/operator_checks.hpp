#pragma once

#include <string>
#include <vector>

#include "smx/spectral.hpp"

namespace smx {

// 1/(1 + 2 sigma0 dt) <= e^{-g sigma0 dt} with g in (0, 2) (squared resolvent),
// or 1/(1 + sigma0 dt) <= e^{-g sigma0 dt} with g in (0, 1) (resolvent).
enum class ThresholdKind { squared_resolvent, resolvent };

struct DtThreshold {
  double value = 0.0;
  bool capped = false;  // inequality still held at the cap
  double residual = 0.0;
};

DtThreshold compute_dt_threshold(double sigma0, double g, ThresholdKind kind = ThresholdKind::squared_resolvent,
                                 double cap = 1e6);

struct BoundPoint {
  double dt = 0.0;
  long k = 0;
  int order = 0;  // graph order of the domain space
  double t = 0.0;
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - observed
};

struct BoundReport {
  std::string id;
  double sigma0 = 0.0;
  double g = 0.0;
  double dt_threshold = 0.0;
  double constant = 0.0;          // the C used in the bound
  double fitted_constant = 0.0;   // smallest C valid on the fitting grid
  double worst_margin = 0.0;
  bool pass = false;
  std::vector<double> skipped_dt;  // grid entries above the admissible threshold
  std::vector<BoundPoint> points;
};

// |S_dt^k|_{L(D(M^i))} <= e^{-(g/2) k sigma0 dt} for dt below the threshold,
// k = 0..k_max and i = 0, 1, 2.
BoundReport verify_resolvent_decay(const ModeSpectrum& spec, double sigma0, double g, const std::vector<double>& dt_grid,
                                   long k_max);

// |S(t) - I|_{L(D(M); H)} <= (sigma0 + 1) t on the grid; also reports the smallest valid C.
BoundReport verify_semigroup_lipschitz(const ModeSpectrum& spec, double sigma0, const std::vector<double>& t_grid);

// |S_dt^k - S(t)|_{L(D(M^2); H)} <= C dt e^{-(g~/2) k sigma0 dt} for t in {t_k, t_k +- dt/2};
// C is the smallest constant valid on fit_grid and is then frozen for check_grid.
BoundReport verify_resolvent_semigroup_error(const ModeSpectrum& spec, double sigma0, double g_tilde,
                                             const std::vector<double>& fit_grid,
                                             const std::vector<double>& check_grid, long k_max);

// Largest per-mode D(M^2) -> H norm of S_dt^k - S(t) (no bound applied).
double resolvent_semigroup_error_norm(const ModeSpectrum& spec, double sigma0, double dt, long k, double t);

// 2^{-3} .. 2^{-10}
std::vector<double> default_dt_grid();

}  // namespace smx
