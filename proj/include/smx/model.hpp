#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "smx/noise.hpp"
#include "smx/spectral.hpp"

namespace smx {

enum class DriftFamily { zero, linear_damp, bounded_smooth };
enum class DiffusionFamily { zero, additive, multiplicative_bounded };

std::string_view to_string(DriftFamily f) noexcept;
std::string_view to_string(DiffusionFamily f) noexcept;
DriftFamily parse_drift_family(std::string_view name);
DiffusionFamily parse_diffusion_family(std::string_view name);

/// Scalar nonlinearity applied to every coordinate: 0, lambda x or lambda tanh x.
struct DriftSpec {
  DriftFamily family = DriftFamily::zero;
  double amplitude = 0.0;
};

/// Mode j gets lambda sqrt(q_j) dW_j times 1 (additive) or sin of its own
/// coordinate (multiplicative_bounded), on both e_j and h_j.
struct DiffusionSpec {
  DiffusionFamily family = DiffusionFamily::zero;
  double amplitude = 0.0;
};

// Bounds for the drift. "h" means measured in H, "dm2" in D(M^2).
struct DriftConstants {
  double one_sided_h = 0.0;    // alpha_{F,0}
  double one_sided_dm2 = 0.0;  // alpha_{F,2}
  double at_zero_h = 0.0;      // ||F(0)||
  double at_zero_dm2 = 0.0;
  double growth_dm2 = 0.0;     // L_F
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

struct DiffusionConstants {
  double lipschitz_h = 0.0;    // alpha_{B,0}
  double lipschitz_dm2 = 0.0;  // alpha_{B,2}
  double at_zero_h = 0.0;      // ||B(0)||_{HS(U0;H)}
  double at_zero_dm2 = 0.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

class ModelSpec {
 public:
  ModelSpec(double sigma0, DriftSpec drift, DiffusionSpec diffusion, CovarianceSpec cov, ModeSpectrum spectrum);

  double sigma0() const noexcept { return sigma0_; }
  const DriftSpec& drift() const noexcept { return drift_; }
  const DiffusionSpec& diffusion() const noexcept { return diffusion_; }
  const CovarianceSpec& covariance() const noexcept { return cov_; }
  const ModeSpectrum& spectrum() const noexcept { return spectrum_; }

  std::size_t modes() const noexcept { return spectrum_.size(); }
  std::size_t noise_modes() const noexcept { return cov_.size(); }
  // Noise mode j drives field mode j for j below this count.
  std::size_t coupled_modes() const noexcept { return std::min(modes(), noise_modes()); }

  DriftConstants drift_constants() const;
  DiffusionConstants diffusion_constants() const;

  ModelSpec with_sigma0(double sigma0) const;

  // Stable textual key used for hashing and for result files.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  double sigma0_;
  DriftSpec drift_;
  DiffusionSpec diffusion_;
  CovarianceSpec cov_;
  ModeSpectrum spectrum_;
};

StateVector drift_eval(const StateVector& u, const ModelSpec& m);
StateVector drift_jacobian_apply(const StateVector& u, const StateVector& h, const ModelSpec& m);

// B(u) applied to an increment that is already scaled by Q^{1/2}.
StateVector diffusion_apply(const StateVector& u, std::span<const double> scaled_increment, const ModelSpec& m);
StateVector diffusion_jacobian_apply(const StateVector& u, const StateVector& h,
                                     std::span<const double> scaled_increment, const ModelSpec& m);

// Per-mode coefficient of B(u)Q^{1/2}e_j on (e_j, h_j), before the sqrt(q_j).
std::pair<double, double> diffusion_stencil(const StateVector& u, std::size_t j, const ModelSpec& m);

// ||B(u)||_{HS(U0; D(M^rho))}.
double hs_norm_diffusion(const StateVector& u, GraphOrder rho, const ModelSpec& m);

}  // namespace smx
