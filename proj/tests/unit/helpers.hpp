#pragma once

#include <cmath>
#include <random>

#include "smx/model.hpp"

namespace smx::testing {

inline ModelSpec make_model(double sigma0, DriftFamily drift, double lambda_f, DiffusionFamily diffusion,
                            double lambda_b, std::size_t modes = 8, std::size_t noise_modes = 8,
                            double q_decay = 6.0) {
  return ModelSpec(sigma0, {drift, lambda_f}, {diffusion, lambda_b}, CovarianceSpec::power_law(noise_modes, q_decay),
                   ModeSpectrum::arithmetic(modes, M_PI, 1.0));
}

inline ModelSpec linear_model(double sigma0 = 1.0, std::size_t modes = 8) {
  return make_model(sigma0, DriftFamily::zero, 0.0, DiffusionFamily::zero, 0.0, modes, modes);
}

inline StateVector random_state(std::mt19937_64& rng, std::size_t modes, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  StateVector u(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    u.e(j) = n(rng);
    u.h(j) = n(rng);
  }
  return u;
}

inline StateVector decaying_state(std::size_t modes, double amplitude = 0.5, double decay = 4.0) {
  StateVector u(modes);
  for (std::size_t j = 0; j < modes; ++j) u.e(j) = u.h(j) = amplitude * std::pow(double(j + 1), -decay);
  return u;
}

}  // namespace smx::testing
