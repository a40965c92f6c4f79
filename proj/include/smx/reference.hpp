#pragma once

// Scalar, strictly IEEE version of the scheme built directly from the model
// and spectral operations. Slow; kept as the oracle for the vectorised
// stepper and the parallel harness.

#include <span>

#include "smx/integrator.hpp"

namespace smx::reference {

StateVector step(const StateVector& u_k, std::span<const double> scaled_increment, const ModelSpec& m,
                 const SchemeParams& p, StepStats* stats = nullptr);

StateVector tangent_step(const StateVector& eta, const StateVector& u_k, const StateVector& u_next,
                         std::span<const double> scaled_increment, const ModelSpec& m, const SchemeParams& p);

}  // namespace smx::reference
