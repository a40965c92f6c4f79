#pragma once

// Vectorised inner loops. The .cpp files behind this header are compiled with
// -ffast-math, so nothing in here may rely on NaN/Inf semantics; callers
// check finiteness and convergence.

#include <cstddef>
#include <cstdint>

namespace smx::kernels {

// Standard normals for one (key, stream, tag, step) cell of the counter space,
// written to out[0..count). Pairs of uniforms come from one Philox block each;
// the cosine half of the Box-Muller pair lands in out[p], the sine half in
// out[P + p] with P = ceil(count / 2).
void standard_normals(std::uint64_t key, std::uint32_t stream, std::uint32_t tag, std::uint64_t step,
                      std::size_t count, double* out) noexcept;

enum class Drift : int { zero, linear, tanh };
enum class Noise : int { zero, additive, sine };

struct StepCoefficients {
  std::size_t modes = 0;
  const double* diag = nullptr;  // a / (a^2 + b_j^2)
  const double* off = nullptr;   // b_j / (a^2 + b_j^2)
  double dt = 0.0;
  Drift drift = Drift::zero;
  double drift_amplitude = 0.0;
  Noise noise = Noise::zero;
  double noise_amplitude = 0.0;
  double tol = 1e-12;
  int max_iter = 64;
};

struct Convergence {
  int iterations = 0;
  double residual = 0.0;
};

// One semi-implicit step in place. xi[j] is the covariance-scaled increment
// driving mode j (zero for modes without noise). scratch needs 4 * modes.
// Reports iterations == max_iter + 1 when the tolerance was not reached.
Convergence semi_implicit_step(const StepCoefficients& c, double* e, double* h, const double* xi,
                               double* scratch) noexcept;

// Linearised step for the first variation along the step (e0,h0) -> (e1,h1).
Convergence tangent_step(const StepCoefficients& c, const double* e0, const double* h0, const double* e1,
                         const double* h1, double* te, double* th, const double* xi, double* scratch) noexcept;

}  // namespace smx::kernels
