#include <cmath>

#include "kernels/kernels.hpp"

namespace smx::kernels {
namespace {

// Noise stencil and drift nonlinearity are template parameters so the
// per-mode loops below contain no branches and vectorise.
template <Noise N>
void predictor(const StepCoefficients& c, const double* e, const double* h, const double* xi, double* pe,
               double* ph) noexcept {
  const std::size_t n = c.modes;
  const double* d = c.diag;
  const double* o = c.off;
  const double lam = c.noise_amplitude;
#pragma omp simd
  for (std::size_t j = 0; j < n; ++j) {
    double re = e[j], rh = h[j];
    if constexpr (N == Noise::additive) {
      re += lam * xi[j];
      rh += lam * xi[j];
    } else if constexpr (N == Noise::sine) {
      re += lam * std::sin(e[j]) * xi[j];
      rh += lam * std::sin(h[j]) * xi[j];
    }
    pe[j] = d[j] * re + o[j] * rh;
    ph[j] = -o[j] * re + d[j] * rh;
  }
}

template <Drift D>
inline double drift_value(double x, double lam) noexcept {
  if constexpr (D == Drift::linear) return lam * x;
  else return lam * std::tanh(x);
}

template <Drift D>
Convergence iterate(const StepCoefficients& c, const double* pe, const double* ph, double* ve, double* vh) noexcept {
  const std::size_t n = c.modes;
  const double* d = c.diag;
  const double* o = c.off;
  const double lam = c.drift_amplitude;
  const double dt = c.dt;
  const double tol2 = c.tol * c.tol;
  for (std::size_t j = 0; j < n; ++j) {
    ve[j] = pe[j];
    vh[j] = ph[j];
  }
  double res2 = 0.0;
  for (int it = 1; it <= c.max_iter; ++it) {
    res2 = 0.0;
#pragma omp simd reduction(+ : res2)
    for (std::size_t j = 0; j < n; ++j) {
      const double fe = dt * drift_value<D>(ve[j], lam);
      const double fh = dt * drift_value<D>(vh[j], lam);
      const double we = pe[j] + d[j] * fe + o[j] * fh;
      const double wh = ph[j] - o[j] * fe + d[j] * fh;
      const double de = we - ve[j], dh = wh - vh[j];
      res2 += de * de + dh * dh;
      ve[j] = we;
      vh[j] = wh;
    }
    if (res2 <= tol2) return {it, std::sqrt(res2)};
  }
  return {c.max_iter + 1, std::sqrt(res2)};
}

template <Noise N>
Convergence step_with_noise(const StepCoefficients& c, double* e, double* h, const double* xi,
                            double* scratch) noexcept {
  const std::size_t n = c.modes;
  double* pe = scratch;
  double* ph = scratch + n;
  predictor<N>(c, e, h, xi, pe, ph);
  Convergence conv{1, 0.0};
  switch (c.drift) {
    case Drift::zero:
      for (std::size_t j = 0; j < n; ++j) {
        e[j] = pe[j];
        h[j] = ph[j];
      }
      return conv;
    case Drift::linear: conv = iterate<Drift::linear>(c, pe, ph, e, h); break;
    case Drift::tanh: conv = iterate<Drift::tanh>(c, pe, ph, e, h); break;
  }
  return conv;
}

template <Drift D>
inline double drift_slope(double x, double lam) noexcept {
  if constexpr (D == Drift::zero) return 0.0;
  else if constexpr (D == Drift::linear) return lam;
  else {
    const double t = std::tanh(x);
    return lam * (1.0 - t * t);
  }
}

template <Drift D, Noise N>
Convergence tangent(const StepCoefficients& c, const double* e0, const double* h0, const double* e1,
                    const double* h1, double* te, double* th, const double* xi, double* scratch) noexcept {
  const std::size_t n = c.modes;
  const double* d = c.diag;
  const double* o = c.off;
  const double dt = c.dt;
  double* pe = scratch;
  double* ph = scratch + n;
  double* se = scratch + 2 * n;
  double* sh = scratch + 3 * n;
  const double lb = c.noise_amplitude;
#pragma omp simd
  for (std::size_t j = 0; j < n; ++j) {
    double re = te[j], rh = th[j];
    if constexpr (N == Noise::sine) {
      re += lb * std::cos(e0[j]) * te[j] * xi[j];
      rh += lb * std::cos(h0[j]) * th[j] * xi[j];
    }
    pe[j] = d[j] * re + o[j] * rh;
    ph[j] = -o[j] * re + d[j] * rh;
    se[j] = dt * drift_slope<D>(e1[j], c.drift_amplitude);
    sh[j] = dt * drift_slope<D>(h1[j], c.drift_amplitude);
    te[j] = pe[j];
    th[j] = ph[j];
  }
  if constexpr (D == Drift::zero) return {1, 0.0};
  const double tol2 = c.tol * c.tol;
  double res2 = 0.0;
  for (int it = 1; it <= c.max_iter; ++it) {
    res2 = 0.0;
#pragma omp simd reduction(+ : res2)
    for (std::size_t j = 0; j < n; ++j) {
      const double fe = se[j] * te[j];
      const double fh = sh[j] * th[j];
      const double we = pe[j] + d[j] * fe + o[j] * fh;
      const double wh = ph[j] - o[j] * fe + d[j] * fh;
      const double de = we - te[j], dh = wh - th[j];
      res2 += de * de + dh * dh;
      te[j] = we;
      th[j] = wh;
    }
    if (res2 <= tol2) return {it, std::sqrt(res2)};
  }
  return {c.max_iter + 1, std::sqrt(res2)};
}

template <Drift D>
Convergence tangent_dispatch(const StepCoefficients& c, const double* e0, const double* h0, const double* e1,
                             const double* h1, double* te, double* th, const double* xi, double* scratch) noexcept {
  // Additive and zero noise have a vanishing derivative, so they share a path.
  if (c.noise == Noise::sine) return tangent<D, Noise::sine>(c, e0, h0, e1, h1, te, th, xi, scratch);
  return tangent<D, Noise::zero>(c, e0, h0, e1, h1, te, th, xi, scratch);
}

}  // namespace

Convergence semi_implicit_step(const StepCoefficients& c, double* e, double* h, const double* xi,
                               double* scratch) noexcept {
  switch (c.noise) {
    case Noise::zero: return step_with_noise<Noise::zero>(c, e, h, xi, scratch);
    case Noise::additive: return step_with_noise<Noise::additive>(c, e, h, xi, scratch);
    case Noise::sine: return step_with_noise<Noise::sine>(c, e, h, xi, scratch);
  }
  return {};
}

Convergence tangent_step(const StepCoefficients& c, const double* e0, const double* h0, const double* e1,
                         const double* h1, double* te, double* th, const double* xi, double* scratch) noexcept {
  switch (c.drift) {
    case Drift::zero: return tangent_dispatch<Drift::zero>(c, e0, h0, e1, h1, te, th, xi, scratch);
    case Drift::linear: return tangent_dispatch<Drift::linear>(c, e0, h0, e1, h1, te, th, xi, scratch);
    case Drift::tanh: return tangent_dispatch<Drift::tanh>(c, e0, h0, e1, h1, te, th, xi, scratch);
  }
  return {};
}

}  // namespace smx::kernels
