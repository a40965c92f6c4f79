#include "smx/reference.hpp"

#include <string>

namespace smx::reference {

StateVector step(const StateVector& u_k, std::span<const double> scaled_increment, const ModelSpec& m,
                 const SchemeParams& p, StepStats* stats) {
  if (!(contraction_factor(m, p.dt) < 1.0)) throw GuardError("implicit drift solve is not a contraction");
  const auto& spec = m.spectrum();
  const StateVector rhs = u_k + diffusion_apply(u_k, scaled_increment, m);
  const StateVector predictor = resolvent_apply(rhs, spec, m.sigma0(), p.dt);
  StateVector v = predictor;
  StepStats s{1, 0.0};
  if (m.drift().family != DriftFamily::zero) {
    for (s.iterations = 1;; ++s.iterations) {
      const StateVector w = predictor + p.dt * resolvent_apply(drift_eval(v, m), spec, m.sigma0(), p.dt);
      s.residual = norm(w - v);
      v = w;
      if (s.residual <= p.fp_tol) break;
      if (s.iterations == p.fp_max_iter)
        throw StepError("reference fixed-point solve did not converge", s.iterations, s.residual);
    }
  }
  if (!v.all_finite()) throw StepError("state became non-finite", s.iterations, s.residual);
  if (stats) *stats = s;
  return v;
}

StateVector tangent_step(const StateVector& eta, const StateVector& u_k, const StateVector& u_next,
                         std::span<const double> scaled_increment, const ModelSpec& m, const SchemeParams& p) {
  const auto& spec = m.spectrum();
  const StateVector predictor =
      resolvent_apply(eta + diffusion_jacobian_apply(u_k, eta, scaled_increment, m), spec, m.sigma0(), p.dt);
  StateVector v = predictor;
  if (m.drift().family == DriftFamily::zero) return v;
  for (int it = 1;; ++it) {
    const StateVector w =
        predictor + p.dt * resolvent_apply(drift_jacobian_apply(u_next, v, m), spec, m.sigma0(), p.dt);
    const double res = norm(w - v);
    v = w;
    if (res <= p.fp_tol) break;
    if (it == p.fp_max_iter) throw StepError("reference tangent solve did not converge", it, res);
  }
  return v;
}

}  // namespace smx::reference
