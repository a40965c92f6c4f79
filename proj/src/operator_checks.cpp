#include "smx/operator_checks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace smx {

namespace {

// Holds iff log(1 + c y) - g y >= 0, y = sigma0 dt.
double threshold_gap(double y, double g, double c) { return std::log1p(c * y) - g * y; }

double inequality_residual(double sigma0, double dt, double g, double c) {
  return std::abs(1.0 / (1.0 + c * sigma0 * dt) - std::exp(-g * sigma0 * dt));
}

}  // namespace

DtThreshold compute_dt_threshold(double sigma0, double g, ThresholdKind kind, double cap) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
  const double c = kind == ThresholdKind::squared_resolvent ? 2.0 : 1.0;
  if (!(g > 0.0 && g < c))
    throw std::invalid_argument(kind == ThresholdKind::squared_resolvent ? "g must lie in (0, 2)"
                                                                         : "g~ must lie in (0, 1)");
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
  const double y_cap = cap * sigma0;
  if (threshold_gap(y_cap, g, c) >= 0.0) return {cap, true, inequality_residual(sigma0, cap, g, c)};
  // The gap is concave with a zero at y = 0, so it is positive up to a single root.
  double lo = 0.0, hi = 1.0;
  while (hi < y_cap && threshold_gap(hi, g, c) >= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  hi = std::min(hi, y_cap);
  while ((hi - lo) > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_gap(mid, g, c) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double dt = lo / sigma0;
  return {dt, false, inequality_residual(sigma0, dt, g, c)};
}

std::vector<double> default_dt_grid() {
  std::vector<double> g;
  for (int e = 3; e <= 10; ++e) g.push_back(std::ldexp(1.0, -e));
  return g;
}

BoundReport verify_resolvent_decay(const ModeSpectrum& spec, double sigma0, double g, const std::vector<double>& dt_grid,
                                   long k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  BoundReport rep;
  rep.id = "resolvent_decay";
  rep.sigma0 = sigma0;
  rep.g = g;
  rep.dt_threshold = compute_dt_threshold(sigma0, g).value;
  rep.constant = 1.0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double dt : dt_grid) {
    if (dt > rep.dt_threshold) {
      rep.skipped_dt.push_back(dt);
      continue;
    }
    for (long k = 0; k <= k_max; ++k)
      for (int i = 0; i <= 2; ++i) {
        const double norm = operator_norm_resolvent_power(spec, sigma0, dt, k, GraphOrder(i));
        const double bound = std::exp(-0.5 * g * static_cast<double>(k) * sigma0 * dt);
        rep.points.push_back({dt, k, i, static_cast<double>(k) * dt, norm, bound, bound - norm});
        rep.worst_margin = std::min(rep.worst_margin, bound - norm);
      }
  }
  rep.pass = !rep.points.empty() && rep.worst_margin >= 0.0;
  return rep;
}

BoundReport verify_semigroup_lipschitz(const ModeSpectrum& spec, double sigma0, const std::vector<double>& t_grid) {
  BoundReport rep;
  rep.id = "semigroup_lipschitz";
  rep.sigma0 = sigma0;
  rep.constant = sigma0 + 1.0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("times must be >= 0");
    const double decay = std::exp(-sigma0 * t);
    double norm = 0.0;
    for (double mu : spec.frequencies()) {
      // Each block of S(t) - I is (decay cos - 1) I + decay sin J, a scaled rotation.
      const double block = std::hypot(decay * std::cos(mu * t) - 1.0, decay * std::sin(mu * t));
      norm = std::max(norm, block / std::sqrt(graph_weight_squared(mu, GraphOrder(1))));
    }
    const double bound = rep.constant * t;
    rep.points.push_back({0.0, 0, 1, t, norm, bound, bound - norm});
    rep.worst_margin = std::min(rep.worst_margin, bound - norm);
    if (t > 0.0) rep.fitted_constant = std::max(rep.fitted_constant, norm / t);
  }
  rep.pass = !rep.points.empty() && rep.worst_margin >= 0.0 && std::isfinite(rep.fitted_constant);
  return rep;
}

double resolvent_semigroup_error_norm(const ModeSpectrum& spec, double sigma0, double dt, long k, double t) {
  // On z = e + i h the Maxwell block acts as -i mu, so S_dt = 1/(a + i b)
  // with a = 1 + sigma0 dt, b = mu dt, and S(t) = e^{-sigma0 t} e^{-i mu t}.
  const double a = 1.0 + sigma0 * dt;
  double worst = 0.0;
  for (double mu : spec.frequencies()) {
    const double b = mu * dt;
    const double kd = static_cast<double>(k);
    const std::complex<double> discrete =
        std::polar(std::exp(-0.5 * kd * std::log(a * a + b * b)), -kd * std::atan2(b, a));
    const std::complex<double> exact = std::polar(std::exp(-sigma0 * t), -mu * t);
    worst = std::max(worst, std::abs(discrete - exact) / std::sqrt(graph_weight_squared(mu, GraphOrder(2))));
  }
  return worst;
}

namespace {

// Points (k, t) probed for one step size: t_k and t_k +- dt/2 (t >= 0).
template <class F>
void for_each_probe(double dt, long k_max, F&& f) {
  for (long k = 0; k <= k_max; ++k) {
    const double tk = static_cast<double>(k) * dt;
    f(k, tk);
    if (k > 0) f(k, tk - 0.5 * dt);
    f(k, tk + 0.5 * dt);
  }
}

}  // namespace

BoundReport verify_resolvent_semigroup_error(const ModeSpectrum& spec, double sigma0, double g_tilde,
                                             const std::vector<double>& fit_grid,
                                             const std::vector<double>& check_grid, long k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  BoundReport rep;
  rep.id = "resolvent_semigroup_error";
  rep.sigma0 = sigma0;
  rep.g = g_tilde;
  rep.dt_threshold = compute_dt_threshold(sigma0, g_tilde, ThresholdKind::resolvent).value;
  auto envelope = [&](double dt, long k) {
    return dt * std::exp(-0.5 * g_tilde * static_cast<double>(k) * sigma0 * dt);
  };
  for (double dt : fit_grid) {
    if (dt > rep.dt_threshold) continue;
    for_each_probe(dt, k_max, [&](long k, double t) {
      const double err = resolvent_semigroup_error_norm(spec, sigma0, dt, k, t);
      const double env = envelope(dt, k);
      if (env > 0.0) rep.fitted_constant = std::max(rep.fitted_constant, err / env);
    });
  }
  rep.constant = rep.fitted_constant;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double dt : check_grid) {
    if (dt > rep.dt_threshold) {
      rep.skipped_dt.push_back(dt);
      continue;
    }
    for_each_probe(dt, k_max, [&](long k, double t) {
      const double err = resolvent_semigroup_error_norm(spec, sigma0, dt, k, t);
      const double bound = rep.constant * envelope(dt, k);
      rep.points.push_back({dt, k, 2, t, err, bound, bound - err});
      rep.worst_margin = std::min(rep.worst_margin, bound - err);
    });
  }
  rep.pass = !rep.points.empty() && rep.fitted_constant > 0.0 && rep.worst_margin >= 0.0;
  return rep;
}

}  // namespace smx
