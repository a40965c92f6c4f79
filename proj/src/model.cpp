#include "smx/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "smx/summation.hpp"

namespace smx {

std::string_view to_string(DriftFamily f) noexcept {
  switch (f) {
    case DriftFamily::zero: return "zero";
    case DriftFamily::linear_damp: return "linear_damp";
    case DriftFamily::bounded_smooth: return "bounded_smooth";
  }
  return "?";
}

std::string_view to_string(DiffusionFamily f) noexcept {
  switch (f) {
    case DiffusionFamily::zero: return "zero";
    case DiffusionFamily::additive: return "additive";
    case DiffusionFamily::multiplicative_bounded: return "multiplicative_bounded";
  }
  return "?";
}

DriftFamily parse_drift_family(std::string_view name) {
  for (auto f : {DriftFamily::zero, DriftFamily::linear_damp, DriftFamily::bounded_smooth})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown drift family '" + std::string(name) + "'");
}

DiffusionFamily parse_diffusion_family(std::string_view name) {
  for (auto f : {DiffusionFamily::zero, DiffusionFamily::additive, DiffusionFamily::multiplicative_bounded})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown diffusion family '" + std::string(name) + "'");
}

ModelSpec::ModelSpec(double sigma0, DriftSpec drift, DiffusionSpec diffusion, CovarianceSpec cov,
                     ModeSpectrum spectrum)
    : sigma0_(sigma0), drift_(drift), diffusion_(diffusion), cov_(std::move(cov)), spectrum_(std::move(spectrum)) {
  if (!(sigma0_ > 0.0) || !std::isfinite(sigma0_)) throw std::invalid_argument("sigma0 must be positive");
  if (!std::isfinite(drift_.amplitude) || !std::isfinite(diffusion_.amplitude))
    throw std::invalid_argument("amplitudes must be finite");
}

ModelSpec ModelSpec::with_sigma0(double sigma0) const {
  return ModelSpec(sigma0, drift_, diffusion_, cov_, spectrum_);
}

namespace {

// max |tanh''| = 4 / (3 sqrt 3), attained at tanh x = 1/sqrt 3.
constexpr double kTanhSecond = 0.76980035891950101;

}  // namespace

DriftConstants ModelSpec::drift_constants() const {
  DriftConstants c;
  const double lam = drift_.amplitude;
  switch (drift_.family) {
    case DriftFamily::zero: break;
    case DriftFamily::linear_damp:
      // Mode-diagonal scalar maps commute with the graph weights, so the
      // H and D(M^2) constants coincide.
      c.one_sided_h = c.one_sided_dm2 = lam;
      c.growth_dm2 = c.d1 = std::abs(lam);
      break;
    case DriftFamily::bounded_smooth:
      c.one_sided_h = c.one_sided_dm2 = std::abs(lam);
      c.growth_dm2 = c.d1 = std::abs(lam);
      c.d2 = kTanhSecond * std::abs(lam);
      c.d3 = 2.0 * std::abs(lam);
      break;
  }
  return c;
}

DiffusionConstants ModelSpec::diffusion_constants() const {
  DiffusionConstants c;
  const double lam = std::abs(diffusion_.amplitude);
  const std::size_t n = coupled_modes();
  const auto q = cov_.eigenvalues();
  switch (diffusion_.family) {
    case DiffusionFamily::zero: break;
    case DiffusionFamily::additive: {
      std::vector<double> h(n), dm2(n);
      for (std::size_t j = 0; j < n; ++j) {
        h[j] = 2.0 * q[j];
        dm2[j] = 2.0 * q[j] * graph_weight_squared(spectrum_[j], GraphOrder{2});
      }
      c.at_zero_h = lam * std::sqrt(pairwise_sum(h));
      c.at_zero_dm2 = lam * std::sqrt(pairwise_sum(dm2));
      break;
    }
    case DiffusionFamily::multiplicative_bounded: {
      // |sin'|, |sin''|, |sin'''| <= 1 and the stencil is mode-diagonal, so
      // every bound is lambda times the largest coupled sqrt(q_j).
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s = std::max(s, std::sqrt(q[j]));
      c.lipschitz_h = c.lipschitz_dm2 = lam * s;
      c.d1 = c.d2 = c.d3 = lam * s;
      break;
    }
  }
  return c;
}

std::string ModelSpec::canonical() const {
  std::string s;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
  };
  s += "sigma0=";
  num(sigma0_);
  s += ";drift=";
  s += to_string(drift_.family);
  s += ':';
  num(drift_.amplitude);
  s += ";diffusion=";
  s += to_string(diffusion_.family);
  s += ':';
  num(diffusion_.amplitude);
  s += ";q=";
  for (double q : cov_.eigenvalues()) {
    num(q);
    s += ',';
  }
  s += ";mu=";
  for (double mu : spectrum_.frequencies()) {
    num(mu);
    s += ',';
  }
  return s;
}

std::uint64_t ModelSpec::hash() const {
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

StateVector drift_eval(const StateVector& u, const ModelSpec& m) {
  require_compatible(u, m.spectrum());
  StateVector out(u.modes());
  const double lam = m.drift().amplitude;
  for (std::size_t j = 0; j < u.modes(); ++j) {
    switch (m.drift().family) {
      case DriftFamily::zero: break;
      case DriftFamily::linear_damp:
        out.e(j) = lam * u.e(j);
        out.h(j) = lam * u.h(j);
        break;
      case DriftFamily::bounded_smooth:
        out.e(j) = lam * std::tanh(u.e(j));
        out.h(j) = lam * std::tanh(u.h(j));
        break;
    }
  }
  return out;
}

StateVector drift_jacobian_apply(const StateVector& u, const StateVector& h, const ModelSpec& m) {
  require_compatible(u, m.spectrum());
  require_compatible(u, h);
  StateVector out(u.modes());
  const double lam = m.drift().amplitude;
  for (std::size_t j = 0; j < u.modes(); ++j) {
    switch (m.drift().family) {
      case DriftFamily::zero: break;
      case DriftFamily::linear_damp:
        out.e(j) = lam * h.e(j);
        out.h(j) = lam * h.h(j);
        break;
      case DriftFamily::bounded_smooth: {
        const double te = std::tanh(u.e(j)), th = std::tanh(u.h(j));
        out.e(j) = lam * (1.0 - te * te) * h.e(j);
        out.h(j) = lam * (1.0 - th * th) * h.h(j);
        break;
      }
    }
  }
  return out;
}

namespace {

void require_increment(std::span<const double> inc, const ModelSpec& m) {
  if (inc.size() != m.noise_modes())
    throw DimensionError("increment has " + std::to_string(inc.size()) + " entries, model has " +
                         std::to_string(m.noise_modes()) + " noise modes");
}

}  // namespace

std::pair<double, double> diffusion_stencil(const StateVector& u, std::size_t j, const ModelSpec& m) {
  const double lam = m.diffusion().amplitude;
  switch (m.diffusion().family) {
    case DiffusionFamily::zero: return {0.0, 0.0};
    case DiffusionFamily::additive: return {lam, lam};
    case DiffusionFamily::multiplicative_bounded: return {lam * std::sin(u.e(j)), lam * std::sin(u.h(j))};
  }
  return {0.0, 0.0};
}

StateVector diffusion_apply(const StateVector& u, std::span<const double> scaled_increment, const ModelSpec& m) {
  require_compatible(u, m.spectrum());
  require_increment(scaled_increment, m);
  StateVector out(u.modes());
  for (std::size_t j = 0; j < m.coupled_modes(); ++j) {
    const auto [be, bh] = diffusion_stencil(u, j, m);
    out.e(j) = be * scaled_increment[j];
    out.h(j) = bh * scaled_increment[j];
  }
  return out;
}

StateVector diffusion_jacobian_apply(const StateVector& u, const StateVector& h,
                                     std::span<const double> scaled_increment, const ModelSpec& m) {
  require_compatible(u, m.spectrum());
  require_compatible(u, h);
  require_increment(scaled_increment, m);
  StateVector out(u.modes());
  if (m.diffusion().family != DiffusionFamily::multiplicative_bounded) return out;
  const double lam = m.diffusion().amplitude;
  for (std::size_t j = 0; j < m.coupled_modes(); ++j) {
    out.e(j) = lam * std::cos(u.e(j)) * h.e(j) * scaled_increment[j];
    out.h(j) = lam * std::cos(u.h(j)) * h.h(j) * scaled_increment[j];
  }
  return out;
}

double hs_norm_diffusion(const StateVector& u, GraphOrder rho, const ModelSpec& m) {
  require_compatible(u, m.spectrum());
  const std::size_t n = m.coupled_modes();
  const auto q = m.covariance().eigenvalues();
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto [be, bh] = diffusion_stencil(u, j, m);
    terms[j] = q[j] * graph_weight_squared(m.spectrum()[j], rho) * (be * be + bh * bh);
  }
  return std::sqrt(pairwise_sum(terms));
}

}  // namespace smx
