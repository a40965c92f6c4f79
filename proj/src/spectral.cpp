#include "smx/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smx/summation.hpp"

namespace smx {

ModeSpectrum::ModeSpectrum(std::vector<double> frequencies) : mu_(std::move(frequencies)) {
  if (mu_.empty()) throw std::invalid_argument("spectrum needs at least one mode");
  for (std::size_t j = 0; j < mu_.size(); ++j) {
    if (!std::isfinite(mu_[j]) || mu_[j] < 0.0)
      throw std::invalid_argument("frequency " + std::to_string(j) + " must be finite and >= 0");
    if (j > 0 && mu_[j] < mu_[j - 1])
      throw std::invalid_argument("frequencies must be nondecreasing");
  }
}

ModeSpectrum ModeSpectrum::arithmetic(std::size_t count, double scale, double offset) {
  std::vector<double> mu(count);
  for (std::size_t j = 0; j < count; ++j) mu[j] = (static_cast<double>(j + 1) - offset) * scale;
  return ModeSpectrum(std::move(mu));
}

double graph_weight_squared(double mu, GraphOrder k) noexcept {
  switch (k.value()) {
    case 0: return 1.0;
    case 1: return 1.0 + mu * mu;
    default: {
      const double m2 = mu * mu;
      return 1.0 + m2 * m2;
    }
  }
}

StateVector::StateVector(std::vector<double> e, std::vector<double> h) : e_(std::move(e)), h_(std::move(h)) {
  if (e_.size() != h_.size()) throw DimensionError("e and h coefficient arrays differ in length");
}

StateVector::StateVector(std::initializer_list<std::pair<double, double>> pairs) {
  e_.reserve(pairs.size());
  h_.reserve(pairs.size());
  for (const auto& [e, h] : pairs) {
    e_.push_back(e);
    h_.push_back(h);
  }
}

bool StateVector::all_finite() const noexcept {
  for (std::size_t j = 0; j < e_.size(); ++j)
    if (!std::isfinite(e_[j]) || !std::isfinite(h_[j])) return false;
  return true;
}

StateVector& StateVector::operator+=(const StateVector& o) {
  require_compatible(*this, o);
  for (std::size_t j = 0; j < e_.size(); ++j) {
    e_[j] += o.e_[j];
    h_[j] += o.h_[j];
  }
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  require_compatible(*this, o);
  for (std::size_t j = 0; j < e_.size(); ++j) {
    e_[j] -= o.e_[j];
    h_[j] -= o.h_[j];
  }
  return *this;
}

StateVector& StateVector::operator*=(double s) noexcept {
  for (std::size_t j = 0; j < e_.size(); ++j) {
    e_[j] *= s;
    h_[j] *= s;
  }
  return *this;
}

void require_compatible(const StateVector& u, const ModeSpectrum& spec) {
  if (u.modes() != spec.size())
    throw DimensionError("state has " + std::to_string(u.modes()) + " modes, spectrum has " +
                         std::to_string(spec.size()));
}

void require_compatible(const StateVector& u, const StateVector& v) {
  if (u.modes() != v.modes())
    throw DimensionError("states have " + std::to_string(u.modes()) + " and " + std::to_string(v.modes()) +
                         " modes");
}

namespace {

template <class Term>
double mode_sum(std::size_t n, Term term) {
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) terms[j] = term(j);
  return pairwise_sum(terms);
}

}  // namespace

double inner(const StateVector& u, const StateVector& v) {
  require_compatible(u, v);
  return mode_sum(u.modes(), [&](std::size_t j) { return u.e(j) * v.e(j) + u.h(j) * v.h(j); });
}

double norm_squared(const StateVector& u) {
  return mode_sum(u.modes(), [&](std::size_t j) { return u.e(j) * u.e(j) + u.h(j) * u.h(j); });
}

double norm(const StateVector& u) { return std::sqrt(norm_squared(u)); }

double graph_inner(const StateVector& u, const StateVector& v, const ModeSpectrum& spec, GraphOrder k) {
  require_compatible(u, spec);
  require_compatible(u, v);
  return mode_sum(u.modes(), [&](std::size_t j) {
    return graph_weight_squared(spec[j], k) * (u.e(j) * v.e(j) + u.h(j) * v.h(j));
  });
}

double graph_norm(const StateVector& u, const ModeSpectrum& spec, GraphOrder k) {
  return std::sqrt(graph_inner(u, u, spec, k));
}

StateVector maxwell_apply(const StateVector& u, const ModeSpectrum& spec) {
  require_compatible(u, spec);
  StateVector out(u.modes());
  for (std::size_t j = 0; j < u.modes(); ++j) {
    out.e(j) = spec[j] * u.h(j);
    out.h(j) = -spec[j] * u.e(j);
  }
  return out;
}

StateVector semigroup_apply(const StateVector& u, const ModeSpectrum& spec, double sigma0, double t) {
  require_compatible(u, spec);
  const double decay = std::exp(-sigma0 * t);
  StateVector out(u.modes());
  for (std::size_t j = 0; j < u.modes(); ++j) {
    const double c = decay * std::cos(spec[j] * t);
    const double s = decay * std::sin(spec[j] * t);
    out.e(j) = c * u.e(j) + s * u.h(j);
    out.h(j) = -s * u.e(j) + c * u.h(j);
  }
  return out;
}

StateVector resolvent_apply(const StateVector& u, const ModeSpectrum& spec, double sigma0, double dt) {
  require_compatible(u, spec);
  if (!(dt > 0.0)) throw std::invalid_argument("resolvent step must be positive");
  const double a = 1.0 + sigma0 * dt;
  StateVector out(u.modes());
  for (std::size_t j = 0; j < u.modes(); ++j) {
    const double b = spec[j] * dt;
    const double det = a * a + b * b;
    out.e(j) = (a * u.e(j) + b * u.h(j)) / det;
    out.h(j) = (-b * u.e(j) + a * u.h(j)) / det;
  }
  return out;
}

StateVector resolvent_inverse_apply(const StateVector& u, const ModeSpectrum& spec, double sigma0, double dt) {
  require_compatible(u, spec);
  const double a = 1.0 + sigma0 * dt;
  StateVector out(u.modes());
  for (std::size_t j = 0; j < u.modes(); ++j) {
    const double b = spec[j] * dt;
    out.e(j) = a * u.e(j) - b * u.h(j);
    out.h(j) = b * u.e(j) + a * u.h(j);
  }
  return out;
}

double operator_norm_resolvent_power(const ModeSpectrum& spec, double sigma0, double dt, long k, GraphOrder) {
  if (k < 0) throw std::invalid_argument("resolvent power must be nonnegative");
  if (k == 0) return 1.0;
  const double a = 1.0 + sigma0 * dt;
  double smallest = INFINITY;
  for (double mu : spec.frequencies()) smallest = std::min(smallest, a * a + mu * mu * dt * dt);
  return std::exp(-0.5 * static_cast<double>(k) * std::log(smallest));
}

}  // namespace smx
