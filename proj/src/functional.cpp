#include "smx/functional.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace smx {

std::string_view to_string(FunctionalFamily f) noexcept {
  switch (f) {
    case FunctionalFamily::exp_neg_norm2: return "exp_neg_norm2";
    case FunctionalFamily::cos_pairing: return "cos_pairing";
    case FunctionalFamily::norm2_capped: return "norm2_capped";
  }
  return "?";
}

FunctionalFamily parse_functional_family(std::string_view name) {
  for (auto f : {FunctionalFamily::exp_neg_norm2, FunctionalFamily::cos_pairing, FunctionalFamily::norm2_capped})
    if (name == to_string(f)) return f;
  throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

Functional Functional::exp_neg_norm2() { return {FunctionalFamily::exp_neg_norm2, {}, 0.0}; }

Functional Functional::cos_pairing(StateVector direction) {
  if (direction.modes() == 0) throw DimensionError("pairing direction is empty");
  if (!direction.all_finite()) throw std::invalid_argument("pairing direction must be finite");
  return {FunctionalFamily::cos_pairing, std::move(direction), 0.0};
}

Functional Functional::norm2_capped(double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
  return {FunctionalFamily::norm2_capped, {}, cap};
}

double Functional::value(const StateVector& u) const {
  switch (family_) {
    case FunctionalFamily::exp_neg_norm2: return std::exp(-norm_squared(u));
    case FunctionalFamily::cos_pairing: return std::cos(inner(u, direction_));
    case FunctionalFamily::norm2_capped: return std::min(norm_squared(u), cap_);
  }
  return 0.0;
}

StateVector Functional::gradient(const StateVector& u) const {
  switch (family_) {
    case FunctionalFamily::exp_neg_norm2: return (-2.0 * std::exp(-norm_squared(u))) * u;
    case FunctionalFamily::cos_pairing: return (-std::sin(inner(u, direction_))) * direction_;
    case FunctionalFamily::norm2_capped:
      if (norm_squared(u) >= cap_) return StateVector(u.modes());
      return 2.0 * u;
  }
  return StateVector(u.modes());
}

double Functional::growth_exponent() const noexcept {
  if (family_ == FunctionalFamily::norm2_capped && std::isinf(cap_)) return 4.0;
  return 1.0;
}

std::string Functional::describe() const {
  if (family_ == FunctionalFamily::norm2_capped) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "norm2_capped(%.17g)", cap_);
    return buf;
  }
  return std::string(to_string(family_));
}

StateVector power_law_direction(std::size_t modes, double decay) {
  StateVector w(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    const double c = std::pow(static_cast<double>(j + 1), -decay);
    w.e(j) = c;
    w.h(j) = c;
  }
  return (1.0 / norm(w)) * w;
}

}  // namespace smx
