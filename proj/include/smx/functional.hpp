#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "smx/spectral.hpp"

namespace smx {

enum class FunctionalFamily { exp_neg_norm2, cos_pairing, norm2_capped };

std::string_view to_string(FunctionalFamily f) noexcept;
FunctionalFamily parse_functional_family(std::string_view name);

/// Scalar test functions of the state.
///   exp_neg_norm2  exp(-|u|^2)
///   cos_pairing    cos(<u, w>)
///   norm2_capped   min(|u|^2, cap); cap = inf gives the plain quadratic
class Functional {
 public:
  static Functional exp_neg_norm2();
  static Functional cos_pairing(StateVector direction);
  static Functional norm2_capped(double cap = std::numeric_limits<double>::infinity());

  FunctionalFamily family() const noexcept { return family_; }
  const StateVector& direction() const noexcept { return direction_; }
  double cap() const noexcept { return cap_; }

  double operator()(const StateVector& u) const { return value(u); }
  double value(const StateVector& u) const;
  StateVector gradient(const StateVector& u) const;

  // Growth p and Hoelder exponent gamma of the weighted class the function
  // belongs to (p = 1 for bounded Lipschitz functions).
  double growth_exponent() const noexcept;
  double hoelder_exponent() const noexcept { return 1.0; }
  // Bounded with bounded derivatives up to order three.
  bool smooth_bounded() const noexcept { return family_ != FunctionalFamily::norm2_capped; }

  std::string describe() const;

 private:
  Functional(FunctionalFamily f, StateVector w, double cap) : family_(f), direction_(std::move(w)), cap_(cap) {}

  FunctionalFamily family_;
  StateVector direction_;
  double cap_ = std::numeric_limits<double>::infinity();
};

// Unit-norm direction with weight j^{-decay} on e_j and h_j.
StateVector power_law_direction(std::size_t modes, double decay);

}  // namespace smx
