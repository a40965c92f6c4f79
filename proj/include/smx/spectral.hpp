#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace smx {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Frequencies mu_j of the skew blocks [[0, mu_j], [-mu_j, 0]] that make up
/// the Maxwell operator in the mode basis.
class ModeSpectrum {
 public:
  explicit ModeSpectrum(std::vector<double> frequencies);

  // mu_j = (j - offset) * scale for j = 1..count.
  static ModeSpectrum arithmetic(std::size_t count, double scale, double offset);

  std::size_t size() const noexcept { return mu_.size(); }
  double operator[](std::size_t j) const { return mu_[j]; }
  std::span<const double> frequencies() const noexcept { return mu_; }
  double min_frequency() const noexcept { return mu_.front(); }

  bool operator==(const ModeSpectrum&) const = default;

 private:
  std::vector<double> mu_;
};

/// Order k of the graph norm on D(M^k); only 0, 1 and 2 are meaningful here.
class GraphOrder {
 public:
  constexpr explicit GraphOrder(int k) : k_(k) {
    if (k < 0 || k > 2) throw std::invalid_argument("graph order must be 0, 1 or 2");
  }
  constexpr int value() const noexcept { return k_; }
  bool operator==(const GraphOrder&) const = default;

 private:
  int k_;
};

// Squared per-mode weight of the D(M^k) norm. D(M^0) is H itself, so k = 0
// gives 1 rather than the 2 the general formula would produce.
double graph_weight_squared(double mu, GraphOrder k) noexcept;

/// Field coefficients (e_j, h_j), stored as two contiguous arrays.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t modes) : e_(modes, 0.0), h_(modes, 0.0) {}
  StateVector(std::vector<double> e, std::vector<double> h);
  StateVector(std::initializer_list<std::pair<double, double>> pairs);

  std::size_t modes() const noexcept { return e_.size(); }

  double& e(std::size_t j) { return e_[j]; }
  double& h(std::size_t j) { return h_[j]; }
  double e(std::size_t j) const { return e_[j]; }
  double h(std::size_t j) const { return h_[j]; }

  std::span<double> e_values() noexcept { return e_; }
  std::span<double> h_values() noexcept { return h_; }
  std::span<const double> e_values() const noexcept { return e_; }
  std::span<const double> h_values() const noexcept { return h_; }

  bool all_finite() const noexcept;

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(double s) noexcept;

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(double s, StateVector a) { return a *= s; }

  bool operator==(const StateVector&) const = default;

 private:
  std::vector<double> e_, h_;
};

void require_compatible(const StateVector& u, const ModeSpectrum& spec);
void require_compatible(const StateVector& u, const StateVector& v);

double inner(const StateVector& u, const StateVector& v);
double norm_squared(const StateVector& u);
double norm(const StateVector& u);

double graph_inner(const StateVector& u, const StateVector& v, const ModeSpectrum& spec, GraphOrder k);
double graph_norm(const StateVector& u, const ModeSpectrum& spec, GraphOrder k);

// Mu: (e_j, h_j) -> (mu_j h_j, -mu_j e_j).
StateVector maxwell_apply(const StateVector& u, const ModeSpectrum& spec);

// e^{-sigma0 t} Rot(mu_j t) per mode; negative t gives the inverse group element.
StateVector semigroup_apply(const StateVector& u, const ModeSpectrum& spec, double sigma0, double t);

// (I + sigma0 dt - dt M)^{-1}.
StateVector resolvent_apply(const StateVector& u, const ModeSpectrum& spec, double sigma0, double dt);

// (I + sigma0 dt - dt M) u, the inverse of resolvent_apply.
StateVector resolvent_inverse_apply(const StateVector& u, const ModeSpectrum& spec, double sigma0, double dt);

/// Exact operator norm of the k-th resolvent power on D(M^i). Every block is
/// a scaled rotation and the weights are mode-diagonal, so i drops out.
double operator_norm_resolvent_power(const ModeSpectrum& spec, double sigma0, double dt, long k, GraphOrder i);

}  // namespace smx
