#include "smx/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smx {

const Verdict& AssumptionAudit::verdict(std::string_view id) const {
  for (const auto& v : verdicts)
    if (v.id == id) return v;
  throw std::out_of_range("no verdict named '" + std::string(id) + "'");
}

double moment_constant(int q) {
  if (q < 1) throw std::invalid_argument("moment order must be >= 1");
  if (q == 1) return 0.0;
  const double qd = q;
  return std::sqrt(qd * (qd - 1.0) / 2.0 * std::pow(qd / (qd - 1.0), qd - 2.0));
}

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

double moment_constant_tilde(int q, double a) {
  if (q < 1) throw std::invalid_argument("moment order must be >= 1");
  const double r = moment_constant(2 * q);
  double total = std::pow(1.0 + 4.0 * a * r, q);
  for (int i1 = 0; i1 <= q - 1; ++i1)
    for (int i2 = 0; i2 <= q - i1 - 1; ++i2) {
      const int e = 2 * q - 2 * i1 - i2;
      total += binomial(q, i1) * binomial(q - i1, i2) * std::ldexp(1.0, 3 * q - 3 * i1 - i2 - 1) * std::pow(r, e) *
               std::pow(a, e);
    }
  return total;
}

AssumptionAudit audit(const ModelSpec& m, int r, int q) {
  if (r < 2 || r % 2 != 0) throw std::invalid_argument("r must be an even integer >= 2");
  if (q < 1) throw std::invalid_argument("q must be >= 1");

  AssumptionAudit a;
  a.r = r;
  a.q = q;
  a.drift = m.drift_constants();
  a.diffusion = m.diffusion_constants();
  const auto& F = a.drift;
  const auto& B = a.diffusion;

  a.alpha_tilde_f_h = 0.5 * std::max(1.0 + 2.0 * F.one_sided_h, F.at_zero_h * F.at_zero_h);
  a.alpha_tilde_f_dm2 = 0.5 * std::max(1.0 + 2.0 * F.one_sided_dm2, F.at_zero_dm2 * F.at_zero_dm2);
  a.alpha_tilde_b_h = std::max(B.lipschitz_h, B.at_zero_h);
  a.alpha_tilde_b_dm2 = std::max(B.lipschitz_dm2, B.at_zero_dm2);

  a.r_q = moment_constant(q);
  a.r_tilde_q = moment_constant_tilde(q, a.alpha_tilde_b_h);
  a.r_tilde_2 = moment_constant_tilde(2, a.alpha_tilde_b_h);

  const double db2 = B.d1 * B.d1;
  for (int p = 1; p <= 4; ++p) a.k1[p - 1] = F.d1 + (2.0 * p - 1.0) / 2.0 * db2;
  for (int p = 1; p <= 2; ++p)
    a.k2[p - 1] = F.d1 + (p + 1.0) / 4.0 * F.d2 + (2.0 * p - 1.0) * db2 + 3.0 * (p - 1.0) / 2.0 * B.d2 * B.d2;
  a.k3 = 0.5 * F.d3 + F.d1 + 1.5 * F.d2 + 1.5 * db2;
  a.k4 = std::max({a.k1[2], a.k2[0], a.k3});
  a.k_hat = std::max({a.k1[3], a.k2[1], a.k3, 2.0 * a.k1[3] - a.k2[1]});

  const double s = m.sigma0();
  const bool vanishes_at_zero = F.at_zero_h == 0.0 && B.at_zero_h == 0.0;
  auto add = [&](std::string id, std::string text, double threshold, bool pre = true) {
    Verdict v{std::move(id), std::move(text), s, threshold, s - threshold, pre, false};
    v.holds = pre && s > threshold;
    a.verdicts.push_back(std::move(v));
  };

  const double atf0 = a.alpha_tilde_f_h, atf2 = a.alpha_tilde_f_dm2;
  const double atb0 = a.alpha_tilde_b_h, atb2 = a.alpha_tilde_b_dm2;
  const double af0 = F.one_sided_h, ab0 = B.lipschitz_h;

  add("exact_moments", "sigma0 > 2 a~F0 + 2 (r-1) a~B0^2", 2.0 * atf0 + 2.0 * (r - 1) * atb0 * atb0);
  add("exact_stability", "F(0)=0, B(0)=0 and sigma0 > aF0 + aB0^2 / 2", af0 + 0.5 * ab0 * ab0, vanishes_at_zero);
  add("exact_dm2_bound", "sigma0 > a~F2 + a~B2^2", atf2 + atb2 * atb2);
  add("exact_contraction", "sigma0 > aF0 + aB0^2 / 2", af0 + 0.5 * ab0 * ab0);
  add("exact_ergodicity", "sigma0 > 2 a~F0 + 2 (r-1) a~B0^2", 2.0 * atf0 + 2.0 * (r - 1) * atb0 * atb0);
  add("numerical_moments", "sigma0 > a~F0 + R~q / q", atf0 + a.r_tilde_q / q);
  add("numerical_stability", "F(0)=0, B(0)=0 and sigma0 > aF0 + aB0^2", af0 + ab0 * ab0, vanishes_at_zero);
  add("numerical_contraction", "sigma0 > aF0 + aB0^2", af0 + ab0 * ab0);
  add("numerical_invariant_measure", "sigma0 > a~F0 + 2 a~B0^2", atf0 + 2.0 * atb0 * atb0);
  add("numerical_dm2_bound", "sigma0 > a~F2 + 2 a~B2^2", atf2 + 2.0 * atb2 * atb2);
  add("tangent_decay", "sigma0 > K1(1)", a.k1[0]);
  add("kolmogorov_regularity", "sigma0 > K^ = max{K4(1), K2(2), K(3), 2 K4(1) - K2(2)}", a.k_hat);
  // With g -> 2 and g~ -> 1 the first two terms tend to K(4) and 2 K1(2); the
  // open ranges make this limit the weakest admissible threshold.
  add("weak_order",
      "sigma0 > max{2 K(4)/(3g-4), 2 K1(2)/(g~+2g-4), K^, a~F2 + 2 a~B2^2, 2 a~F0 + R~2/2} "
      "(infimum over g in (1,2), g~ in (0,1))",
      std::max({a.k4, 2.0 * a.k2[0], a.k_hat, atf2 + 2.0 * atb2 * atb2, 2.0 * atf0 + 0.5 * a.r_tilde_2}));
  return a;
}

}  // namespace smx
