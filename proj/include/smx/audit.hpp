#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "smx/model.hpp"

namespace smx {

/// One hypothesis of the form sigma0 > threshold, possibly with a structural
/// precondition (e.g. F(0) = 0) that must also hold.
struct Verdict {
  std::string id;
  std::string inequality;
  double value = 0.0;
  double threshold = 0.0;
  double margin = 0.0;  // value - threshold
  bool precondition = true;
  bool holds = false;
};

struct AssumptionAudit {
  int r = 2;
  int q = 1;
  DriftConstants drift;
  DiffusionConstants diffusion;

  double alpha_tilde_f_h = 0.0;
  double alpha_tilde_f_dm2 = 0.0;
  double alpha_tilde_b_h = 0.0;
  double alpha_tilde_b_dm2 = 0.0;

  double r_q = 0.0;        // R_q
  double r_tilde_q = 0.0;  // R~_q
  double r_tilde_2 = 0.0;  // R~_2, used by the weak-order condition

  std::array<double, 4> k1{};  // K_p^(1), p = 1..4
  std::array<double, 2> k2{};  // K_p^(2), p = 1, 2
  double k3 = 0.0;
  double k4 = 0.0;
  double k_hat = 0.0;

  std::vector<Verdict> verdicts;

  const Verdict& verdict(std::string_view id) const;
  bool holds(std::string_view id) const { return verdict(id).holds; }
};

// R_q; R_1 is taken as 0 (the q = 1 case involves no such term).
double moment_constant(int q);
// R~_q for a given alpha~_{B,0}.
double moment_constant_tilde(int q, double alpha_tilde_b_h);

// r: even moment order for the exact-solution statements; q: moment order for
// the numerical ones.
AssumptionAudit audit(const ModelSpec& m, int r, int q);

}  // namespace smx
