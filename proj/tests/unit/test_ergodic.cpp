#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "smx/ergodic.hpp"

using namespace smx;
using smx::testing::decaying_state;
using smx::testing::make_model;
using doctest::Approx;

namespace {

// Stationary E|u|^2 of the scheme for the linear additive model.
double stationary_norm2(const ModelSpec& m, double dt) {
  double total = 0.0;
  for (std::size_t j = 0; j < m.modes(); ++j) {
    const double a = 1.0 + m.sigma0() * dt, b = m.spectrum()[j] * dt;
    const double g = 1.0 / (a * a + b * b);
    const double lam = m.diffusion().amplitude;
    total += g * 2.0 * lam * lam * m.covariance().eigenvalues()[j] * dt / (1.0 - g);
  }
  return total;
}

const ModelSpec kLinear = make_model(1.0, DriftFamily::zero, 0, DiffusionFamily::additive, 0.8, 3, 3, 2.0);

}  // namespace

TEST_CASE("time average of a quadratic matches the discrete stationary law") {
  const double dt = 1.0 / 16;
  const auto bm = invariant_mean(kLinear, Functional::norm2_capped(), StateVector(3), dt, 4000.0, 20.0, 20, {1});
  const double exact = stationary_norm2(kLinear, dt);
  CHECK(std::abs(bm.summary.mean - exact) <= 3.0 * bm.summary.se);
  CHECK(bm.ci_low < bm.ci_high);
}

TEST_CASE("invariant-measure error") {
  InvariantErrorOptions o;
  o.dt_ref = 1.0 / 64;
  o.depths = {0, 3, 2};
  o.horizon = 400.0;
  o.burn_in = 10.0;
  const auto rep = invariant_measure_error(kLinear, Functional::norm2_capped(), StateVector(3), o, {2});
  REQUIRE(rep.lanes.size() == 3);
  CHECK(rep.lanes[0].error == 0.0);
  // For this model the stationary gap is known exactly per step size.
  for (std::size_t i = 1; i < 3; ++i) {
    const auto& l = rep.lanes[i];
    const double exact = stationary_norm2(kLinear, l.dt) - stationary_norm2(kLinear, o.dt_ref);
    CHECK(std::abs(l.difference.summary.mean - exact) <= 3.0 * l.difference.summary.se);
  }
  o.depths = {};
  CHECK_THROWS(invariant_measure_error(kLinear, Functional::norm2_capped(), StateVector(3), o));
}

TEST_CASE("SLLN") {
  const std::vector<std::uint64_t> ks{100, 1000, 10000};
  const auto flat = slln_check(kLinear, Functional::cos_pairing(StateVector(3)), StateVector(3), 1.0 / 8, ks, 8);
  for (double s : flat.spread) CHECK(s == 0.0);
  CHECK(flat.pooled_mean[0] == 1.0);

  const double dt = 1.0 / 8;
  const auto rep = slln_check(kLinear, Functional::norm2_capped(), StateVector(3), dt, ks, 32, {3});
  CHECK(rep.shrinking);
  CHECK(rep.spread.back() < rep.spread.front());
  const auto last = estimate(rep.averages.back());
  CHECK(std::abs(last.mean - stationary_norm2(kLinear, dt)) <= 4.0 * last.se + 0.02 * stationary_norm2(kLinear, dt));
}

TEST_CASE("CLT statistic") {
  CHECK(clt_steps(1.0 / 64, 0.25) == 512);
  const auto u0 = decaying_state(3, 0.5, 1.0);
  const auto flat = clt_statistic(kLinear, Functional::cos_pairing(StateVector(3)), u0, 1.0 / 8, 0.25, 10, 1.0, 1.0, 0.0);
  for (double z : flat.zeta) CHECK(z == 0.0);

  const auto det = make_model(1.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::zero, 0, 3, 3);
  const auto d = clt_statistic(det, Functional::exp_neg_norm2(), u0, 1.0 / 8, 0.25, 6, 0.9, 1.0, 1.0);
  for (double z : d.zeta) CHECK(z == d.zeta[0]);

  CHECK_THROWS(clt_statistic(kLinear, Functional::norm2_capped(), u0, 1.0 / 8, 0.75, 10, 0.0, 1.0, 0.0));
  CHECK_NOTHROW(clt_statistic(kLinear, Functional::norm2_capped(), u0, 1.0 / 8, 0.25, 10, 0.0, 1.0, 0.0));
  CHECK_NOTHROW(clt_statistic(kLinear, Functional::exp_neg_norm2(), u0, 1.0 / 8, 0.75, 10, 0.0, 1.0, 0.0));

  const auto c = clt_constraint(kLinear, Functional::exp_neg_norm2(), 0.25);
  // max(3, 5) (1 + 3) = 20
  CHECK(c.min_q == 10);
  CHECK(c.min_r == 20);
}

TEST_CASE("asymptotic variance") {
  AsymptoticVarianceOptions o;
  o.horizon = 200.0;
  o.burn_in = 5.0;
  o.batches = 20;
  o.outer_samples = 10;
  o.inner_paths = 8;
  o.relax_horizon = 3.0;
  const auto det = make_model(1.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::zero, 0, 3, 3);
  const auto zero = estimate_asymptotic_variance(det, Functional::exp_neg_norm2(), decaying_state(3), 1.0 / 8, o);
  CHECK(zero.formula.mean == 0.0);

  SUBCASE("formula and batch means agree") {
    // 200 batches put the batch-means SE near 10%
    o.horizon = 2e5;
    o.batches = 200;
    o.outer_samples = 400;
    o.inner_paths = 32;
    o.relax_horizon = 8.0;
    const auto v = estimate_asymptotic_variance(kLinear, Functional::exp_neg_norm2(), StateVector(3), 1.0 / 8, o, {4});
    CAPTURE(v.formula.mean);
    CAPTURE(v.batch_means.mean);
    CHECK(v.relative_gap <= 0.25);
  }
}
