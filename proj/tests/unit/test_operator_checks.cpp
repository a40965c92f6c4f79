#include <doctest.h>

#include <cmath>

#include "smx/operator_checks.hpp"
#include "smx/spectral.hpp"

using namespace smx;
using doctest::Approx;

namespace {

const ModeSpectrum kSpec = ModeSpectrum::arithmetic(64, M_PI, 1.0);

}  // namespace

TEST_CASE("step-size thresholds") {
  const auto t = compute_dt_threshold(1.0, 1.0);
  CHECK(!t.capped);
  CHECK(t.residual < 1e-10);
  CHECK(1.0 / (1.0 + 2.0 * t.value) == Approx(std::exp(-t.value)).epsilon(1e-10));
  // root of log(1 + 2y) = y
  CHECK(t.value == Approx(1.2564312086261697).epsilon(1e-10));

  const auto tiny = compute_dt_threshold(1.0, 1e-9, ThresholdKind::squared_resolvent, 1e3);
  CHECK(tiny.capped);
  CHECK(tiny.value == 1e3);

  double prev = std::numeric_limits<double>::infinity();
  for (double g = 0.1; g < 2.0; g += 0.1) {
    const double v = compute_dt_threshold(2.0, g).value;
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS(compute_dt_threshold(1.0, 2.0));
  CHECK_THROWS(compute_dt_threshold(1.0, 1.0, ThresholdKind::resolvent));
  CHECK(compute_dt_threshold(1.0, 0.5, ThresholdKind::resolvent).residual < 1e-10);
}

TEST_CASE("resolvent decay") {
  const auto r = verify_resolvent_decay(ModeSpectrum({0.0}), 1.0, 1.0, {0.1}, 10);
  CHECK(r.points.front().margin == 0.0);  // k = 0
  CHECK(r.points.back().observed == Approx(std::pow(1.1, -10)));
  CHECK(r.points.back().bound == Approx(std::exp(-0.5)));
  CHECK(r.pass);

  for (double s0 : {1.0, 3.0})
    for (double g : {1.2, 1.8}) CHECK(verify_resolvent_decay(kSpec, s0, g, default_dt_grid(), 4096).pass);

  SUBCASE("grid entries above the threshold are reported as skipped") {
    const auto big = verify_resolvent_decay(kSpec, 3.0, 1.8, {1.0, 1.0 / 64}, 8);
    CHECK(big.skipped_dt == std::vector<double>{1.0});
  }
}

TEST_CASE("the bound is sharp at the resolvent threshold for g/2") {
  // The zero mode attains the norm, so e^{-(g/2) k sigma0 dt} fails exactly
  // when 1/(1 + sigma0 dt) > e^{-(g/2) sigma0 dt}.
  const ModeSpectrum zero({0.0});
  for (double s0 : {1.0, 3.0}) {
    const double g = 1.95;
    const double sharp = compute_dt_threshold(s0, g / 2.0, ThresholdKind::resolvent).value;
    const double squared = compute_dt_threshold(s0, g).value;
    CHECK(squared <= sharp);
    for (long k : {1L, 10L, 1000L}) {
      auto margin = [&](double dt) {
        return std::exp(-0.5 * g * double(k) * s0 * dt) - operator_norm_resolvent_power(zero, s0, dt, k, GraphOrder(0));
      };
      CHECK(margin(sharp * 0.999) >= 0.0);
      CHECK(margin(sharp * 1.001) < 0.0);
    }
  }
}

TEST_CASE("semigroup Lipschitz") {
  std::vector<double> t;
  for (int i = 0; i <= 1000; ++i) t.push_back(0.01 * i);
  for (double s0 : {1.0, 3.0}) {
    const auto r = verify_semigroup_lipschitz(kSpec, s0, t);
    CHECK(r.pass);
    CHECK(r.points.front().observed == 0.0);
    CHECK(r.fitted_constant <= s0 + 1.0);
  }
  const auto z = verify_semigroup_lipschitz(ModeSpectrum({0.0}), 2.0, {0.5});
  CHECK(z.points[0].observed == Approx(1.0 - std::exp(-1.0)));
  CHECK(z.points[0].observed <= 2.0 * 0.5);
}

TEST_CASE("resolvent-semigroup error") {
  CHECK(resolvent_semigroup_error_norm(kSpec, 3.0, 0.1, 0, 0.0) == 0.0);

  SUBCASE("scalar mode against the Taylor constant sigma0 / (e g~)") {
    const ModeSpectrum zero({0.0});
    for (double s0 : {1.0, 3.0})
      for (double gt : {0.5, 0.9}) {
        const double th = compute_dt_threshold(s0, gt, ThresholdKind::resolvent).value;
        const double c = s0 / (std::exp(1.0) * gt);
        for (double dt : default_dt_grid()) {
          if (dt > th) continue;
          for (long k = 0; k <= 4096; ++k) {
            const double err = resolvent_semigroup_error_norm(zero, s0, dt, k, double(k) * dt);
            CHECK(err <= c * dt * std::exp(-0.5 * gt * double(k) * s0 * dt) * (1.0 + 1e-12));
          }
        }
      }
  }

  SUBCASE("halving the step halves the worst error") {
    for (double s0 : {1.0, 3.0}) {
      double prev = 0.0;
      for (int e = 5; e <= 9; ++e) {
        const double dt = std::ldexp(1.0, -e);
        double worst = 0.0;
        for (long k = 0; double(k) * dt <= 4.0; ++k)
          worst = std::max(worst, resolvent_semigroup_error_norm(kSpec, s0, dt, k, double(k) * dt));
        if (prev > 0.0) CHECK(prev / worst == Approx(2.0).epsilon(0.1));
        prev = worst;
      }
    }
  }

  SUBCASE("fit then freeze") {
    const auto grid = default_dt_grid();
    const auto r = verify_resolvent_semigroup_error(kSpec, 3.0, 0.9, {grid[2]}, {grid[2]}, 256);
    CHECK(r.pass);  // fit and check on one grid: the fitted constant is attained
    CHECK(r.worst_margin == Approx(0.0).scale(1.0));
    CHECK(r.fitted_constant > 0.0);
  }
}
