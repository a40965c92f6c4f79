#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "smx/analysis.hpp"
#include "smx/parallel.hpp"

using namespace smx;
using smx::testing::decaying_state;
using smx::testing::make_model;
using doctest::Approx;

namespace {

// |r|^2 for the resolvent block of frequency mu.
double gain2(double sigma0, double mu, double dt) {
  const double a = 1.0 + sigma0 * dt, b = mu * dt;
  return 1.0 / (a * a + b * b);
}

}  // namespace

TEST_CASE("deterministic moment decay") {
  const auto m = make_model(2.0, DriftFamily::zero, 0, DiffusionFamily::zero, 0, 1, 1);
  const StateVector u0{{0.6, 0.8}};
  const double dt = 0.01;
  const auto s = moment_series(m, u0, dt, 200, 1, 4, 20, GraphOrder(0), {}, 2);
  REQUIRE(s.t.size() == 11);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    CHECK(s.moment[i].mean == Approx(std::pow(1.0 + 2.0 * dt, -2.0 * double(s.step[i]))).epsilon(1e-13));
    CHECK(s.moment[i].se == 0.0);
  }
  const auto sl = stability_slope(s, 1.0);
  CHECK(sl.slope == Approx(-2.0 * std::log1p(2.0 * dt) / dt).epsilon(1e-10));
  CHECK(sl.slope <= -2.0 * 2.0 * (1.0 - 2.0 * dt));

  const std::vector<double> t{0, 1, 2, 3}, flat{5, 5, 5, 5};
  CHECK(stability_slope(t, flat, 1.0).slope == Approx(0.0));
}

TEST_CASE("stationary second moment of the linear additive model") {
  const double sigma0 = 1.0, lambda = 0.8, dt = 1.0 / 16;
  const auto m = make_model(sigma0, DriftFamily::zero, 0, DiffusionFamily::additive, lambda, 4, 4, 2.0);
  const std::uint64_t steps = 128;
  const auto s = moment_series(m, StateVector(4), dt, steps, 1, 4000, 32, GraphOrder(0), {77});
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    double expect = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double g = gain2(sigma0, m.spectrum()[j], dt);
      const double q = m.covariance().eigenvalues()[j];
      // E|z_{k+1}|^2 = g (E|z_k|^2 + 2 lambda^2 q dt)
      const double fixed = g * 2.0 * lambda * lambda * q * dt / (1.0 - g);
      expect += fixed * (1.0 - std::pow(g, double(s.step[i])));
    }
    CHECK(std::abs(s.moment[i].mean - expect) <= 3.5 * s.moment[i].se + 1e-15);
    CHECK(s.moment[i].mean >= 0.0);
  }
}

TEST_CASE("Ito isometry through the scheme") {
  // F = 0, constant B: <u_N, w> is Gaussian with an explicit variance.
  const double sigma0 = 0.5, lambda = 1.0, dt = 1.0 / 8;
  const std::size_t modes = 3, R = 20000;
  const int N = 8;
  const auto m = make_model(sigma0, DriftFamily::zero, 0, DiffusionFamily::additive, lambda, modes, modes, 2.0);
  const StateVector w{{1.0, 0.5}, {-0.3, 0.7}, {0.2, 0.2}};
  const auto cs = CoupledStepper::for_levels(m, 1.0, std::vector<int>{3});
  std::vector<double> x(R);
  for_each_index(R, Execution::parallel, [&](std::size_t r) {
    std::vector<StateVector> st{StateVector(modes)};
    cs.run(st, {123, r, 0}, N);
    x[r] = inner(st[0], w);
  });
  double var = 0.0;
  for (std::size_t j = 0; j < modes; ++j) {
    const double a = 1.0 + sigma0 * dt, b = m.spectrum()[j] * dt;
    const std::complex<double> r = 1.0 / std::complex<double>(a, b);
    const std::complex<double> wc(w.e(j), w.h(j));
    for (int p = 1; p <= N; ++p) {
      const double c = std::real(std::pow(r, p) * std::complex<double>(1.0, 1.0) * std::conj(wc));
      var += lambda * lambda * m.covariance().eigenvalues()[j] * dt * c * c;
    }
  }
  const auto e = estimate(x);
  CHECK(std::abs(e.variance - var) <= 3.0 * var * std::sqrt(2.0 / (R - 1)));
  CHECK(std::abs(e.mean) <= 4.0 * e.se);
}

TEST_CASE("convergence studies") {
  const auto m = make_model(3.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::multiplicative_bounded, 0.5);
  const auto u0 = decaying_state(8, 1.0, 1.0);
  const std::vector<int> same{5};
  CHECK(strong_error(m, u0, same, 5, 1.0, 8).error[0] == 0.0);
  CHECK(weak_error(m, u0, Functional::exp_neg_norm2(), same, 5, 1.0, 8).error[0] == 0.0);
  CHECK_THROWS(strong_error(m, u0, std::vector<int>{3, 9}, 8, 1.0, 8));

  SUBCASE("deterministic linear model is order one") {
    const auto lin = make_model(2.0, DriftFamily::linear_damp, 0.5, DiffusionFamily::zero, 0);
    // smooth data, so every mode is resolved (mu dt < 1) on the coarsest level
    const auto smooth = decaying_state(8, 1.0, 4.0);
    const std::vector<int> levels{6, 7, 8, 9};
    const auto st = strong_error(lin, smooth, levels, 15, 1.0, 2);
    REQUIRE(st.fit);
    CHECK(st.fit->slope == Approx(1.0).epsilon(0.05));
    const auto wk = weak_error(lin, smooth, Functional::norm2_capped(), levels, 15, 1.0, 2);
    REQUIRE(wk.fit);
    CHECK(wk.fit->slope == Approx(1.0).epsilon(0.05));
  }
  SUBCASE("weak order is not below strong order") {
    const std::vector<int> levels{2, 3, 4, 5};
    const auto st = strong_error(m, u0, levels, 9, 1.0, 400, {3});
    const auto wk = weak_error(m, u0, Functional::exp_neg_norm2(), levels, 9, 1.0, 400, {3});
    REQUIRE(st.fit);
    REQUIRE(wk.fit);
    CHECK(wk.fit->slope >= st.fit->slope - 0.1);
    CHECK(st.flags.empty());
  }
  SUBCASE("reference close to the finest level is flagged") {
    const auto st = strong_error(m, u0, std::vector<int>{2, 3, 4}, 5, 1.0, 4);
    CHECK(!st.flags.empty());
  }
}

TEST_CASE("serial and parallel execution agree") {
  const auto m = make_model(3.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::multiplicative_bounded, 0.5);
  const auto u0 = decaying_state(8, 1.0, 1.0);
  const std::vector<int> levels{2, 3, 4};
  RunOptions serial{9, Execution::serial}, parallel{9, Execution::parallel};
  set_thread_count(3);
  const auto a = weak_error(m, u0, Functional::exp_neg_norm2(), levels, 6, 1.0, 101, serial);
  const auto b = weak_error(m, u0, Functional::exp_neg_norm2(), levels, 6, 1.0, 101, parallel);
  const auto sa = moment_series(m, u0, 1.0 / 32, 64, 1, 45, 8, GraphOrder(2), serial);
  const auto sb = moment_series(m, u0, 1.0 / 32, 64, 1, 45, 8, GraphOrder(2), parallel);
  set_thread_count(0);
  CHECK(a.error == b.error);
  CHECK(a.error_se == b.error_se);
  for (std::size_t i = 0; i < sa.moment.size(); ++i) CHECK(sa.moment[i].mean == sb.moment[i].mean);
}

TEST_CASE("contraction and tangent moments") {
  const auto m = make_model(3.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::multiplicative_bounded, 0.5);
  const auto u0 = decaying_state(8, 1.0, 1.0);
  const auto same = contraction_series(m, u0, u0, 1.0 / 64, 64, 10, 8);
  for (const auto& d : same.distance) CHECK(d.mean == 0.0);
  const auto none = tangent_moment(m, u0, StateVector(8), 1.0 / 64, 64, 10);
  CHECK(none.norm2.mean == 0.0);

  const auto v0 = -1.0 * u0;
  const auto c = contraction_series(m, u0, v0, 1.0 / 64, 256, 200, 32, {4});
  const auto fc = m.drift_constants();
  const auto bc = m.diffusion_constants();
  const double rate = 3.0 - fc.one_sided_h - bc.lipschitz_h * bc.lipschitz_h;
  for (std::size_t i = 0; i < c.t.size(); ++i)
    CHECK(c.distance[i].mean <= c.initial * std::exp(-rate * c.t[i]) * (1.0 + 1e-12) + 3.0 * c.distance[i].se);
}
