#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "smx/functional.hpp"
#include "smx/parallel.hpp"
#include "smx/statistics.hpp"
#include "smx/summation.hpp"

using namespace smx;
using doctest::Approx;

TEST_CASE("pairwise sums") {
  std::vector<double> v(1001);
  std::iota(v.begin(), v.end(), 0.0);
  CHECK(pairwise_sum(v) == 500500.0);
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
  CHECK(pairwise_sum_squares(std::vector<double>{3.0, 4.0}) == 25.0);
  // error stays at the tree depth rather than growing with n
  std::vector<double> tenth(1 << 20, 0.1);
  CHECK(std::abs(pairwise_sum(tenth) - 0.1 * (1 << 20)) < 1e-9);
}

TEST_CASE("estimates") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto e = estimate(x);
  CHECK(e.mean == 2.5);
  CHECK(e.variance == Approx(5.0 / 3.0));
  CHECK(e.se == Approx(std::sqrt(5.0 / 12.0)));
  CHECK(e.n == 4);
}

TEST_CASE("order fits") {
  const std::vector<double> dt{0.1, 0.05, 0.025};
  CHECK(fit_order(dt, std::vector<double>{0.2, 0.1, 0.05}).slope == Approx(1.0));
  CHECK(fit_order(dt, std::vector<double>{0.2, 0.1414, 0.1}).slope == Approx(0.5).epsilon(1e-3));
  const auto f = fit_order(dt, std::vector<double>{0.2, 0.1, 0.05});
  REQUIRE(f.pairwise.size() == 2);
  CHECK(f.pairwise[0] == Approx(1.0));
  CHECK_THROWS(fit_order(std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{1.0, 1.0, 1.0}));
  CHECK_THROWS(fit_order(std::vector<double>{0.1, 0.05}, std::vector<double>{1.0, 0.5}));
  CHECK_THROWS(fit_order(dt, std::vector<double>{0.2, 0.0, 0.05}));
}

TEST_CASE("least squares") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = least_squares(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.max_residual == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("KS machinery") {
  CHECK(ks_critical_value(200, 0.01) == Approx(1.6276 / (std::sqrt(200.0) + 0.12 + 0.11 / std::sqrt(200.0))).epsilon(1e-4));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> good(2000), bad(2000);
  for (auto& v : good) v = n(rng);
  for (auto& v : bad) v = 0.5 + n(rng);
  CHECK(ks_distance_normal(good) < ks_critical_value(2000, 0.01));
  CHECK(ks_distance_normal(bad) > ks_critical_value(2000, 0.01));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(student_t_quantile(0.975, 1e6) == Approx(1.959964).epsilon(1e-5));
}

TEST_CASE("batch means") {
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = double(i % 10);
  const auto b = batch_means(s, 20);
  CHECK(b.batches.size() == 20);
  CHECK(b.summary.mean == 4.5);
  CHECK(b.summary.se == 0.0);
  CHECK(b.ci_low == 4.5);
  CHECK_THROWS(batch_means(std::vector<double>(5), 20));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  int covered = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<double> x(400);
    for (auto& v : x) v = n(rng);
    const auto bm = batch_means(x, 20, 0.95);
    covered += bm.ci_low <= 0.0 && 0.0 <= bm.ci_high;
  }
  CHECK(covered >= 360);  // nominal 380
}

TEST_CASE("functionals") {
  const StateVector u{{0.3, -0.4}, {0.0, 1.2}};
  const auto e = Functional::exp_neg_norm2();
  CHECK(e(u) == Approx(std::exp(-norm_squared(u))));
  const auto w = power_law_direction(2, 2.0);
  CHECK(norm(w) == Approx(1.0));
  CHECK(w.e(1) == Approx(w.e(0) / 4.0));
  const auto c = Functional::cos_pairing(w);
  CHECK(c(u) == Approx(std::cos(inner(u, w))));
  const auto q = Functional::norm2_capped(1.0);
  CHECK(q(u) == 1.0);
  CHECK(Functional::norm2_capped()(u) == Approx(norm_squared(u)));
  CHECK(e.smooth_bounded());
  CHECK(!q.smooth_bounded());
  CHECK(Functional::norm2_capped().growth_exponent() == 4.0);
  CHECK(parse_functional_family("cos_pairing") == FunctionalFamily::cos_pairing);

  std::mt19937_64 rng(3);
  for (const auto& f : {e, c, Functional::norm2_capped()}) {
    for (int i = 0; i < 20; ++i) {
      const auto x = testing::random_state(rng, 2, 0.5), h = testing::random_state(rng, 2);
      const double eps = 1e-6;
      const double fd = (f(x + eps * h) - f(x - eps * h)) / (2 * eps);
      CHECK(inner(f.gradient(x), h) == Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("parallel loop") {
  std::vector<double> serial(1000), parallel(1000);
  auto body = [](std::vector<double>& out) {
    return [&out](std::size_t i) { out[i] = std::sin(double(i)) * std::exp(-1e-3 * double(i)); };
  };
  for_each_index(1000, Execution::serial, body(serial));
  set_thread_count(4);
  for_each_index(1000, Execution::parallel, body(parallel));
  set_thread_count(0);
  CHECK(serial == parallel);
  CHECK(pairwise_sum(serial) == pairwise_sum(parallel));

  SUBCASE("lowest failing index wins") {
    for (auto policy : {Execution::serial, Execution::parallel}) {
      try {
        for_each_index(100, policy, [](std::size_t i) {
          if (i % 7 == 3) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
      } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "3");
      }
    }
  }
}
