#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "smx/integrator.hpp"
#include "smx/mlmc.hpp"

using namespace smx;
using smx::testing::decaying_state;
using smx::testing::make_model;
using doctest::Approx;

TEST_CASE("sample schedule") {
  const auto p = sample_schedule(2, 3, 0.5);
  CHECK(p.samples == std::vector<std::uint64_t>{1024, 128, 182, 167});
  CHECK(p.finest_level() == 5);
  for (double eps : {0.1, 0.5, 2.0}) CHECK(sample_schedule(3, 1, eps).samples[1] == 16);
  const auto q = sample_schedule(2, 12, 0.5);
  for (std::size_t l = 3; l + 1 < q.samples.size(); ++l) CHECK(q.samples[l + 1] < q.samples[l]);
  CHECK_THROWS(sample_schedule(20, 20, 0.5));
  CHECK_THROWS(sample_schedule(2, 0, 0.5));
  CHECK_THROWS(sample_schedule(2, 2, 0.0));
}

TEST_CASE("zeta") {
  CHECK(zeta(2.0) == Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
  CHECK(zeta(1.5) == Approx(2.6123753486854883).epsilon(1e-14));
  CHECK(mlmc_statistical_factor(1.0) == Approx(std::sqrt(1.0 + M_PI * M_PI / 6.0)));
  CHECK_THROWS(zeta(1.0));
}

TEST_CASE("deterministic model telescopes to the finest level") {
  const auto m = make_model(2.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::zero, 0);
  const auto u0 = decaying_state(8, 1.0, 1.0);
  const auto phi = Functional::exp_neg_norm2();
  const auto plan = sample_schedule(1, 3, 0.5);
  const auto res = mlmc_estimate(m, phi, u0, plan);
  const auto again = mlmc_estimate(m, phi, u0, plan);
  CHECK(res.estimate == again.estimate);
  auto u = u0;
  const Stepper s(m, 1.0 / 16);
  auto ws = s.workspace();
  for (int k = 0; k < 16; ++k) s.advance(u, std::vector<double>(8), ws);
  CHECK(res.estimate == Approx(phi(u)).epsilon(1e-12));
  for (std::size_t l = 1; l < res.levels.size(); ++l) CHECK(res.levels[l].variance == 0.0);
  for (const auto& st : level_variance_profile(m, phi, u0, 1, 3, 8)) CHECK(st.variance == 0.0);
}

TEST_CASE("one correction with many samples approaches plain Monte Carlo") {
  const auto m = make_model(3.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::multiplicative_bounded, 0.5);
  const auto u0 = decaying_state(8, 1.0, 1.0);
  const auto phi = Functional::exp_neg_norm2();
  const auto level0 = mlmc_level(m, phi, u0, 2, 0, 1.0, 20000, {5});
  const auto level1 = mlmc_level(m, phi, u0, 2, 1, 1.0, 20000, {5});
  const auto plain = plain_estimate(m, phi, u0, 3, 1.0, 20000, 900, {6});
  const double est = level0.mean + level1.mean;
  const double se = std::sqrt(level0.variance / 20000 + level1.variance / 20000 + plain.se * plain.se);
  CHECK(std::abs(est - plain.mean) <= 4.0 * se);
  CHECK(level1.cost == 20000u * (8 + 4));

  SUBCASE("same-level marginals agree across independent streams") {
    const auto a = plain_estimate(m, phi, u0, 3, 1.0, 20000, 901, {6});
    CHECK(std::abs(a.mean - plain.mean) <= 3.0 * std::hypot(a.se, plain.se));
  }
}

TEST_CASE("correction variance decays with the level") {
  const auto m = make_model(3.0, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::multiplicative_bounded, 0.5);
  const auto prof = level_variance_profile(m, Functional::exp_neg_norm2(), decaying_state(8, 1.0, 1.0), 2, 3, 4000, 1.0, {7});
  REQUIRE(prof.size() == 3);
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].variance < prof[i - 1].variance);
}
