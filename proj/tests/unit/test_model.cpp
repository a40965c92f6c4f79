#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "smx/audit.hpp"
#include "smx/noise.hpp"

using namespace smx;
using smx::testing::make_model;
using smx::testing::random_state;
using doctest::Approx;

namespace {

std::vector<double> random_increment(std::mt19937_64& rng, const ModelSpec& m, double dt = 0.01) {
  std::normal_distribution<double> n(0.0, std::sqrt(dt));
  std::vector<double> z(m.noise_modes());
  for (auto& v : z) v = n(rng);
  return q_scale(z, m.covariance());
}

const DriftFamily kDrifts[] = {DriftFamily::zero, DriftFamily::linear_damp, DriftFamily::bounded_smooth};
const DiffusionFamily kDiffusions[] = {DiffusionFamily::zero, DiffusionFamily::additive,
                                       DiffusionFamily::multiplicative_bounded};

}  // namespace

TEST_CASE("drift values") {
  std::mt19937_64 rng(1);
  const auto u = random_state(rng, 8);
  CHECK(norm(drift_eval(u, make_model(1, DriftFamily::zero, 0, DiffusionFamily::zero, 0))) == 0.0);
  CHECK(norm(drift_eval(StateVector(8), make_model(1, DriftFamily::bounded_smooth, 1, DiffusionFamily::zero, 0))) == 0.0);
  StateVector half(8);
  half.e(0) = 0.5;
  CHECK(drift_eval(half, make_model(1, DriftFamily::bounded_smooth, 2, DiffusionFamily::zero, 0)).e(0) ==
        Approx(0.92423).epsilon(1e-5));
  const auto lin = make_model(1, DriftFamily::linear_damp, -0.7, DiffusionFamily::zero, 0);
  CHECK(drift_jacobian_apply(u, half, lin) == -0.7 * half);
}

TEST_CASE("diffusion values") {
  std::mt19937_64 rng(2);
  const auto add = make_model(1, DriftFamily::zero, 0, DiffusionFamily::additive, 0.3);
  const auto dw = random_increment(rng, add);
  const auto u = random_state(rng, 8), v = random_state(rng, 8);
  CHECK(diffusion_apply(u, dw, add) == diffusion_apply(v, dw, add));
  CHECK(norm(diffusion_jacobian_apply(u, v, dw, add)) == 0.0);
  CHECK(norm(diffusion_apply(u, dw, make_model(1, DriftFamily::zero, 0, DiffusionFamily::zero, 0))) == 0.0);
  const auto mul = make_model(1, DriftFamily::zero, 0, DiffusionFamily::multiplicative_bounded, 0.3);
  CHECK(norm(diffusion_apply(StateVector(8), dw, mul)) == 0.0);

  // HS norm of the additive operator: lambda (sum 2 q_k)^{1/2}
  double two_q = 0.0;
  for (double q : add.covariance().eigenvalues()) two_q += 2.0 * q;
  CHECK(hs_norm_diffusion(u, GraphOrder(0), add) == Approx(0.3 * std::sqrt(two_q)));
  CHECK(hs_norm_diffusion(v, GraphOrder(0), add) == Approx(0.3 * std::sqrt(two_q)));
  CHECK(hs_norm_diffusion(u, GraphOrder(0), make_model(1, DriftFamily::zero, 0, DiffusionFamily::zero, 0)) == 0.0);
}

TEST_CASE("noise modes beyond the field modes are ignored, and vice versa") {
  std::mt19937_64 rng(3);
  const auto wide = make_model(1, DriftFamily::zero, 0, DiffusionFamily::additive, 1.0, 4, 6);
  const auto dw = random_increment(rng, wide);
  const auto out = diffusion_apply(StateVector(4), dw, wide);
  for (std::size_t j = 0; j < 4; ++j) CHECK(out.e(j) == dw[j]);
  const auto narrow = make_model(1, DriftFamily::zero, 0, DiffusionFamily::additive, 1.0, 6, 4);
  const auto out2 = diffusion_apply(StateVector(6), random_increment(rng, narrow), narrow);
  CHECK(out2.e(5) == 0.0);
  CHECK_THROWS_AS(diffusion_apply(StateVector(6), dw, narrow), DimensionError);
}

TEST_CASE("structural constants hold on random pairs") {
  std::mt19937_64 rng(4);
  for (auto fd : kDrifts)
    for (auto bd : kDiffusions) {
      const auto m = make_model(2.0, fd, 0.8, bd, 0.6);
      const auto fc = m.drift_constants();
      const auto bc = m.diffusion_constants();
      CAPTURE(to_string(fd));
      CAPTURE(to_string(bd));
      for (int i = 0; i < 1000; ++i) {
        const auto u = random_state(rng, 8, 2.0), v = random_state(rng, 8, 2.0);
        const auto d = u - v;
        for (int rho : {0, 2}) {
          const GraphOrder g(rho);
          const double alpha_f = rho == 0 ? fc.one_sided_h : fc.one_sided_dm2;
          const double dd = graph_norm(d, m.spectrum(), g);
          CHECK(graph_inner(d, drift_eval(u, m) - drift_eval(v, m), m.spectrum(), g) <=
                alpha_f * dd * dd * (1.0 + 1e-12) + 1e-12);
          // B(u) - B(v) is again a stencil operator: compare HS norms per mode.
          double hs2 = 0.0;
          for (std::size_t j = 0; j < m.coupled_modes(); ++j) {
            const auto [ue, uh] = diffusion_stencil(u, j, m);
            const auto [ve, vh] = diffusion_stencil(v, j, m);
            hs2 += m.covariance().eigenvalues()[j] * ((ue - ve) * (ue - ve) + (uh - vh) * (uh - vh)) *
                   graph_weight_squared(m.spectrum()[j], g);
          }
          const double alpha_b = rho == 0 ? bc.lipschitz_h : bc.lipschitz_dm2;
          CHECK(std::sqrt(hs2) <= alpha_b * dd * (1.0 + 1e-12) + 1e-15);
        }
        if (fd == DriftFamily::bounded_smooth)
          CHECK(graph_norm(drift_eval(u, m), m.spectrum(), GraphOrder(2)) <=
                fc.growth_dm2 * graph_norm(u, m.spectrum(), GraphOrder(2)) + 1e-12);
        const auto a = audit(m, 2, 1);
        for (int rho : {0, 2}) {
          const double bound = rho == 0 ? a.alpha_tilde_b_h : a.alpha_tilde_b_dm2;
          CHECK(hs_norm_diffusion(u, GraphOrder(rho), m) <=
                bound * (1.0 + graph_norm(u, m.spectrum(), GraphOrder(rho))) + 1e-12);
        }
      }
    }
}

TEST_CASE("jacobians match central differences") {
  std::mt19937_64 rng(5);
  for (auto fd : kDrifts)
    for (auto bd : kDiffusions) {
      const auto m = make_model(2.0, fd, 0.8, bd, 0.6);
      for (int i = 0; i < 20; ++i) {
        const auto u = random_state(rng, 8), h = random_state(rng, 8);
        const auto dw = random_increment(rng, m, 0.1);
        double prev_f = 0.0, prev_b = 0.0;
        for (double eps : {1e-4, 1e-5}) {
          const auto fd_f = (1.0 / (2.0 * eps)) * (drift_eval(u + eps * h, m) - drift_eval(u - eps * h, m));
          const auto fd_b =
              (1.0 / (2.0 * eps)) * (diffusion_apply(u + eps * h, dw, m) - diffusion_apply(u - eps * h, dw, m));
          const double ef = norm(fd_f - drift_jacobian_apply(u, h, m));
          const double eb = norm(fd_b - diffusion_jacobian_apply(u, h, dw, m));
          CHECK(ef <= 10.0 * eps * eps * norm(h) + 1e-9);
          CHECK(eb <= 10.0 * eps * eps * norm(h) + 1e-9);
          prev_f = ef;
          prev_b = eb;
        }
        (void)prev_f;
        (void)prev_b;
      }
    }
}

TEST_CASE("model identity") {
  const auto a = make_model(3, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::additive, 0.5);
  const auto b = make_model(3, DriftFamily::bounded_smooth, 0.5, DiffusionFamily::additive, 0.5);
  CHECK(a.hash() == b.hash());
  CHECK(a.with_sigma0(4).hash() != a.hash());
  CHECK(parse_drift_family("linear_damp") == DriftFamily::linear_damp);
  CHECK_THROWS(parse_diffusion_family("gaussian"));
  CHECK_THROWS(make_model(0.0, DriftFamily::zero, 0, DiffusionFamily::zero, 0));
}
