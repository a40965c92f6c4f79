// Fast stepper against the reference step, and serial against OpenMP
// replication loops.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "smx/analysis.hpp"
#include "smx/integrator.hpp"
#include "smx/reference.hpp"

using namespace smx;

namespace {

ModelSpec desk_model(std::size_t modes) {
  return ModelSpec(3.0, {DriftFamily::bounded_smooth, 0.5}, {DiffusionFamily::multiplicative_bounded, 0.5},
                   CovarianceSpec::power_law(modes, 6.0), ModeSpectrum::arithmetic(modes, M_PI, 1.0));
}

StateVector start(std::size_t modes) {
  StateVector u(modes);
  for (std::size_t j = 0; j < modes; ++j) u.e(j) = u.h(j) = 0.5 * std::pow(double(j + 1), -4.0);
  return u;
}

std::vector<double> increment(const ModelSpec& m, double dt) {
  std::vector<double> z(m.noise_modes());
  standard_normals({1, 0, 0}, 0, z);
  for (auto& v : z) v *= std::sqrt(dt);
  return z;
}

void BM_StepFast(benchmark::State& state) {
  const auto m = desk_model(static_cast<std::size_t>(state.range(0)));
  const double dt = 1.0 / 256;
  const Stepper s(m, dt);
  auto ws = s.workspace();
  const auto dw = increment(m, dt);
  auto u = start(m.modes());
  for (auto _ : state) {
    auto v = u;
    s.advance(v, dw, ws);
    benchmark::DoNotOptimize(v);
  }
}

void BM_StepReference(benchmark::State& state) {
  const auto m = desk_model(static_cast<std::size_t>(state.range(0)));
  const double dt = 1.0 / 256;
  const SchemeParams p{dt, 1};
  const auto scaled = q_scale(increment(m, dt), m.covariance());
  auto u = start(m.modes());
  for (auto _ : state) benchmark::DoNotOptimize(reference::step(u, scaled, m, p));
}

void BM_Normals(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  std::uint64_t step = 0;
  for (auto _ : state) {
    standard_normals({1, 0, 0}, step++, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_WeakErrorReplications(benchmark::State& state) {
  const auto m = desk_model(64);
  const auto u0 = start(64);
  const std::vector<int> levels{3, 4, 5};
  const RunOptions opts{0, state.range(0) ? Execution::parallel : Execution::serial};
  for (auto _ : state)
    benchmark::DoNotOptimize(weak_error(m, u0, Functional::exp_neg_norm2(), levels, 8, 1.0, 64, opts));
}

}  // namespace

BENCHMARK(BM_StepFast)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_StepReference)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Normals)->Arg(64)->Arg(1024);
BENCHMARK(BM_WeakErrorReplications)->Arg(0)->ArgName("parallel")->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
