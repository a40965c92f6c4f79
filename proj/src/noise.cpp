#include "smx/noise.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "kernels/kernels.hpp"
#include "smx/summation.hpp"

namespace smx {

CovarianceSpec::CovarianceSpec(std::vector<double> eigenvalues) : q_(std::move(eigenvalues)) {
  if (q_.empty()) throw std::invalid_argument("covariance needs at least one eigenvalue");
  if (q_.size() > kMaxNoiseModes) throw std::invalid_argument("too many noise modes");
  for (std::size_t k = 0; k < q_.size(); ++k) {
    if (!(q_[k] > 0.0) || !std::isfinite(q_[k]))
      throw std::invalid_argument("eigenvalue " + std::to_string(k) + " must be positive and finite");
    if (k > 0 && q_[k] > q_[k - 1]) throw std::invalid_argument("eigenvalues must be nonincreasing");
  }
  sqrt_q_.resize(q_.size());
  for (std::size_t k = 0; k < q_.size(); ++k) sqrt_q_[k] = std::sqrt(q_[k]);
}

CovarianceSpec CovarianceSpec::power_law(std::size_t count, double decay) {
  if (decay < 0.0) throw std::invalid_argument("eigenvalue decay exponent must be >= 0");
  std::vector<double> q(count);
  for (std::size_t k = 0; k < count; ++k) q[k] = std::pow(static_cast<double>(k + 1), -decay);
  return CovarianceSpec(std::move(q));
}

double CovarianceSpec::trace() const { return pairwise_sum(q_); }

double CovarianceSpec::trace2(const ModeSpectrum& spec) const {
  const std::size_t n = std::min(q_.size(), spec.size());
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m2 = spec[k] * spec[k];
    terms[k] = q_[k] * m2 * m2;
  }
  return pairwise_sum(terms);
}

namespace {

void check_seed(const SeedSpec& seed) {
  if (seed.replication > 0xFFFFFFFFu) throw std::invalid_argument("replication index exceeds 32 bits");
  if (seed.level_tag > kMaxLevelTag) throw std::invalid_argument("level tag exceeds 16 bits");
}

}  // namespace

void standard_normals(const SeedSpec& seed, std::uint64_t step, std::span<double> out) {
  check_seed(seed);
  if (out.size() > kMaxNoiseModes) throw std::invalid_argument("too many noise modes");
  kernels::standard_normals(seed.root_seed, static_cast<std::uint32_t>(seed.replication), seed.level_tag, step,
                            out.size(), out.data());
}

std::vector<double> q_scale(std::span<const double> increment, const CovarianceSpec& cov) {
  if (increment.size() != cov.size())
    throw DimensionError("increment has " + std::to_string(increment.size()) + " entries, covariance has " +
                         std::to_string(cov.size()));
  std::vector<double> out(increment.size());
  const auto s = cov.sqrt_eigenvalues();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = s[k] * increment[k];
  return out;
}

std::size_t NoisePath::steps(int level) const {
  if (level < 0 || level > finest_level()) throw std::out_of_range("level not present in noise path");
  return std::size_t{1} << level;
}

double NoisePath::step_size(int level) const {
  steps(level);
  return std::ldexp(horizon_, -level);
}

std::span<const double> NoisePath::increment(int level, std::size_t step) const {
  if (step >= steps(level)) throw std::out_of_range("step outside noise path");
  return std::span<const double>(levels_[level]).subspan(step * modes_, modes_);
}

std::span<const double> NoisePath::level_values(int level) const {
  steps(level);
  return levels_[level];
}

void NoisePath::build_coarse_levels() {
  for (int l = finest_level() - 1; l >= 0; --l) {
    const auto& fine = levels_[l + 1];
    auto& coarse = levels_[l];
    coarse.resize(fine.size() / 2);
    const std::size_t n = std::size_t{1} << l;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < modes_; ++k)
        coarse[i * modes_ + k] = fine[2 * i * modes_ + k] + fine[(2 * i + 1) * modes_ + k];
  }
}

NoisePath sample_path(const SeedSpec& seed, double T, int finest_level, const CovarianceSpec& cov,
                      const NoiseLimits& limits) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon must be positive");
  if (finest_level < 0) throw std::invalid_argument("finest level must be >= 0");
  if (finest_level > limits.max_finest_level)
    throw NoiseLimitError("finest level " + std::to_string(finest_level) + " exceeds cap " +
                          std::to_string(limits.max_finest_level));
  const std::size_t K = cov.size();
  const std::size_t steps = std::size_t{1} << finest_level;
  if (steps > limits.max_values / K)
    throw NoiseLimitError("noise path would hold more than " + std::to_string(limits.max_values) + " values");
  check_seed(seed);

  NoisePath path;
  path.horizon_ = T;
  path.modes_ = K;
  path.seed_ = seed;
  path.levels_.resize(finest_level + 1);
  auto& fine = path.levels_.back();
  fine.resize(steps * K);
  const double sqrt_dt = std::sqrt(std::ldexp(T, -finest_level));
  for (std::size_t n = 0; n < steps; ++n) {
    double* row = fine.data() + n * K;
    kernels::standard_normals(seed.root_seed, static_cast<std::uint32_t>(seed.replication), seed.level_tag, n, K,
                              row);
    for (std::size_t k = 0; k < K; ++k) row[k] *= sqrt_dt;
  }
  path.build_coarse_levels();
  return path;
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary noise dumps assume a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated noise path dump");
  return v;
}

}  // namespace

void write_noise_path(std::ostream& out, const NoisePath& path) {
  put(out, path.horizon());
  put(out, static_cast<std::uint64_t>(path.noise_modes()));
  put(out, static_cast<std::uint64_t>(path.finest_level()));
  put(out, path.seed().root_seed);
  const auto fine = path.level_values(path.finest_level());
  out.write(reinterpret_cast<const char*>(fine.data()), static_cast<std::streamsize>(fine.size() * sizeof(double)));
}

NoisePath read_noise_path(std::istream& in) {
  NoisePath path;
  path.horizon_ = get<double>(in);
  path.modes_ = static_cast<std::size_t>(get<std::uint64_t>(in));
  const auto finest = get<std::uint64_t>(in);
  path.seed_.root_seed = get<std::uint64_t>(in);
  if (finest > 40 || path.modes_ == 0) throw std::runtime_error("implausible noise path header");
  path.levels_.resize(finest + 1);
  auto& fine = path.levels_.back();
  fine.resize((std::size_t{1} << finest) * path.modes_);
  in.read(reinterpret_cast<char*>(fine.data()), static_cast<std::streamsize>(fine.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated noise path dump");
  path.build_coarse_levels();
  return path;
}

DyadicIncrementStream::DyadicIncrementStream(SeedSpec seed, double fine_dt, std::size_t modes, int depth)
    : seed_(seed), sqrt_dt_(std::sqrt(fine_dt)), modes_(modes), depth_(depth) {
  check_seed(seed);
  if (!(fine_dt > 0.0)) throw std::invalid_argument("fine step must be positive");
  if (depth < 0) throw std::invalid_argument("stream depth must be >= 0");
  if (modes == 0 || modes > kMaxNoiseModes) throw std::invalid_argument("bad noise mode count");
  fine_.resize(modes);
  pending_.assign(depth, std::vector<double>(modes));
  carry_.assign(depth, std::vector<double>(modes));
}

void DyadicIncrementStream::draw_fine() {
  kernels::standard_normals(seed_.root_seed, static_cast<std::uint32_t>(seed_.replication), seed_.level_tag, step_,
                            modes_, fine_.data());
  for (std::size_t k = 0; k < modes_; ++k) fine_[k] *= sqrt_dt_;
}

}  // namespace smx
