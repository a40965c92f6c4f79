#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "smx/spectral.hpp"

namespace smx {

/// Eigenvalues q_k of the trace-class covariance Q (positive, nonincreasing).
class CovarianceSpec {
 public:
  explicit CovarianceSpec(std::vector<double> eigenvalues);

  // q_k = k^{-decay}, k = 1..count.
  static CovarianceSpec power_law(std::size_t count, double decay);

  std::size_t size() const noexcept { return q_.size(); }
  std::span<const double> eigenvalues() const noexcept { return q_; }
  std::span<const double> sqrt_eigenvalues() const noexcept { return sqrt_q_; }
  double max_sqrt_eigenvalue() const noexcept { return sqrt_q_.front(); }

  double trace() const;
  // sum_k q_k mu_k^4 over the modes shared with the spectrum.
  double trace2(const ModeSpectrum& spec) const;

  bool operator==(const CovarianceSpec& o) const { return q_ == o.q_; }

 private:
  std::vector<double> q_;
  std::vector<double> sqrt_q_;
};

/// Identifies one independent stream: distinct triples never share counters.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t replication = 0;
  std::uint32_t level_tag = 0;
};

inline constexpr std::uint32_t kMaxLevelTag = 0xFFFF;
inline constexpr std::size_t kMaxNoiseModes = std::size_t{1} << 17;

// Standard normals for step `step` of the stream, one per noise mode.
void standard_normals(const SeedSpec& seed, std::uint64_t step, std::span<double> out);

// Multiply coordinate k by sqrt(q_k).
std::vector<double> q_scale(std::span<const double> increment, const CovarianceSpec& cov);

class NoiseLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct NoiseLimits {
  int max_finest_level = 24;
  std::size_t max_values = std::size_t{1} << 26;
};

/// Brownian increments over the dyadic partitions of [0, T] with steps
/// T 2^{-l}, l = 0..finest. Only the finest level is sampled; every coarser
/// increment is the sum of its two children.
class NoisePath {
 public:
  double horizon() const noexcept { return horizon_; }
  int finest_level() const noexcept { return static_cast<int>(levels_.size()) - 1; }
  std::size_t noise_modes() const noexcept { return modes_; }
  const SeedSpec& seed() const noexcept { return seed_; }

  std::size_t steps(int level) const;
  double step_size(int level) const;
  std::span<const double> increment(int level, std::size_t step) const;
  std::span<const double> level_values(int level) const;

 private:
  friend NoisePath sample_path(const SeedSpec&, double, int, const CovarianceSpec&, const NoiseLimits&);
  friend NoisePath read_noise_path(std::istream&);
  void build_coarse_levels();

  double horizon_ = 0.0;
  std::size_t modes_ = 0;
  SeedSpec seed_{};
  std::vector<std::vector<double>> levels_;
};

NoisePath sample_path(const SeedSpec& seed, double T, int finest_level, const CovarianceSpec& cov,
                      const NoiseLimits& limits = {});

// Binary dump: little-endian header (T as f64, K, finest level and root seed
// as u64) followed by the finest-level increments as f64, step-major.
void write_noise_path(std::ostream& out, const NoisePath& path);
NoisePath read_noise_path(std::istream& in);

/// Produces the same increments as NoisePath one fine step at a time, emitting
/// every coarser increment as soon as its right child is known. `depth` is the
/// number of coarsening levels tracked above the fine one.
class DyadicIncrementStream {
 public:
  DyadicIncrementStream(SeedSpec seed, double fine_dt, std::size_t modes, int depth);

  // Draws the next fine increment and calls sink(d, index, increment) for the
  // fine level (d = 0) and each coarser level d that it completes.
  template <class Sink>
  void advance(Sink&& sink) {
    draw_fine();
    const double* inc = fine_.data();
    std::uint64_t index = step_++;
    for (int d = 0;; ++d) {
      sink(d, index, std::span<const double>(inc, modes_));
      if (d == depth_) break;
      double* left = pending_[d].data();
      if ((index & 1u) == 0) {
        for (std::size_t k = 0; k < modes_; ++k) left[k] = inc[k];
        break;
      }
      double* sum = carry_[d].data();
      for (std::size_t k = 0; k < modes_; ++k) sum[k] = left[k] + inc[k];
      inc = sum;
      index >>= 1;
    }
  }

  std::uint64_t fine_steps() const noexcept { return step_; }
  std::size_t modes() const noexcept { return modes_; }
  int depth() const noexcept { return depth_; }

 private:
  void draw_fine();

  SeedSpec seed_;
  double sqrt_dt_;
  std::size_t modes_;
  int depth_;
  std::uint64_t step_ = 0;
  std::vector<double> fine_;
  std::vector<std::vector<double>> pending_;
  std::vector<std::vector<double>> carry_;
};

}  // namespace smx
