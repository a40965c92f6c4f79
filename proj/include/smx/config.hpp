#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smx {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, int column, const std::string& message);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_, column_;
};

/// Every key of the flat `key = value` experiment file, with its default.
struct ExperimentConfig {
  std::string experiment = "audit";

  // model
  double sigma0 = 3.0;
  std::string drift = "bounded_smooth";
  double lambda_f = 0.5;
  std::string diffusion = "multiplicative_bounded";
  double lambda_b = 0.5;
  std::uint64_t modes = 64;
  std::uint64_t noise_modes = 64;
  double q_decay = 6.0;
  double frequency_offset = 1.0;
  double frequency_scale = std::numbers::pi;
  double u0_amplitude = 0.5;
  double u0_decay = 4.0;

  // test function
  std::string functional = "exp_neg_norm2";
  double functional_cap = 1e300;
  double pairing_decay = 2.0;

  // scheme
  double T = 1.0;
  std::vector<int> levels{3, 4, 5, 6, 7, 8};
  int level_ref = 12;
  double dt = 0.00390625;
  std::uint64_t steps = 10000;
  std::uint64_t log_every = 10;
  double fp_tol = 1e-12;
  int fp_max_iter = 64;

  // statistics
  std::uint64_t replications = 1000;
  int moment_q = 1;
  int norm_order = 0;
  int audit_r = 2;
  double burn_in = 1.0;
  std::uint64_t batches = 20;
  double T_long = 2000.0;
  int ref_depth = 5;
  std::vector<std::uint64_t> checkpoints{1000, 10000, 100000};
  double clt_lambda = 0.25;
  std::uint64_t outer_samples = 200;
  std::uint64_t inner_paths = 64;
  double relax_horizon = 5.0;

  // multilevel Monte Carlo
  int mlmc_L0 = 2;
  int mlmc_L = 3;
  double mlmc_eps = 0.5;
  std::uint64_t probe_samples = 20000;
  std::uint64_t reference_samples = 1u << 16;

  // operator bounds
  std::vector<double> op_sigma0{1.0, 3.0};
  std::vector<double> op_g{1.2, 1.8};
  std::vector<double> op_g_tilde{0.5, 0.9};
  long op_k_max = 4096;
  bool full_grids = false;

  // run
  std::uint64_t root_seed = 0;
  int threads = 0;
  std::string output_dir = "out";
  bool enforce_hypotheses = true;

  // Every key with its current value, in declaration order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace smx
