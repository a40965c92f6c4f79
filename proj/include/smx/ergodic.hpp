#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smx/analysis.hpp"

namespace smx {

/// Several coarse step sizes dt_ref 2^{depth} run against dt_ref under one
/// Brownian path; time averages are compared batch by batch after burn-in.
struct InvariantErrorOptions {
  double dt_ref = 0.0;
  std::vector<int> depths;
  double horizon = 0.0;
  double burn_in = 0.0;
  std::size_t batches = kMinBatches;
  double confidence = 0.95;
};

struct InvariantErrorLane {
  double dt = 0.0;
  double time_average = 0.0;
  BatchMeans difference;  // per batch: average at dt minus average at dt_ref
  double error = 0.0;     // |mean difference|
};

struct InvariantErrorReport {
  double dt_ref = 0.0;
  double reference_average = 0.0;
  std::vector<InvariantErrorLane> lanes;
};

InvariantErrorReport invariant_measure_error(const ModelSpec& m, const Functional& phi, const StateVector& u0,
                                             const InvariantErrorOptions& o, const RunOptions& opts = {});

// Time average of f over (burn_in, horizon] with a batch-means interval.
BatchMeans invariant_mean(const ModelSpec& m, const Functional& f, const StateVector& u0, double dt, double horizon,
                          double burn_in, std::size_t batches, const RunOptions& opts = {});

/// Running time averages (1/k) sum_{i<k} f(u_i) of independent replications.
struct SllnReport {
  double dt = 0.0;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> pooled_mean;
  std::vector<double> spread;  // max |average_r - pooled mean|
  std::vector<std::vector<double>> averages;  // [checkpoint][replication]
  bool shrinking = false;  // spread strictly decreasing
};

SllnReport slln_check(const ModelSpec& m, const Functional& f, const StateVector& u0, double dt,
                      std::span<const std::uint64_t> checkpoints, std::size_t replications,
                      const RunOptions& opts = {});

// The joint restriction on (p, gamma, lambda, q, r) under which the normalised
// sums are asymptotically normal; recorded, not enforced.
struct CltConstraint {
  double growth = 1.0;
  double hoelder = 1.0;
  int min_q = 1;
  int min_r = 2;
  bool audit_holds = false;  // moment hypotheses at (min_r, min_q)
};

CltConstraint clt_constraint(const ModelSpec& m, const Functional& f, double lambda);

struct CltReport {
  double dt = 0.0;
  double lambda = 0.0;
  std::uint64_t k = 0;
  double pi_hat = 0.0;
  double v_hat = 0.0;
  std::vector<double> zeta;
  std::vector<double> standardized;
  double ks = 0.0;
  double critical = 0.0;
  double alpha = 0.01;
  bool degenerate = false;
  CltConstraint constraint;
};

inline std::uint64_t clt_steps(double dt, double lambda) {
  return static_cast<std::uint64_t>(std::ceil(std::pow(dt, -1.0 - 2.0 * lambda)));
}

// zeta_r = (k dt)^{-1/2} sum_{i<k} (f(u_i) - pi_hat) dt with k = ceil(dt^{-1-2 lambda}),
// each replication started from u0 after `burn_in` time units.
CltReport clt_statistic(const ModelSpec& m, const Functional& f, const StateVector& u0, double dt, double lambda,
                        std::size_t replications, double pi_hat, double v_hat, double burn_in,
                        const RunOptions& opts = {}, double alpha = 0.01);

struct AsymptoticVarianceOptions {
  double horizon = 1e4;        // long run used for both estimators
  double burn_in = 10.0;
  std::size_t batches = 100;   // batch-means estimator
  std::size_t outer_samples = 200;
  std::size_t inner_paths = 64;  // split in two halves
  double relax_horizon = 5.0;    // truncation of the Poisson integral
};

/// Two estimates of the asymptotic variance v^2 of the time averages:
/// the stationary mean of |D(phi) B Q^{1/2}|^2_HS, with phi the solution of
/// the Poisson equation obtained from first variations, and batch means.
struct AsymptoticVariance {
  Estimate formula;
  Estimate batch_means;
  double relative_gap = 0.0;
  double invariant_mean = 0.0;
};

AsymptoticVariance estimate_asymptotic_variance(const ModelSpec& m, const Functional& f, const StateVector& u0,
                                                double dt, const AsymptoticVarianceOptions& o,
                                                const RunOptions& opts = {});

}  // namespace smx
