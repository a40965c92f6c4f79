#include "smx/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smx/analysis.hpp"
#include "smx/ergodic.hpp"
#include "smx/mlmc.hpp"
#include "smx/operator_checks.hpp"

namespace smx {

using nlohmann::json;

namespace {

constexpr std::array<ExperimentInfo, 10> kExperiments{{
    {"moments", "sample E|u_k|^{2q} of the scheme stays bounded after burn-in",
     "uniform moment bound of the numerical solution (H norm, and D(M^2) for norm_order = 2)"},
    {"stability", "decay rate of E|u_k|^2 and of the two-solution distance",
     "mean-square exponential stability and contraction of the scheme"},
    {"strong_order", "root-mean-square error against a fine reference level",
     "strong order one half"},
    {"weak_order", "error of E phi(u_T) against a fine reference level", "weak order one"},
    {"invariant_measure", "time averages at dt and dt/2 against a fine reference step",
     "invariant-measure error of order dt"},
    {"slln", "spread of independent time averages at increasing horizons",
     "strong law of large numbers for time averages"},
    {"clt", "Kolmogorov-Smirnov distance of normalised time averages from N(0, v^2)",
     "central limit theorem for time averages"},
    {"mlmc", "multilevel Monte Carlo estimate, per-level variances and error shape",
     "multilevel Monte Carlo error of order dt"},
    {"operator_checks", "exact operator norms of resolvent powers and semigroup differences",
     "resolvent decay, semigroup Lipschitz bound, resolvent-semigroup error"},
    {"audit", "constants and hypothesis verdicts of the configured model", "assumption audit"},
}};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Short form for identifiers and messages.
std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string hex64(std::uint64_t x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<CsvColumn> cols) : cols_(std::move(cols)) {
    for (std::size_t i = 0; i < cols_.size(); ++i) out_ << (i ? "," : "") << cols_[i].name;
    out_ << '\n';
  }
  template <class... A>
  void row(const A&... cells) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(cells)), ...);
    out_ << '\n';
  }
  std::vector<CsvColumn> columns() const { return cols_; }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I x) {
    return std::to_string(x);
  }

  std::vector<CsvColumn> cols_;
  std::ostringstream out_;
};

Assertion at_most(std::string id, std::string description, double value, double bound) {
  return {std::move(id), std::move(description), value, bound, bound - value, value <= bound};
}

Assertion at_least(std::string id, std::string description, double value, double bound) {
  return {std::move(id), std::move(description), value, bound, value - bound, value >= bound};
}

Assertion within(std::string id, std::string description, double value, double lo, double hi) {
  const double margin = std::min(value - lo, hi - value);
  Assertion a{std::move(id), std::move(description), value, value < lo ? lo : hi, margin, lo <= value && value <= hi};
  return a;
}

Assertion holds(std::string id, std::string description, bool ok) {
  return {std::move(id), std::move(description), ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, ok};
}

json assertion_json(const Assertion& a) {
  return {{"id", a.id}, {"description", a.description}, {"value", a.value},
          {"bound", a.bound}, {"margin", a.margin},         {"pass", a.pass}};
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"se", e.se}, {"n", e.n}}; }

json fit_json(const std::optional<OrderFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope},
          {"intercept", f->intercept},
          {"slope_se", f->slope_se},
          {"max_residual", f->max_residual},
          {"pairwise", f->pairwise}};
}

RunOptions run_options(const ExperimentConfig& cfg) {
  return {cfg.root_seed, Execution::parallel, {cfg.fp_tol, cfg.fp_max_iter}};
}

struct Context {
  const ExperimentConfig& cfg;
  ModelSpec model;
  StateVector u0;
  RunOptions opts;
  ExperimentOutcome& out;
};

// ---------------------------------------------------------------------------

void run_audit(Context& c) {
  Csv csv({{"id", "verdict identifier"},
           {"value", "sigma0"},
           {"threshold", "right-hand side of the inequality"},
           {"margin", "value - threshold"},
           {"precondition", "structural precondition holds (1/0)"},
           {"holds", "verdict (1/0)"}});
  for (const auto& v : config_audit(c.cfg).verdicts)
    csv.row(v.id, v.value, v.threshold, v.margin, v.precondition, v.holds);
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
}

void run_moments(Context& c) {
  const auto& cfg = c.cfg;
  const auto s = moment_series(c.model, c.u0, cfg.dt, cfg.steps, cfg.moment_q, cfg.replications, cfg.log_every,
                               GraphOrder(cfg.norm_order), c.opts);
  Csv csv({{"step", "time step index"},
           {"t", "time"},
           {"moment", "sample E|u_k|^{2q} in the D(M^norm_order) norm"},
           {"stderr", "standard error of the moment"}});
  double before = 0.0, after = 0.0;
  bool any_after = false;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    csv.row(s.step[i], s.t[i], s.moment[i].mean, s.moment[i].se);
    if (s.t[i] <= cfg.burn_in)
      before = std::max(before, s.moment[i].mean);
    else {
      after = std::max(after, s.moment[i].mean - 2.0 * s.moment[i].se);
      any_after = true;
    }
  }
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  if (!any_after) throw std::invalid_argument("burn_in covers the whole run");
  c.out.assertions.push_back(at_most("bounded_after_burn_in",
                                     "max after burn-in (less 2 SE) <= 1.5 x running max at burn-in", after,
                                     1.5 * before));
  c.out.summary["results"] = {{"q", s.q}, {"norm_order", s.norm_order}, {"max_before_burn_in", before},
                              {"max_after_burn_in_less_2se", after}};
}

void run_stability(Context& c) {
  const auto& cfg = c.cfg;
  const auto s = moment_series(c.model, c.u0, cfg.dt, cfg.steps, 1, cfg.replications, cfg.log_every, GraphOrder(0),
                               c.opts, cfg.batches);
  const auto slope = stability_slope(s);
  const auto fc = c.model.drift_constants();
  const auto bc = c.model.diffusion_constants();
  const double rate = c.model.sigma0() - fc.one_sided_h - bc.lipschitz_h * bc.lipschitz_h;
  c.out.assertions.push_back(at_most("mean_square_decay", "slope of log E|u_k|^2 <= -(sigma0 - aF0 - aB0^2) + 2 SE",
                                     slope.slope, -rate + 2.0 * slope.se));

  const StateVector v0 = -1.0 * c.u0;
  const auto d = contraction_series(c.model, c.u0, v0, cfg.dt, cfg.steps, cfg.replications, cfg.log_every, c.opts);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_i = 0;
  std::vector<double> bounds;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    const double b = std::exp(-rate * d.t[i]) * d.initial;
    const double rel = d.distance[i].mean > 0.0 ? d.distance[i].se / d.distance[i].mean : 0.0;
    bounds.push_back(b * (1.0 + 3.0 * rel));
    const double margin = bounds.back() - d.distance[i].mean;
    if (margin < worst) {
      worst = margin;
      worst_i = i;
    }
  }
  c.out.assertions.push_back(at_most("contraction",
                                     "E|u_k - v_k|^2 <= e^{-(sigma0 - aF0 - aB0^2) t_k} |u0 - v0|^2 (1 + 3 SE) at all k",
                                     d.distance[worst_i].mean, bounds[worst_i]));

  Csv csv({{"t", "time"},
           {"moment", "sample E|u_k|^2"},
           {"moment_stderr", "standard error"},
           {"distance", "sample E|u_k - v_k|^2 with v0 = -u0"},
           {"distance_stderr", "standard error"},
           {"distance_bound", "contraction bound including the 3 SE allowance"}});
  for (std::size_t i = 0; i < s.t.size(); ++i)
    csv.row(s.t[i], s.moment[i].mean, s.moment[i].se, d.distance[i].mean, d.distance[i].se, bounds[i]);
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  c.out.summary["results"] = {{"slope", slope.slope},     {"slope_se", slope.se},     {"truncated", slope.truncated},
                              {"rate_bound", rate},       {"tail_points", slope.points}};
}

void convergence_output(Context& c, const ConvergenceStudy& st, const std::string& id, double lo, double hi) {
  Csv csv({{"level", "level l (dt = T 2^-l)"},
           {"dt", "step size"},
           {"error", "error against the reference level"},
           {"stderr", "standard error of the error"},
           {"in_fit", "used in the order fit (1/0)"}});
  for (std::size_t i = 0; i < st.levels.size(); ++i)
    csv.row(st.levels[i], st.dt[i], st.error[i], st.error_se[i], static_cast<bool>(st.in_fit[i]));
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  if (st.fit)
    c.out.assertions.push_back(within(id, "fitted order within [" + label(lo) + ", " + label(hi) + "]", st.fit->slope, lo, hi));
  else
    c.out.assertions.push_back(holds(id, "order fit available", false));
  c.out.summary["results"] = {{"level_ref", st.level_ref}, {"replications", st.replications},
                              {"fit", fit_json(st.fit)},    {"flags", st.flags}};
}

void run_strong(Context& c) {
  const auto& cfg = c.cfg;
  const auto st = strong_error(c.model, c.u0, cfg.levels, cfg.level_ref, cfg.T, cfg.replications, c.opts);
  convergence_output(c, st, "strong_order", 0.4, 0.6);
}

void run_weak(Context& c) {
  const auto& cfg = c.cfg;
  const auto st =
      weak_error(c.model, c.u0, build_functional(cfg), cfg.levels, cfg.level_ref, cfg.T, cfg.replications, c.opts);
  convergence_output(c, st, "weak_order", 0.85, 1.15);
}

void run_invariant(Context& c) {
  const auto& cfg = c.cfg;
  if (cfg.ref_depth < 2) throw std::invalid_argument("ref_depth must be >= 2");
  InvariantErrorOptions o;
  o.dt_ref = std::ldexp(cfg.dt, -cfg.ref_depth);
  o.depths = {cfg.ref_depth, cfg.ref_depth - 1};
  o.horizon = cfg.T_long;
  o.burn_in = cfg.burn_in;
  o.batches = cfg.batches;
  const auto rep = invariant_measure_error(c.model, build_functional(cfg), c.u0, o, c.opts);
  Csv csv({{"dt", "step size"},
           {"time_average", "time average of phi after burn-in"},
           {"difference", "mean over batches of (average at dt - average at dt_ref)"},
           {"stderr", "batch-means standard error"},
           {"ci_low", "95% interval, lower end"},
           {"ci_high", "95% interval, upper end"}});
  for (const auto& l : rep.lanes)
    csv.row(l.dt, l.time_average, l.difference.summary.mean, l.difference.summary.se, l.difference.ci_low,
            l.difference.ci_high);
  csv.row(rep.dt_ref, rep.reference_average, 0.0, 0.0, 0.0, 0.0);
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  const auto& coarse = rep.lanes[0];
  const auto& fine = rep.lanes[1];
  const double ratio = coarse.error / fine.error;
  c.out.assertions.push_back(within("error_ratio", "error(dt) / error(dt/2) within [1.3, 2.7]", ratio, 1.3, 2.7));
  c.out.assertions.push_back(holds("coarse_ci_excludes_zero", "batch-means interval at dt excludes 0",
                                   coarse.difference.ci_low > 0.0 || coarse.difference.ci_high < 0.0));
  c.out.summary["results"] = {{"dt_ref", rep.dt_ref}, {"ratio", ratio}, {"batches", cfg.batches}};
}

void run_slln(Context& c) {
  const auto& cfg = c.cfg;
  const auto rep =
      slln_check(c.model, build_functional(cfg), c.u0, cfg.dt, cfg.checkpoints, cfg.replications, c.opts);
  Csv csv({{"k", "number of terms in the time average"},
           {"pooled_mean", "mean of the replication averages"},
           {"spread", "max |average - pooled mean| over replications"}});
  for (std::size_t i = 0; i < rep.checkpoints.size(); ++i) csv.row(rep.checkpoints[i], rep.pooled_mean[i], rep.spread[i]);
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  c.out.assertions.push_back(holds("spread_shrinks", "spread strictly decreasing in k", rep.shrinking));
  c.out.summary["results"] = {{"spread", rep.spread}, {"pooled_mean", rep.pooled_mean}};
}

void run_clt(Context& c) {
  const auto& cfg = c.cfg;
  const auto f = build_functional(cfg);
  const double fine_dt = std::ldexp(cfg.dt, -cfg.ref_depth);
  const auto pi = invariant_mean(c.model, f, c.u0, fine_dt, cfg.T_long, 0.1 * cfg.T_long, cfg.batches, c.opts);
  AsymptoticVarianceOptions vo;
  vo.horizon = cfg.T_long;
  vo.burn_in = cfg.burn_in;
  vo.batches = std::max<std::size_t>(cfg.batches, kMinBatches);
  vo.outer_samples = cfg.outer_samples;
  vo.inner_paths = cfg.inner_paths;
  vo.relax_horizon = cfg.relax_horizon;
  RunOptions vopts = c.opts;
  vopts.root_seed = cfg.root_seed + 1;
  const auto v2 = estimate_asymptotic_variance(c.model, f, c.u0, cfg.dt, vo, vopts);
  RunOptions copts = c.opts;
  copts.root_seed = cfg.root_seed + 2;
  const auto rep = clt_statistic(c.model, f, c.u0, cfg.dt, cfg.clt_lambda, cfg.replications, pi.summary.mean,
                                 std::sqrt(std::max(0.0, v2.formula.mean)), cfg.burn_in, copts);
  Csv csv({{"replication", "replication index"},
           {"zeta", "(k dt)^{-1/2} sum_{i<k} (f(u_i) - pi_hat) dt"},
           {"standardized", "zeta / v_hat"}});
  for (std::size_t r = 0; r < rep.zeta.size(); ++r)
    csv.row(r, rep.zeta[r], rep.degenerate ? 0.0 : rep.standardized[r]);
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  if (rep.degenerate)
    c.out.assertions.push_back(holds("clt_ks", "asymptotic variance is positive", false));
  else
    c.out.assertions.push_back(at_most("clt_ks", "KS distance below the alpha = 0.01 critical value", rep.ks, rep.critical));
  c.out.summary["results"] = {
      {"k", rep.k},
      {"pi_hat", estimate_json(pi.summary)},
      {"v2_formula", estimate_json(v2.formula)},
      {"v2_batch_means", estimate_json(v2.batch_means)},
      {"v2_relative_gap", v2.relative_gap},
      {"ks", rep.degenerate ? json(nullptr) : json(rep.ks)},
      {"critical", rep.critical},
      {"constraint",
       {{"min_q", rep.constraint.min_q}, {"min_r", rep.constraint.min_r}, {"audit_holds", rep.constraint.audit_holds}}}};
}

void run_mlmc(Context& c) {
  const auto& cfg = c.cfg;
  const auto f = build_functional(cfg);
  json levels_json = json::array();
  Csv csv({{"corrections", "number of correction levels L of the run"},
           {"level", "l (0 = base level, else fine-minus-coarse)"},
           {"samples", "M_l"},
           {"mean", "sample mean"},
           {"variance", "sample variance"},
           {"variance_se", "standard error of the variance"},
           {"cost", "time steps spent"}});

  // Error shape across L = 1..mlmc_L with the constants of L = 1 frozen.
  double c_bias = 0.0, c_stat = 0.0;
  json runs = json::array();
  for (int L = 1; L <= cfg.mlmc_L; ++L) {
    const auto plan = sample_schedule(cfg.mlmc_L0, L, cfg.mlmc_eps, cfg.T);
    const auto res = mlmc_estimate(c.model, f, c.u0, plan, c.opts);
    for (const auto& s : res.levels) csv.row(L, s.level, s.samples, s.mean, s.variance, s.variance_se, s.cost);
    const int ref_level = plan.finest_level() + 3;
    const auto ref = plain_estimate(c.model, f, c.u0, ref_level, cfg.T, cfg.reference_samples,
                                    static_cast<std::uint32_t>(1000 + L), c.opts);
    const double dt = std::ldexp(cfg.T, -plan.finest_level());
    if (L == 1) {
      c_bias = res.bias_proxy / dt;
      c_stat = std::sqrt(res.variance_term) / dt;
    }
    const double observed = std::abs(res.estimate - ref.mean);
    const double bound = (c_bias + c_stat) * dt + 2.0 * ref.se;
    c.out.assertions.push_back(at_most("mlmc_error_L" + std::to_string(L),
                                       "|estimate - reference| <= (C1 + C2) dt_{L0+L} + 2 SE_ref, C frozen at L = 1",
                                       observed, bound));
    json lv = json::array();
    for (const auto& s : res.levels)
      lv.push_back({{"level", s.level}, {"samples", s.samples}, {"mean", s.mean}, {"variance", s.variance},
                    {"variance_se", s.variance_se}, {"cost", s.cost}, {"wall_seconds", s.wall_seconds}});
    runs.push_back({{"L", L},
                    {"schedule", plan.samples},
                    {"estimate", res.estimate},
                    {"rmse_proxy", res.rmse_proxy},
                    {"variance_term", res.variance_term},
                    {"bias_proxy", res.bias_proxy},
                    {"reference_level", ref_level},
                    {"reference", estimate_json(ref)},
                    {"levels", lv}});
  }

  const auto profile =
      level_variance_profile(c.model, f, c.u0, cfg.mlmc_L0, cfg.mlmc_L, cfg.probe_samples, cfg.T, c.opts);
  std::vector<double> x, y;
  json prof = json::array();
  for (const auto& s : profile) {
    prof.push_back({{"level", s.level}, {"variance", s.variance}, {"variance_se", s.variance_se},
                    {"wall_seconds", s.wall_seconds}});
    if (s.variance > 0.0) {
      x.push_back(s.level);
      y.push_back(std::log2(s.variance));
    }
  }
  if (x.size() >= 2) {
    const double slope = least_squares(x, y).slope;
    c.out.assertions.push_back(within("level_variance_slope", "slope of log2 Var[Y_l] against l within [-1.4, -0.6]",
                                      slope, -1.4, -0.6));
  } else {
    c.out.assertions.push_back(holds("level_variance_slope", "at least two levels with positive variance", false));
  }
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  c.out.summary["results"] = {{"runs", runs},
                              {"constants", {{"bias", c_bias}, {"statistical", c_stat}}},
                              {"zeta_1_plus_eps", zeta(1.0 + cfg.mlmc_eps)},
                              {"variance_profile", prof}};
}

json report_json(const BoundReport& r, bool full) {
  json j{{"id", r.id},
         {"sigma0", r.sigma0},
         {"g", r.g},
         {"dt_threshold", r.dt_threshold},
         {"constant", r.constant},
         {"fitted_constant", r.fitted_constant},
         {"worst_margin", r.worst_margin},
         {"pass", r.pass},
         {"skipped_dt", r.skipped_dt},
         {"points", r.points.size()}};
  if (full) {
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back({p.dt, p.k, p.order, p.t, p.observed, p.bound, p.margin});
    j["grid_columns"] = {"dt", "k", "order", "t", "observed", "bound", "margin"};
    j["grid"] = std::move(pts);
  }
  return j;
}

void run_operator_checks(Context& c) {
  const auto& cfg = c.cfg;
  const auto& spec = c.model.spectrum();
  const auto grid = default_dt_grid();
  const std::vector<double> fit_grid(grid.begin(), grid.begin() + 3);
  const std::vector<double> check_grid(grid.begin() + 3, grid.end());
  std::vector<double> t_grid;
  for (int i = 0; i <= 1000; ++i) t_grid.push_back(0.01 * i);

  std::vector<BoundReport> reports;
  for (double s0 : cfg.op_sigma0) {
    for (double g : cfg.op_g) reports.push_back(verify_resolvent_decay(spec, s0, g, grid, cfg.op_k_max));
    reports.push_back(verify_semigroup_lipschitz(spec, s0, t_grid));
    for (double gt : cfg.op_g_tilde)
      reports.push_back(verify_resolvent_semigroup_error(spec, s0, gt, fit_grid, check_grid, cfg.op_k_max));
  }

  Csv csv({{"report", "bound identifier"},
           {"sigma0", "damping"},
           {"g", "decay fraction g or g~ (0 when not applicable)"},
           {"dt", "step size (0 for the semigroup bound)"},
           {"order", "graph order of the domain space"},
           {"points", "grid points for this row"},
           {"worst_observed", "observed norm at the worst point"},
           {"worst_bound", "bound at the worst point"},
           {"worst_margin", "min over the row of bound - observed"}});
  json reps = json::array();
  for (const auto& r : reports) {
    // One row per (dt, order): the full grid goes to summary.json on request.
    std::vector<std::pair<std::pair<double, int>, BoundPoint>> worst;
    std::vector<std::size_t> counts;
    for (const auto& p : r.points) {
      const auto key = std::make_pair(p.dt, p.order);
      auto it = std::find_if(worst.begin(), worst.end(), [&](const auto& w) { return w.first == key; });
      if (it == worst.end()) {
        worst.push_back({key, p});
        counts.push_back(1);
      } else {
        ++counts[static_cast<std::size_t>(it - worst.begin())];
        if (p.margin < it->second.margin) it->second = p;
      }
    }
    for (std::size_t i = 0; i < worst.size(); ++i) {
      const auto& p = worst[i].second;
      csv.row(r.id, r.sigma0, r.g, p.dt, p.order, counts[i], p.observed, p.bound, p.margin);
    }
    std::string id = r.id + "_sigma0=" + label(r.sigma0);
    if (r.g > 0.0) id += "_g=" + label(r.g);
    c.out.assertions.push_back(
        at_least(std::move(id), "worst margin (bound - observed) over the grid is >= 0", r.worst_margin, 0.0));
    reps.push_back(report_json(r, cfg.full_grids));
  }
  c.out.columns = csv.columns();
  c.out.csv = csv.str();
  json thresholds = json::array();
  for (double s0 : cfg.op_sigma0) {
    for (double g : cfg.op_g) {
      const auto t = compute_dt_threshold(s0, g, ThresholdKind::squared_resolvent);
      thresholds.push_back({{"sigma0", s0}, {"g", g}, {"kind", "squared_resolvent"}, {"dt", t.value},
                            {"capped", t.capped}, {"residual", t.residual}});
    }
    for (double g : cfg.op_g_tilde) {
      const auto t = compute_dt_threshold(s0, g, ThresholdKind::resolvent);
      thresholds.push_back({{"sigma0", s0}, {"g", g}, {"kind", "resolvent"}, {"dt", t.value},
                            {"capped", t.capped}, {"residual", t.residual}});
    }
  }
  c.out.summary["results"] = {{"thresholds", thresholds}, {"reports", reps}};
}

}  // namespace

std::span<const ExperimentInfo> list_experiments() { return kExperiments; }

bool ExperimentOutcome::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

ModelSpec build_model(const ExperimentConfig& cfg) {
  if (cfg.modes == 0 || cfg.noise_modes == 0) throw std::invalid_argument("modes and noise_modes must be >= 1");
  if (cfg.noise_modes > kMaxNoiseModes) throw std::invalid_argument("noise_modes exceeds the stream layout limit");
  return ModelSpec(cfg.sigma0, {parse_drift_family(cfg.drift), cfg.lambda_f},
                   {parse_diffusion_family(cfg.diffusion), cfg.lambda_b},
                   CovarianceSpec::power_law(cfg.noise_modes, cfg.q_decay),
                   ModeSpectrum::arithmetic(cfg.modes, cfg.frequency_scale, cfg.frequency_offset));
}

StateVector initial_state(const ExperimentConfig& cfg) {
  StateVector u(cfg.modes);
  for (std::size_t j = 0; j < cfg.modes; ++j) {
    const double c = cfg.u0_amplitude * std::pow(static_cast<double>(j + 1), -cfg.u0_decay);
    u.e(j) = c;
    u.h(j) = c;
  }
  return u;
}

Functional build_functional(const ExperimentConfig& cfg) {
  switch (parse_functional_family(cfg.functional)) {
    case FunctionalFamily::exp_neg_norm2: return Functional::exp_neg_norm2();
    case FunctionalFamily::cos_pairing: return Functional::cos_pairing(power_law_direction(cfg.modes, cfg.pairing_decay));
    case FunctionalFamily::norm2_capped:
      return Functional::norm2_capped(cfg.functional_cap >= 1e300 ? std::numeric_limits<double>::infinity()
                                                                  : cfg.functional_cap);
  }
  throw std::invalid_argument("unknown functional");
}

std::vector<std::string> required_verdicts(std::string_view experiment, const ExperimentConfig& cfg) {
  if (experiment == "moments") {
    std::vector<std::string> v{"numerical_moments"};
    if (cfg.norm_order > 0) v.emplace_back("numerical_dm2_bound");
    return v;
  }
  if (experiment == "stability") return {"numerical_stability", "numerical_contraction"};
  if (experiment == "strong_order" || experiment == "weak_order" || experiment == "mlmc") return {"weak_order"};
  if (experiment == "invariant_measure") return {"numerical_invariant_measure", "weak_order"};
  if (experiment == "slln" || experiment == "clt")
    return {"numerical_invariant_measure", "numerical_moments", "weak_order"};
  if (experiment == "operator_checks" || experiment == "audit") return {};
  throw std::invalid_argument("unknown experiment '" + std::string(experiment) + "'");
}

AssumptionAudit config_audit(const ExperimentConfig& cfg) { return audit(build_model(cfg), cfg.audit_r, cfg.moment_q); }

nlohmann::json audit_json(const AssumptionAudit& a) {
  json verdicts = json::array();
  for (const auto& v : a.verdicts)
    verdicts.push_back({{"id", v.id},
                        {"inequality", v.inequality},
                        {"value", v.value},
                        {"threshold", v.threshold},
                        {"margin", v.margin},
                        {"precondition", v.precondition},
                        {"holds", v.holds}});
  return {{"r", a.r},
          {"q", a.q},
          {"drift",
           {{"one_sided_h", a.drift.one_sided_h},
            {"one_sided_dm2", a.drift.one_sided_dm2},
            {"at_zero_h", a.drift.at_zero_h},
            {"at_zero_dm2", a.drift.at_zero_dm2},
            {"growth_dm2", a.drift.growth_dm2},
            {"d1", a.drift.d1},
            {"d2", a.drift.d2},
            {"d3", a.drift.d3}}},
          {"diffusion",
           {{"lipschitz_h", a.diffusion.lipschitz_h},
            {"lipschitz_dm2", a.diffusion.lipschitz_dm2},
            {"at_zero_h", a.diffusion.at_zero_h},
            {"at_zero_dm2", a.diffusion.at_zero_dm2},
            {"d1", a.diffusion.d1},
            {"d2", a.diffusion.d2},
            {"d3", a.diffusion.d3}}},
          {"alpha_tilde_f_h", a.alpha_tilde_f_h},
          {"alpha_tilde_f_dm2", a.alpha_tilde_f_dm2},
          {"alpha_tilde_b_h", a.alpha_tilde_b_h},
          {"alpha_tilde_b_dm2", a.alpha_tilde_b_dm2},
          {"r_q", a.r_q},
          {"r_tilde_q", a.r_tilde_q},
          {"r_tilde_2", a.r_tilde_2},
          {"k1", a.k1},
          {"k2", a.k2},
          {"k3", a.k3},
          {"k4", a.k4},
          {"k_hat", a.k_hat},
          {"verdicts", verdicts}};
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome out;
  out.experiment = cfg.experiment;
  const auto required = required_verdicts(cfg.experiment, cfg);
  const ModelSpec model = build_model(cfg);
  const auto a = audit(model, cfg.audit_r, cfg.moment_q);

  std::vector<std::string> violated;
  for (const auto& id : required) {
    const auto& v = a.verdict(id);
    if (!v.holds)
      violated.push_back(id + ": " + v.inequality + " (sigma0 = " + label(v.value) + ", threshold = " + label(v.threshold) +
                         (v.precondition ? "" : ", precondition fails") + ")");
  }
  if (!violated.empty() && cfg.enforce_hypotheses) {
    std::string msg = "experiment '" + cfg.experiment + "' refused; violated hypotheses:";
    for (const auto& v : violated) msg += "\n  " + v;
    throw GuardRefusal(msg);
  }

  json seeds{{"root_seed", cfg.root_seed},
             {"generator", "philox4x32-10"},
             {"layout", "key = root_seed; counter = (step lo, step hi, pair | tag << 16, replication)"}};
  json config = json::object();
  for (const auto& [k, v] : cfg.entries()) config[k] = v;
  out.summary = {{"experiment", cfg.experiment},
                 {"model", {{"hash", hex64(model.hash())}, {"canonical", model.canonical()}}},
                 {"seeds", seeds},
                 {"config", config},
                 {"audit", audit_json(a)},
                 {"required_verdicts", required},
                 {"hypotheses_enforced", cfg.enforce_hypotheses},
                 {"violated_hypotheses", violated}};

  Context c{cfg, model, initial_state(cfg), run_options(cfg), out};
  if (cfg.experiment == "audit") run_audit(c);
  else if (cfg.experiment == "moments") run_moments(c);
  else if (cfg.experiment == "stability") run_stability(c);
  else if (cfg.experiment == "strong_order") run_strong(c);
  else if (cfg.experiment == "weak_order") run_weak(c);
  else if (cfg.experiment == "invariant_measure") run_invariant(c);
  else if (cfg.experiment == "slln") run_slln(c);
  else if (cfg.experiment == "clt") run_clt(c);
  else if (cfg.experiment == "mlmc") run_mlmc(c);
  else if (cfg.experiment == "operator_checks") run_operator_checks(c);

  json asserts = json::array();
  for (const auto& x : out.assertions) asserts.push_back(assertion_json(x));
  out.summary["assertions"] = asserts;
  out.summary["passed"] = out.passed();
  return out;
}

void write_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
  };
  write("results.csv", outcome.csv);
  json schema{{"experiment", outcome.experiment}, {"file", "results.csv"}, {"columns", json::array()}};
  for (const auto& c : outcome.columns) schema["columns"].push_back({{"name", c.name}, {"description", c.description}});
  write("results.schema.json", schema.dump(2) + "\n");
  write("summary.json", outcome.summary.dump(2) + "\n");
}

}  // namespace smx
