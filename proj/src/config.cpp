#include "smx/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <string_view>

namespace smx {

ConfigError::ConfigError(std::string source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw std::invalid_argument("not a valid number: '" + std::string(v) + "'");
  return out;
}

void parse_into(std::string_view v, double& out) {
  out = parse_number<double>(v);
  if (!std::isfinite(out)) throw std::invalid_argument("value must be finite");
}
void parse_into(std::string_view v, std::uint64_t& out) {
  if (!v.empty() && v.front() == '-') throw std::invalid_argument("value must be non-negative");
  out = parse_number<std::uint64_t>(v);
}
void parse_into(std::string_view v, int& out) { out = parse_number<int>(v); }
void parse_into(std::string_view v, long& out) { out = parse_number<long>(v); }
void parse_into(std::string_view v, std::string& out) { out = std::string(v); }
void parse_into(std::string_view v, bool& out) {
  if (v == "true" || v == "1") out = true;
  else if (v == "false" || v == "0") out = false;
  else throw std::invalid_argument("expected true or false");
}
template <class T>
void parse_into(std::string_view v, std::vector<T>& out) {
  out.clear();
  while (true) {
    const auto comma = v.find(',');
    T item{};
    parse_into(trim(v.substr(0, comma)), item);
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
}

std::string format(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
std::string format(std::uint64_t x) { return std::to_string(x); }
std::string format(int x) { return std::to_string(x); }
std::string format(long x) { return std::to_string(x); }
std::string format(const std::string& x) { return x; }
std::string format(bool x) { return x ? "true" : "false"; }
template <class T>
std::string format(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format(xs[i]);
  return s;
}

struct Key {
  std::string_view name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Key key(std::string_view name, T ExperimentConfig::*member) {
  return {name, [member](ExperimentConfig& c, std::string_view v) { parse_into(v, c.*member); },
          [member](const ExperimentConfig& c) { return format(c.*member); }};
}

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  static const std::vector<Key> k{
      key("experiment", &C::experiment),
      key("sigma0", &C::sigma0),
      key("drift", &C::drift),
      key("lambda_f", &C::lambda_f),
      key("diffusion", &C::diffusion),
      key("lambda_b", &C::lambda_b),
      key("modes", &C::modes),
      key("noise_modes", &C::noise_modes),
      key("q_decay", &C::q_decay),
      key("frequency_offset", &C::frequency_offset),
      key("frequency_scale", &C::frequency_scale),
      key("u0_amplitude", &C::u0_amplitude),
      key("u0_decay", &C::u0_decay),
      key("functional", &C::functional),
      key("functional_cap", &C::functional_cap),
      key("pairing_decay", &C::pairing_decay),
      key("T", &C::T),
      key("levels", &C::levels),
      key("level_ref", &C::level_ref),
      key("dt", &C::dt),
      key("steps", &C::steps),
      key("log_every", &C::log_every),
      key("fp_tol", &C::fp_tol),
      key("fp_max_iter", &C::fp_max_iter),
      key("replications", &C::replications),
      key("moment_q", &C::moment_q),
      key("norm_order", &C::norm_order),
      key("audit_r", &C::audit_r),
      key("burn_in", &C::burn_in),
      key("batches", &C::batches),
      key("T_long", &C::T_long),
      key("ref_depth", &C::ref_depth),
      key("checkpoints", &C::checkpoints),
      key("clt_lambda", &C::clt_lambda),
      key("outer_samples", &C::outer_samples),
      key("inner_paths", &C::inner_paths),
      key("relax_horizon", &C::relax_horizon),
      key("mlmc_L0", &C::mlmc_L0),
      key("mlmc_L", &C::mlmc_L),
      key("mlmc_eps", &C::mlmc_eps),
      key("probe_samples", &C::probe_samples),
      key("reference_samples", &C::reference_samples),
      key("op_sigma0", &C::op_sigma0),
      key("op_g", &C::op_g),
      key("op_g_tilde", &C::op_g_tilde),
      key("op_k_max", &C::op_k_max),
      key("full_grids", &C::full_grids),
      key("root_seed", &C::root_seed),
      key("threads", &C::threads),
      key("output_dir", &C::output_dir),
      key("enforce_hypotheses", &C::enforce_hypotheses),
  };
  return k;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(std::string(k.name), k.get(*this));
  return out;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto col_of = [&](std::string_view part) { return static_cast<int>(part.data() - raw.data()) + 1; };
    const auto eq = line.find('=');
    const std::string_view name = trim(line.substr(0, eq));
    if (eq == std::string_view::npos)
      throw ConfigError(source, line_no, col_of(trim(line)), "expected 'key = value'");
    if (name.empty()) throw ConfigError(source, line_no, static_cast<int>(eq) + 1, "missing key before '='");
    const std::string_view value = trim(line.substr(eq + 1));
    const int value_col = value.empty() ? static_cast<int>(eq) + 2 : col_of(value);
    const Key* k = nullptr;
    for (const auto& candidate : keys())
      if (candidate.name == name) k = &candidate;
    if (!k) throw ConfigError(source, line_no, col_of(name), "unknown key '" + std::string(name) + "'");
    if (!seen.insert(std::string(name)).second)
      throw ConfigError(source, line_no, col_of(name), "duplicate key '" + std::string(name) + "'");
    if (value.empty()) throw ConfigError(source, line_no, value_col, "missing value for '" + std::string(name) + "'");
    try {
      k->set(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(source, line_no, value_col, std::string(name) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path.string() + "'");
  return parse_config(in, path.string());
}

}  // namespace smx
