#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "smx/audit.hpp"
#include "smx/config.hpp"
#include "smx/functional.hpp"
#include "smx/model.hpp"

namespace smx {

struct ExperimentInfo {
  std::string_view name;
  std::string_view description;
  std::string_view anchor;  // the statement being exercised
};

std::span<const ExperimentInfo> list_experiments();

/// The model violates a hypothesis the experiment relies on.
class GuardRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked claim: pass iff value <= bound (margin = bound - value), or
/// the interval form lo <= value <= hi (margin = distance to the nearer end).
struct Assertion {
  std::string id;
  std::string description;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct CsvColumn {
  std::string name;
  std::string description;
};

struct ExperimentOutcome {
  std::string experiment;
  nlohmann::json summary;
  std::vector<CsvColumn> columns;
  std::string csv;  // header + rows, deterministic
  std::vector<Assertion> assertions;
  bool passed() const;
};

ModelSpec build_model(const ExperimentConfig& cfg);
StateVector initial_state(const ExperimentConfig& cfg);
Functional build_functional(const ExperimentConfig& cfg);

// Verdict ids the experiment refuses to run without.
std::vector<std::string> required_verdicts(std::string_view experiment, const ExperimentConfig& cfg);
AssumptionAudit config_audit(const ExperimentConfig& cfg);
nlohmann::json audit_json(const AssumptionAudit& a);

// Throws GuardRefusal when a required verdict fails and hypotheses are enforced.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// results.csv, results.schema.json and summary.json in dir.
void write_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

}  // namespace smx
