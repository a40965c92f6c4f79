#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "smx/config.hpp"
#include "smx/experiments.hpp"
#include "smx/parallel.hpp"

using namespace smx;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

void expect_error(const std::string& text, int line, int column, const std::string& fragment) {
  try {
    parse(text);
    FAIL("expected a ConfigError for: " << text);
  } catch (const ConfigError& e) {
    CHECK(e.line() == line);
    CHECK(e.column() == column);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    CHECK(std::string(e.what()).rfind("test.cfg:" + std::to_string(line) + ":" + std::to_string(column) + ":", 0) == 0);
  }
}

// Small enough to run in a unit test.
ExperimentConfig tiny(const std::string& experiment) {
  auto c = parse("experiment = " + experiment +
                 "\nmodes = 8\nnoise_modes = 8\nreplications = 40\nlevels = 2,3,4\nlevel_ref = 7\n"
                 "steps = 400\nlog_every = 20\ndt = 0.0625\nT_long = 60\nburn_in = 2\nref_depth = 2\n"
                 "checkpoints = 100,1000\nouter_samples = 8\ninner_paths = 4\nrelax_horizon = 2\n"
                 "mlmc_L = 2\nprobe_samples = 200\nreference_samples = 400\nop_k_max = 64\n"
                 "enforce_hypotheses = false\n");
  return c;
}

}  // namespace

TEST_CASE("empty config gives defaults") {
  const auto c = parse("");
  const ExperimentConfig d;
  CHECK(c.entries() == d.entries());
  CHECK(c.experiment == "audit");
  CHECK(c.sigma0 == 3.0);
  CHECK(c.modes == 64);
  CHECK(c.levels == std::vector<int>{3, 4, 5, 6, 7, 8});
  CHECK(c.enforce_hypotheses);
}

TEST_CASE("values, lists and comments") {
  const auto c = parse("# a comment\n  sigma0 = 4.5   # trailing\nlevels = 2, 3 ,5\nenforce_hypotheses = false\n\n"
                       "functional = cos_pairing\nroot_seed = 18446744073709551615\n");
  CHECK(c.sigma0 == 4.5);
  CHECK(c.levels == std::vector<int>{2, 3, 5});
  CHECK(!c.enforce_hypotheses);
  CHECK(c.functional == "cos_pairing");
  CHECK(c.root_seed == 18446744073709551615ull);
}

TEST_CASE("errors carry line and column") {
  expect_error("sigma0 = 3\nsigmaO = 3\n", 2, 1, "unknown key 'sigmaO'");
  expect_error("sigma0 = 3\n  sigma0 = 4\n", 2, 3, "duplicate key");
  expect_error("modes 64\n", 1, 1, "expected 'key = value'");
  expect_error("modes =\n", 1, 8, "missing value");
  expect_error("\n\nmodes = sixty\n", 3, 9, "modes");
  expect_error("levels = 3,,4\n", 1, 10, "levels");
  expect_error(" = 4\n", 1, 2, "missing key");
  expect_error("enforce_hypotheses = maybe\n", 1, 22, "enforce_hypotheses");
  CHECK_THROWS(load_config("/nonexistent/dir/x.cfg"));
}

TEST_CASE("registry") {
  const auto list = list_experiments();
  CHECK(list.size() == 10);
  auto has = [&](std::string_view n) {
    return std::ranges::any_of(list, [&](const auto& e) { return e.name == n; });
  };
  CHECK(has("weak_order"));
  CHECK(has("mlmc"));
  CHECK(has("audit"));
}

TEST_CASE("guard") {
  ExperimentConfig c;
  c.experiment = "weak_order";
  try {
    run_experiment(c);
    FAIL("expected a refusal");
  } catch (const GuardRefusal& e) {
    CHECK(std::string(e.what()).find("sigma0 >") != std::string::npos);
  }
  c.experiment = "audit";
  const auto out = run_experiment(c);
  CHECK(out.summary["model"]["hash"].is_string());
  CHECK(out.summary.contains("audit"));
  CHECK(out.summary.contains("seeds"));
  c.experiment = "nonsense";
  CHECK_THROWS(run_experiment(c));
}

TEST_CASE("every experiment runs at small scale and writes its files") {
  const auto dir = std::filesystem::temp_directory_path() / "smx_unit_outputs";
  for (const auto& info : list_experiments()) {
    CAPTURE(info.name);
    const auto cfg = tiny(std::string(info.name));
    const auto out = run_experiment(cfg);
    CHECK(out.experiment == info.name);
    CHECK(!out.csv.empty());
    CHECK(out.summary.contains("assertions"));
    CHECK(out.summary["model"]["hash"].is_string());
    for (const auto& a : out.summary["assertions"]) {
      CHECK(a.contains("pass"));
      CHECK(a.contains("margin"));
    }
    // header row names the declared columns
    const auto header = out.csv.substr(0, out.csv.find('\n'));
    std::string expect;
    for (const auto& c : out.columns) expect += (expect.empty() ? "" : ",") + c.name;
    CHECK(header == expect);
    write_outputs(out, dir / info.name);
    for (auto f : {"results.csv", "results.schema.json", "summary.json"}) CHECK(std::filesystem::exists(dir / info.name / f));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("outputs are byte-identical for the same seed and any thread count") {
  auto c = tiny("strong_order");
  set_thread_count(1);
  const auto a = run_experiment(c);
  set_thread_count(4);
  const auto b = run_experiment(c);
  set_thread_count(0);
  CHECK(a.csv == b.csv);
  CHECK(a.summary.dump() == b.summary.dump());
  c.root_seed = 1;
  CHECK(run_experiment(c).csv != a.csv);
}
