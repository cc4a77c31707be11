#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "refsim/experiment.hpp"

using namespace refsim;

namespace {

// Small enough to run in a unit test, long enough that refresh shows up.
ExperimentConfig small_sweep() {
  std::istringstream in(
      "cores = 2\n"
      "warmup_cycles = 5000\n"
      "measured_cycles = 60000\n"
      "policy = ab, pb, darp, sarp-pb, dsarp, noref\n"
      "density = 8, 16, 32\n"
      "[workload]\n"
      "intensity = 2\n");
  return parse_config(in);
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream out;
  write_results_csv(out, r.rows);
  write_solo_csv(out, r.solo);
  return out.str();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  std::istringstream in("density = 32\n");
  const ExperimentConfig c = parse_config(in);
  const ExperimentConfig d = default_experiment();
  CHECK(c.densities == std::vector<int>{32});
  CHECK(c.base.density_gbit == 32);
  CHECK(c.base.cores == d.base.cores);
  CHECK(c.base.geometry.channels == 2);
  CHECK(c.base.geometry.ranks_per_channel == 2);
  CHECK(c.base.geometry.subarrays_per_bank == 8);
  CHECK(c.base.retention_ms == 32.0);
  CHECK(c.base.controller.read_queue_capacity == 64);
  CHECK(c.policies == d.policies);

  std::istringstream dsarp("[system]\npolicy = dsarp  # comment\n");
  CHECK(parse_config(dsarp).policies == std::vector<PolicyKind>{PolicyKind::kDsarp});
}

TEST_CASE("config errors name the key and line") {
  std::istringstream bad("\npolicy = banana\n");
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("system.policy") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
  std::istringstream unknown("[timing]\ntbanana = 3\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream syntax("[timing\n");
  CHECK_THROWS_AS(parse_config(syntax), ConfigError);
  std::istringstream no_eq("density 8\n");
  CHECK_THROWS_AS(parse_config(no_eq), ConfigError);
  ExperimentConfig c = default_experiment();
  CHECK_THROWS_AS(apply_setting(c, "density", "12"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "core.window", "lots"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/refsim.cfg"), ConfigError);
}

TEST_CASE("every documented key is accepted by apply_setting") {
  const auto keys = config_keys();
  CHECK(std::find(keys.begin(), keys.end(), "system.policy") != keys.end());
  CHECK(std::find(keys.begin(), keys.end(), "workload.intensity") != keys.end());
  CHECK(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
}

TEST_CASE("a small sweep") {
  ExperimentConfig c = small_sweep();
  const SweepResult serial = run_experiment(c);
  REQUIRE(serial.rows.size() == 18);

  SUBCASE("rows are well formed and no-refresh is the ceiling") {
    for (const ResultRow& r : serial.rows) {
      CHECK(r.ws > 0.0);
      CHECK(r.ws <= 2.0 + 1e-9);
      CHECK(r.hs > 0.0);
      if (r.policy == "noref") CHECK(r.refresh_count == 0);
      else CHECK(r.refresh_count > 0);
    }
    for (int density : {8, 16, 32}) {
      double noref = 0.0, best_other = 0.0;
      for (const ResultRow& r : serial.rows) {
        if (r.density_gbit != density) continue;
        if (r.policy == "noref") noref = r.ws;
        else best_other = std::max(best_other, r.ws);
      }
      CHECK(noref >= best_other);
    }
    // Solo runs use the no-refresh baseline: one per core and density, shared by all policies.
    CHECK(serial.solo_runs == 6);
  }

  SUBCASE("repeat runs are byte identical") {
    CHECK(csv_of(run_experiment(c)) == csv_of(serial));
  }

  SUBCASE("parallel jobs give the serial answer") {
    c.jobs = 3;
    CHECK(csv_of(run_experiment(c)) == csv_of(serial));
  }
}

TEST_CASE("solo runs follow each policy when alone_policy is same") {
  ExperimentConfig c = small_sweep();
  apply_setting(c, "policy", "ab, pb");
  apply_setting(c, "density", "8");
  apply_setting(c, "alone_policy", "same");
  const SweepResult r = run_experiment(c);
  CHECK(r.rows.size() == 2);
  CHECK(r.solo_runs == 4);
  std::set<std::string> solo_policies;
  for (const SoloRow& s : r.solo) solo_policies.insert(s.policy);
  CHECK(solo_policies == std::set<std::string>{"ab", "pb"});
}

TEST_CASE("CSV header") {
  std::ostringstream out;
  write_results_csv(out, {});
  CHECK(out.str().rfind("policy,density_gbit,workload,seed,ws,hs", 0) == 0);
}
