#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "refsim/refsim.h"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

refsim_experiment* tiny_experiment() {
  refsim_experiment* exp = nullptr;
  REQUIRE(refsim_experiment_new(&exp) == REFSIM_OK);
  REQUIRE(refsim_experiment_set(exp, "cores", "2") == REFSIM_OK);
  REQUIRE(refsim_experiment_set(exp, "system.warmup_cycles", "1000") == REFSIM_OK);
  REQUIRE(refsim_experiment_set(exp, "system.measured_cycles", "20000") == REFSIM_OK);
  REQUIRE(refsim_experiment_set(exp, "policy", "pb,noref") == REFSIM_OK);
  return exp;
}

}  // namespace

TEST_CASE("null handles and bad indices") {
  CHECK(refsim_experiment_new(nullptr) == REFSIM_INVALID_ARGUMENT);
  CHECK(refsim_experiment_set(nullptr, "cores", "2") == REFSIM_INVALID_ARGUMENT);
  CHECK(refsim_run(nullptr, nullptr, nullptr) == REFSIM_INVALID_ARGUMENT);
  CHECK(refsim_results_count(nullptr) == 0);
  double ws = 0;
  CHECK(refsim_results_ws(nullptr, 0, &ws) == REFSIM_INVALID_ARGUMENT);
  refsim_experiment_free(nullptr);
  refsim_results_free(nullptr);
  CHECK(refsim_last_error() != nullptr);
}

TEST_CASE("configuration errors") {
  refsim_experiment* exp = nullptr;
  REQUIRE(refsim_experiment_new(&exp) == REFSIM_OK);
  CHECK(refsim_experiment_set(exp, "policy", "banana") == REFSIM_CONFIG_ERROR);
  CHECK(std::string(refsim_last_error()).find("system.policy") != std::string::npos);
  CHECK(refsim_experiment_set(exp, "no.such_key", "1") == REFSIM_CONFIG_ERROR);
  CHECK(refsim_experiment_add_synthetic(exp, "zipf") == REFSIM_CONFIG_ERROR);
  refsim_experiment_free(exp);
  CHECK(refsim_experiment_load("/nonexistent/x.cfg", &exp) == REFSIM_CONFIG_ERROR);

  // Trace files are read when the run starts.
  exp = tiny_experiment();
  const char* missing[] = {"/nonexistent/a.trace"};
  REQUIRE(refsim_experiment_add_traces(exp, missing, 1) == REFSIM_OK);
  refsim_results* res = nullptr;
  CHECK(refsim_run(exp, nullptr, &res) == REFSIM_CONFIG_ERROR);
  CHECK(res == nullptr);
  CHECK(std::string(refsim_last_error()).find("a.trace") != std::string::npos);
  refsim_experiment_free(exp);
}

TEST_CASE("run and write results") {
  refsim_experiment* exp = tiny_experiment();
  refsim_results* res = nullptr;
  REQUIRE(refsim_run(exp, nullptr, &res) == REFSIM_OK);
  REQUIRE(refsim_results_count(res) == 2);
  double ws_pb = 0, ws_noref = 0;
  CHECK(refsim_results_ws(res, 0, &ws_pb) == REFSIM_OK);
  CHECK(refsim_results_ws(res, 1, &ws_noref) == REFSIM_OK);
  CHECK(ws_pb > 0.0);
  CHECK(ws_noref >= ws_pb);
  CHECK(refsim_results_ws(res, 2, &ws_pb) == REFSIM_INVALID_ARGUMENT);

  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = dir / "refsim_capi.csv";
  CHECK(refsim_results_write_csv(res, csv.string().c_str()) == REFSIM_OK);
  const std::string text = slurp(csv);
  CHECK(text.rfind("policy,", 0) == 0);
  CHECK(text.find("\npb,8,") != std::string::npos);
  CHECK(refsim_results_write_csv(res, "/nonexistent/dir/out.csv") == REFSIM_CONFIG_ERROR);
  std::filesystem::remove(csv);
  refsim_results_free(res);

  // Per-cell dumps get tagged names.
  const std::string log = (dir / "refsim_capi_log.csv").string();
  refsim_outputs outputs{log.c_str(), nullptr, nullptr};
  REQUIRE(refsim_run(exp, &outputs, &res) == REFSIM_OK);
  CHECK(std::filesystem::exists(dir / "refsim_capi_log.pb-8-random.csv"));
  std::filesystem::remove(dir / "refsim_capi_log.pb-8-random.csv");
  std::filesystem::remove(dir / "refsim_capi_log.noref-8-random.csv");
  refsim_results_free(res);
  refsim_experiment_free(exp);
}
