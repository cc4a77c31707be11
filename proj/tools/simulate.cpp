// Command-line front end over the refsim C API.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "refsim/refsim.h"

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::string solo_path_for(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size()) + ".solo.csv";
  return out + ".solo.csv";
}

int report(refsim_status status) {
  std::fprintf(stderr, "simulate: %s\n", refsim_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level DRAM refresh policy simulator"};
  std::string config_path;
  std::vector<std::string> policies;
  std::vector<std::string> densities;
  std::vector<std::string> traces;
  std::vector<std::string> synthetic;
  std::vector<std::string> settings;
  std::string seed;
  std::string out_path;
  std::string solo_path;
  std::string refresh_log;
  std::string cmd_trace;
  std::string latency_hist;
  int jobs = 0;

  app.add_option("--config", config_path, "Config file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--policy", policies, "Refresh policies to sweep")->expected(1, -1);
  app.add_option("--density", densities, "Chip densities in Gb to sweep")->expected(1, -1);
  app.add_option("--seed", seed, "Base random seed");
  app.add_option("--out", out_path, "Result CSV (stdout when omitted)");
  app.add_option("--solo-out", solo_path, "Solo-run CSV (default: next to --out)");
  app.add_option("--dump-refresh-log", refresh_log, "Write each cell's refresh log CSV");
  app.add_option("--dump-cmd-trace", cmd_trace, "Write each cell's DRAM command trace and check it");
  app.add_option("--latency-histogram", latency_hist, "Write each cell's read latency histogram");
  app.add_option("--trace", traces, "Trace files, cycled over the cores as one workload")
      ->expected(1, -1);
  app.add_option("--synthetic", synthetic, "Synthetic workloads, one sweep entry each")
      ->expected(1, -1)
      ->check(CLI::IsMember({"random", "stream"}));
  app.add_option("--set", settings, "Override a config key: section.key=value")->expected(1, -1);
  app.add_option("--jobs", jobs, "Simulations to run concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return REFSIM_CONFIG_ERROR;
  }

  refsim_experiment* exp = nullptr;
  refsim_status st = config_path.empty() ? refsim_experiment_new(&exp)
                                         : refsim_experiment_load(config_path.c_str(), &exp);
  if (st != REFSIM_OK) return report(st);

  auto set = [&](const std::string& key, const std::string& value) {
    if (st == REFSIM_OK) st = refsim_experiment_set(exp, key.c_str(), value.c_str());
  };
  for (const std::string& kv : settings) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "simulate: --set expects key=value, got '%s'\n", kv.c_str());
      refsim_experiment_free(exp);
      return REFSIM_CONFIG_ERROR;
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!policies.empty()) set("system.policy", join(policies));
  if (!densities.empty()) set("system.density", join(densities));
  if (!seed.empty()) set("system.seed", seed);
  if (jobs > 0) set("system.jobs", std::to_string(jobs));
  for (const std::string& kind : synthetic)
    if (st == REFSIM_OK) st = refsim_experiment_add_synthetic(exp, kind.c_str());
  if (!traces.empty() && st == REFSIM_OK) {
    std::vector<const char*> paths;
    for (const std::string& t : traces) paths.push_back(t.c_str());
    st = refsim_experiment_add_traces(exp, paths.data(), paths.size());
  }
  if (st != REFSIM_OK) {
    const int code = report(st);
    refsim_experiment_free(exp);
    return code;
  }

  refsim_outputs outputs{refresh_log.c_str(), cmd_trace.c_str(), latency_hist.c_str()};
  refsim_results* res = nullptr;
  st = refsim_run(exp, &outputs, &res);
  refsim_experiment_free(exp);
  if (st != REFSIM_OK) return report(st);

  st = refsim_results_write_csv(res, out_path.empty() ? nullptr : out_path.c_str());
  if (st == REFSIM_OK) {
    if (solo_path.empty() && !out_path.empty()) solo_path = solo_path_for(out_path);
    if (!solo_path.empty()) st = refsim_results_write_solo_csv(res, solo_path.c_str());
  }
  refsim_results_free(res);
  if (st != REFSIM_OK) return report(st);
  return 0;
}
