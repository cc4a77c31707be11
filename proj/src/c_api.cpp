#include "refsim/refsim.h"

#include <fstream>
#include <iostream>
#include <string>

#include "refsim/experiment.hpp"

struct refsim_experiment {
  refsim::ExperimentConfig config;
};

struct refsim_results {
  refsim::SweepResult sweep;
};

namespace {

thread_local std::string last_error;

refsim_status fail(refsim_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
refsim_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return REFSIM_OK;
  } catch (const refsim::ConfigError& e) {
    return fail(REFSIM_CONFIG_ERROR, e.what());
  } catch (const refsim::TraceParseError& e) {
    return fail(REFSIM_CONFIG_ERROR, e.what());
  } catch (const refsim::AuditError& e) {
    return fail(REFSIM_AUDIT_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(REFSIM_SIMULATION_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(REFSIM_SIMULATION_ERROR, e.what());
  }
}

template <typename W>
refsim_status write_to(const char* path, W&& writer) {
  if (path == nullptr || *path == '\0') {
    writer(std::cout);
    std::cout.flush();
    return std::cout ? REFSIM_OK : fail(REFSIM_CONFIG_ERROR, "cannot write to stdout");
  }
  std::ofstream out(path);
  if (!out) return fail(REFSIM_CONFIG_ERROR, std::string("cannot write '") + path + "'");
  writer(out);
  return out ? REFSIM_OK : fail(REFSIM_CONFIG_ERROR, std::string("error writing '") + path + "'");
}

}  // namespace

extern "C" {

const char* refsim_last_error(void) { return last_error.c_str(); }

refsim_status refsim_experiment_new(refsim_experiment** out) {
  if (out == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] { *out = new refsim_experiment{refsim::default_experiment()}; });
}

refsim_status refsim_experiment_load(const char* path, refsim_experiment** out) {
  if (out == nullptr || path == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new refsim_experiment{refsim::load_config(path)}; });
}

void refsim_experiment_free(refsim_experiment* exp) { delete exp; }

refsim_status refsim_experiment_set(refsim_experiment* exp, const char* key, const char* value) {
  if (exp == nullptr || key == nullptr || value == nullptr)
    return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { refsim::apply_setting(exp->config, key, value); });
}

refsim_status refsim_experiment_add_synthetic(refsim_experiment* exp, const char* kind) {
  if (exp == nullptr || kind == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    exp->config.workloads.push_back(refsim::make_mix({kind}, false, exp->config.workload_template,
                                                     exp->config.base.cores));
  });
}

refsim_status refsim_experiment_add_traces(refsim_experiment* exp, const char* const* paths,
                                           size_t count) {
  if (exp == nullptr || (paths == nullptr && count > 0))
    return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::vector<std::string> list;
    for (size_t i = 0; i < count; ++i) {
      if (paths[i] == nullptr) throw refsim::ConfigError("NULL trace path");
      list.emplace_back(paths[i]);
    }
    exp->config.workloads.push_back(
        refsim::make_mix(list, true, exp->config.workload_template, exp->config.base.cores));
  });
}

refsim_status refsim_run(const refsim_experiment* exp, const refsim_outputs* outputs,
                         refsim_results** out) {
  if (exp == nullptr || out == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    refsim::SweepOutputs o;
    if (outputs != nullptr) {
      if (outputs->refresh_log) o.refresh_log_path = outputs->refresh_log;
      if (outputs->cmd_trace) o.cmd_trace_path = outputs->cmd_trace;
      if (outputs->latency_histogram) o.latency_histogram_path = outputs->latency_histogram;
    }
    *out = new refsim_results{refsim::run_experiment(exp->config, o)};
  });
}

void refsim_results_free(refsim_results* res) { delete res; }

size_t refsim_results_count(const refsim_results* res) {
  return res == nullptr ? 0 : res->sweep.rows.size();
}

refsim_status refsim_results_ws(const refsim_results* res, size_t index, double* ws) {
  if (res == nullptr || ws == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  if (index >= res->sweep.rows.size()) return fail(REFSIM_INVALID_ARGUMENT, "index out of range");
  *ws = res->sweep.rows[index].ws;
  return REFSIM_OK;
}

refsim_status refsim_results_write_csv(const refsim_results* res, const char* path) {
  if (res == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  return write_to(path, [&](std::ostream& out) { refsim::write_results_csv(out, res->sweep.rows); });
}

refsim_status refsim_results_write_solo_csv(const refsim_results* res, const char* path) {
  if (res == nullptr) return fail(REFSIM_INVALID_ARGUMENT, "NULL argument");
  return write_to(path, [&](std::ostream& out) { refsim::write_solo_csv(out, res->sweep.solo); });
}

}  // extern "C"
