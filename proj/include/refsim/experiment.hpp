#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refsim/system.hpp"

namespace refsim {

/// A base simulation configuration plus the sweep dimensions.
struct ExperimentConfig {
  SimConfig base;
  std::vector<PolicyKind> policies{PolicyKind::kAllBank};
  std::vector<int> densities{8};
  std::vector<WorkloadMix> workloads;  // empty: base.workload
  int jobs = 1;
  bool oracle_check = false;

  // Policy for the solo runs behind WS denominators; empty means each cell's
  // own policy.
  std::optional<PolicyKind> alone_policy;
  // Source of base.workload, rebuilt whenever a setting changes.
  WorkloadSpec workload_template;
  std::vector<std::string> workload_kinds{"random"};
  std::vector<std::string> workload_traces;
  std::string workload_name;
};

/// Defaults matching the evaluated system: 8 cores, 2 channels, 2 ranks per
/// channel, 8 banks, 8 subarrays, DDR3-1333 timings, 8 Gb, 32 ms retention,
/// and a random-access memory-intensive mix.
ExperimentConfig default_experiment();

/// Line-oriented `key = value` with `[section]` headers and `#` comments.
/// Keys before any header belong to [system]. Throws ConfigError with the
/// line number on syntax errors, unknown keys and invalid values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Applies one setting given as `section.key` (or a bare [system] key).
/// Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Every accepted `section.key`, for documentation and tests.
std::vector<std::string> config_keys();

/// Builds a mix from workload kinds ("random", "stream") or trace paths,
/// cycling over the cores; other parameters come from `tmpl`.
WorkloadMix make_mix(const std::vector<std::string>& kinds_or_traces, bool traces,
                     const WorkloadSpec& tmpl, int cores);

struct ResultRow {
  std::string policy;
  int density_gbit = 0;
  std::string workload;
  std::uint64_t seed = 0;
  double ws = 0.0;
  double hs = 0.0;
  double max_slowdown = 0.0;
  double energy_per_access_pj = 0.0;
  std::uint64_t refresh_count = 0;
  std::uint64_t postponed = 0;
  std::uint64_t pulled_in = 0;
  std::uint64_t forced = 0;
  std::uint64_t subarray_conflicts = 0;
  double avg_read_latency_cycles = 0.0;
};

struct SoloRow {
  std::string policy;
  int density_gbit = 0;
  std::string workload;
  int core = 0;
  double alone_ipc = 0.0;
};

struct SweepOutputs {
  std::string refresh_log_path;
  std::string cmd_trace_path;
  std::string latency_histogram_path;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<SoloRow> solo;
  std::size_t solo_runs = 0;  // simulations actually performed for alone IPCs
};

/// Runs every (workload, policy, density) cell plus the solo runs behind its
/// weighted speedup. Failures are rethrown with the failing cell named, as
/// ConfigError, SimulationError or AuditError.
SweepResult run_experiment(const ExperimentConfig& config, const SweepOutputs& outputs = {});

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_solo_csv(std::ostream& out, const std::vector<SoloRow>& rows);
void write_latency_histogram(std::ostream& out, const SimStats& stats);

}  // namespace refsim
