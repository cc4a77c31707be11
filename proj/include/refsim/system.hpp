#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "refsim/controller.hpp"
#include "refsim/metrics.hpp"
#include "refsim/oracle.hpp"
#include "refsim/retention_audit.hpp"
#include "refsim/workload.hpp"

namespace refsim {

enum class WorkloadKind { kRandom, kStream, kTrace };

/// What one core runs.
struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kRandom;
  std::string trace_path;
  std::uint64_t footprint_bytes = 256ULL << 20;
  double read_fraction = 0.75;
  double intensity = 10.0;
  std::uint64_t stride = 64;

  /// Stable identity used for solo-run caching and trace seeding.
  std::string key() const;
};

/// One workload per core, plus the name reported in result rows.
struct WorkloadMix {
  std::string name;
  std::vector<WorkloadSpec> per_core;
};

struct SimConfig {
  DramGeometry geometry;
  RawTimings raw;
  CurrentParams currents;
  int density_gbit = 8;
  double retention_ms = 32.0;
  PolicyKind policy = PolicyKind::kAllBank;
  ControllerConfig controller;
  CoreParams core;
  int cores = 8;
  WorkloadMix workload;
  Cycle warmup_cycles = 1'000'000;
  Cycle measured_cycles = 50'000'000;
  std::uint64_t seed = 1;
  bool page_translation = true;
  std::array<AddressField, 5> address_order = AddressMap::kDefaultOrder;

  /// Throws ConfigError.
  void validate() const;
};

struct RunOptions {
  /// Cores to instantiate; empty means all of them. A solo run lists one.
  std::vector<int> only_cores;
  bool record_commands = false;
  bool audit = true;
};

struct RunResult {
  std::vector<int> core_ids;
  std::vector<double> ipc;  // parallel to core_ids
  SimStats stats;
  EnergyBreakdown energy;
  bool audited = false;
  AuditReport audit;
  std::vector<RefreshLogEntry> refresh_log;  // all channels, in issue order per channel
  std::vector<EngineConfig> engine_configs;  // per channel
  std::vector<std::vector<IssuedCommand>> command_history;  // per channel, when recorded
  TimingParams timing;
  std::uint64_t reads_sent = 0;       // over the whole run including warmup
  std::uint64_t reads_completed = 0;
  std::uint64_t reads_in_system = 0;  // queued or in flight at the end
  std::uint64_t writes_sent = 0;
  Cycle max_read_latency = 0;
  std::uint64_t writeback_episodes = 0;
  int min_occupancy_at_entry = 0;
  int max_occupancy_at_exit = 0;
};

/// Trace seed for core `core` running `spec` under base seed `seed`.
std::uint64_t workload_seed(std::uint64_t seed, int core, const WorkloadSpec& spec);

std::unique_ptr<TraceSource> make_trace_source(const WorkloadSpec& spec, std::uint64_t seed);

/// Runs warmup then the measured interval. Throws SimulationError if the
/// controller ever attempts an illegal command.
RunResult run_simulation(const SimConfig& config, const RunOptions& options = {});

}  // namespace refsim
