#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "refsim/controller.hpp"
#include "refsim/geometry.hpp"

namespace refsim {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Whole-system counters for the measured interval.
struct SimStats {
  std::vector<std::uint64_t> core_retired;
  std::vector<std::uint64_t> core_cycles;
  std::vector<std::array<std::uint64_t, 6>> channel_commands;  // indexed by CommandKind
  std::uint64_t refresh_nominal = 0;
  std::uint64_t refresh_postponed = 0;
  std::uint64_t refresh_pulled = 0;
  std::uint64_t refresh_forced = 0;
  std::uint64_t refresh_during_writeback = 0;
  std::uint64_t refresh_units_ab = 0;  // summed tRFC cycles of REFab commands
  std::uint64_t refresh_units_pb = 0;  // summed tRFC cycles of REFpb commands
  std::uint64_t subarray_conflicts = 0;
  std::uint64_t parallel_accesses = 0;
  std::uint64_t reads_completed = 0;
  std::uint64_t writes_completed = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t read_latency_sum = 0;
  std::map<Cycle, std::uint64_t> read_latency_histogram;
  std::uint64_t rank_active_cycles = 0;      // summed over ranks
  std::uint64_t rank_precharged_cycles = 0;  // summed over ranks
  Cycle dram_cycles = 0;

  std::uint64_t command_count(CommandKind kind) const;
  std::uint64_t refresh_count() const {
    return command_count(CommandKind::kRefAb) + command_count(CommandKind::kRefPb);
  }
  double avg_read_latency() const {
    return reads_completed ? static_cast<double>(read_latency_sum) / static_cast<double>(reads_completed)
                           : 0.0;
  }
  double row_hit_rate() const {
    const std::uint64_t cas = row_hits + row_misses;
    return cas ? static_cast<double>(row_hits) / static_cast<double>(cas) : 0.0;
  }

  /// Folds one channel's controller counters in.
  void add_channel(const ControllerStats& s);
};

/// Energies in picojoules (mA x V x ns).
struct EnergyBreakdown {
  double background = 0.0;
  double activate_precharge = 0.0;
  double read_write = 0.0;
  double refresh = 0.0;
  double total = 0.0;
  double per_access = 0.0;
};

/// Throws MetricError on mismatched lengths or a zero alone IPC.
double weighted_speedup(std::span<const double> shared_ipc, std::span<const double> alone_ipc);
/// Throws MetricError on mismatched lengths or a zero IPC.
double harmonic_speedup(std::span<const double> shared_ipc, std::span<const double> alone_ipc);
double max_slowdown(std::span<const double> shared_ipc, std::span<const double> alone_ipc);

EnergyBreakdown energy_accumulate(const SimStats& stats, const CurrentParams& currents,
                                  const TimingParams& timing);

}  // namespace refsim
