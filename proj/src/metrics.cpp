#include "refsim/metrics.hpp"

#include <algorithm>

namespace refsim {

std::uint64_t SimStats::command_count(CommandKind kind) const {
  std::uint64_t n = 0;
  for (const auto& c : channel_commands) n += c[static_cast<std::size_t>(kind)];
  return n;
}

void SimStats::add_channel(const ControllerStats& s) {
  channel_commands.push_back(s.commands);
  refresh_nominal += s.refresh_nominal;
  refresh_postponed += s.refresh_postponed;
  refresh_pulled += s.refresh_pulled;
  refresh_forced += s.refresh_forced;
  refresh_during_writeback += s.refresh_during_writeback;
  refresh_units_ab += s.refresh_energy_units_ab;
  refresh_units_pb += s.refresh_energy_units_pb;
  subarray_conflicts += s.subarray_conflicts;
  parallel_accesses += s.parallel_accesses;
  writes_completed += s.writes_served;
  row_hits += s.row_hits;
  row_misses += s.row_misses;
  read_latency_sum += s.read_latency_sum;
  for (const auto& [latency, count] : s.read_latency_histogram) {
    read_latency_histogram[latency] += count;
    reads_completed += count;
  }
  for (std::uint64_t c : s.rank_active_cycles) rank_active_cycles += c;
  for (std::uint64_t c : s.rank_precharged_cycles) rank_precharged_cycles += c;
  dram_cycles = std::max(dram_cycles, s.cycles);
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw MetricError("shared and alone IPC lengths differ");
  if (a.empty()) throw MetricError("no cores");
}

}  // namespace

double weighted_speedup(std::span<const double> shared_ipc, std::span<const double> alone_ipc) {
  check_lengths(shared_ipc, alone_ipc);
  double ws = 0.0;
  for (std::size_t i = 0; i < shared_ipc.size(); ++i) {
    if (!(alone_ipc[i] > 0.0)) throw MetricError("alone IPC must be positive");
    ws += shared_ipc[i] / alone_ipc[i];
  }
  return ws;
}

double harmonic_speedup(std::span<const double> shared_ipc, std::span<const double> alone_ipc) {
  check_lengths(shared_ipc, alone_ipc);
  double denom = 0.0;
  for (std::size_t i = 0; i < shared_ipc.size(); ++i) {
    if (!(shared_ipc[i] > 0.0) || !(alone_ipc[i] > 0.0)) throw MetricError("IPC must be positive");
    denom += alone_ipc[i] / shared_ipc[i];
  }
  return static_cast<double>(shared_ipc.size()) / denom;
}

double max_slowdown(std::span<const double> shared_ipc, std::span<const double> alone_ipc) {
  check_lengths(shared_ipc, alone_ipc);
  double worst = 0.0;
  for (std::size_t i = 0; i < shared_ipc.size(); ++i) {
    if (!(shared_ipc[i] > 0.0)) throw MetricError("shared IPC must be positive");
    worst = std::max(worst, alone_ipc[i] / shared_ipc[i]);
  }
  return worst;
}

EnergyBreakdown energy_accumulate(const SimStats& stats, const CurrentParams& currents,
                                  const TimingParams& timing) {
  const double v_t = currents.vdd * timing.tCK_ns;
  EnergyBreakdown e;
  e.background = v_t * (currents.i_bg_active * static_cast<double>(stats.rank_active_cycles) +
                        currents.i_bg_precharged * static_cast<double>(stats.rank_precharged_cycles));
  e.activate_precharge = v_t * currents.i_act * timing.tRC *
                         static_cast<double>(stats.command_count(CommandKind::kAct));
  e.read_write = v_t * timing.tBURST *
                 (currents.i_rd * static_cast<double>(stats.command_count(CommandKind::kRd)) +
                  currents.i_wr * static_cast<double>(stats.command_count(CommandKind::kWr)));
  e.refresh = v_t * (currents.i_ref_ab * static_cast<double>(stats.refresh_units_ab) +
                     currents.i_ref_pb * static_cast<double>(stats.refresh_units_pb));
  e.total = e.background + e.activate_precharge + e.read_write + e.refresh;
  const std::uint64_t accesses = stats.reads_completed + stats.writes_completed;
  e.per_access = accesses ? e.total / static_cast<double>(accesses) : 0.0;
  return e;
}

}  // namespace refsim
