#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "refsim/engine.hpp"
#include "refsim/refresh_policy.hpp"
#include "refsim/sarp.hpp"

namespace refsim {

enum class RequestKind : std::uint8_t { kRead, kWrite };

struct DecodedAddress {
  int channel = 0;
  int rank = 0;
  int bank = 0;
  int subarray = 0;
  int row = 0;
  int column = 0;
  bool operator==(const DecodedAddress&) const = default;
};

struct MemRequest {
  std::uint64_t id = 0;
  int core = 0;
  RequestKind kind = RequestKind::kRead;
  DecodedAddress addr;
  Cycle arrival = 0;
  Cycle completion = -1;
  bool activated = false;          // an ACT was issued on this request's behalf
  bool saw_refresh_conflict = false;
};

struct ControllerConfig {
  int read_queue_capacity = 64;
  int write_queue_capacity = 64;
  int high_watermark = 48;
  int low_watermark = 32;
  /// Serve writes when no reads are queued, outside writeback mode.
  bool drain_writes_when_idle = true;
};

enum class EnqueueResult { kAccepted, kBackpressure };

struct ControllerStats {
  std::array<std::uint64_t, 6> commands{};  // indexed by CommandKind
  std::uint64_t reads_served = 0;
  std::uint64_t writes_served = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t refresh_nominal = 0;
  std::uint64_t refresh_postponed = 0;
  std::uint64_t refresh_pulled = 0;
  std::uint64_t refresh_forced = 0;
  std::uint64_t refresh_during_writeback = 0;
  std::uint64_t refresh_energy_units_ab = 0;  // sum of tRFC cycles of all-bank refreshes
  std::uint64_t refresh_energy_units_pb = 0;  // sum of tRFC cycles of per-bank refreshes
  std::uint64_t subarray_conflicts = 0;
  std::uint64_t parallel_accesses = 0;  // ACTs to a bank while it refreshes
  std::uint64_t read_latency_sum = 0;
  std::map<Cycle, std::uint64_t> read_latency_histogram;
  std::uint64_t writeback_episodes = 0;
  int max_occupancy_at_exit = 0;
  int min_occupancy_at_entry = 1 << 30;
  std::vector<std::uint64_t> rank_active_cycles;
  std::vector<std::uint64_t> rank_precharged_cycles;
  Cycle cycles = 0;

  std::uint64_t refreshes() const {
    return commands[static_cast<std::size_t>(CommandKind::kRefAb)] +
           commands[static_cast<std::size_t>(CommandKind::kRefPb)];
  }
};

/// One channel's memory controller: bounded read/write queues, FR-FCFS with
/// a closed-row policy, watermark write batching, and commands generated at
/// the moment they are issued (no command queue).
class MemoryController final : private RefreshContext {
 public:
  MemoryController(const ControllerConfig& config, const EngineConfig& engine_config,
                   std::unique_ptr<RefreshPolicy> policy);

  EnqueueResult enqueue(const MemRequest& req);

  /// Issues at most one command. Reads whose data returned by `now` are
  /// moved to completed().
  void tick(Cycle now);

  std::vector<MemRequest>& completed() { return completed_; }

  bool writeback_active() const override { return writeback_; }
  std::size_t read_queue_size() const { return reads_.size(); }
  std::size_t write_queue_size() const { return writes_.size(); }
  std::size_t reads_in_flight() const { return in_flight_.size(); }

  const CommandEngine& engine() const { return engine_; }
  CommandEngine& engine() { return engine_; }
  const RefreshPolicy& policy() const { return *policy_; }
  const ShadowRefreshCounters& shadow_counters() const { return shadow_; }
  const ControllerStats& stats() const { return stats_; }
  void reset_stats();

  /// Enter writeback at the high watermark, leave at the low one.
  void writeback_tick();

  // RefreshContext, also useful to tests.
  int pending_demands(int rank, int bank) const override;
  int pending_demands_rank(int rank) const override;
  bool read_queue_empty() const override { return reads_.empty(); }
  bool refresh_in_progress(int rank, Cycle now) const override {
    return engine_.rank_refreshing(rank, now);
  }
  bool can_issue_refresh(const RefreshTarget& target, Cycle now) const override;

 private:
  int flat(int rank, int bank) const { return rank * banks_per_rank_ + bank; }
  DramCommand refresh_command(const RefreshTarget& target) const;
  DramCommand demand_command(CommandKind kind, const MemRequest& req) const;
  void issue(const DramCommand& cmd, Cycle now);
  bool issue_refresh_work(Cycle now);
  bool issue_demand(Cycle now);
  bool finish_opened_writes(Cycle now);
  bool issue_closed_row_precharge(Cycle now);
  bool issue_opportunistic_refresh(Cycle now);
  void mark_blocked(const RefreshTarget& target);
  bool act_blocked(const MemRequest& req) const;
  void erase_request(std::vector<MemRequest>& queue, std::size_t index);

  ControllerConfig config_;
  CommandEngine engine_;
  std::unique_ptr<RefreshPolicy> policy_;
  ShadowRefreshCounters shadow_;
  int banks_per_rank_;
  int ranks_;

  std::vector<MemRequest> reads_;
  std::vector<MemRequest> writes_;
  std::vector<int> pending_;       // per flat bank, reads + writes
  std::vector<int> pending_rank_;  // per rank
  std::deque<MemRequest> in_flight_;
  std::vector<MemRequest> completed_;
  bool writeback_ = false;

  // Per-cycle scratch.
  std::vector<int> blocked_subarray_;  // -2 free, -1 whole bank, else subarray
  std::vector<std::uint8_t> has_hit_;
  std::vector<std::uint8_t> wanted_;  // the active queue has a request for the bank
  bool any_blocked_ = false;

  ControllerStats stats_;
};

}  // namespace refsim
