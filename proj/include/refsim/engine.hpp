#pragma once

#include <array>
#include <vector>

#include "refsim/command.hpp"
#include "refsim/geometry.hpp"

namespace refsim {

/// Static inputs of a channel's timing engine (and of the timing oracle).
struct EngineConfig {
  DramGeometry geometry;
  TimingParams timing;  // all-bank 1x timing set
  bool sarp = false;    // subarray access during refresh; scaled tFAW/tRRD while refreshing
  int channel = 0;
  /// tRFCab and rows refreshed per command, indexed by granularity 1x/2x/4x.
  std::array<int, 3> tRFCab_by_granularity{};
  std::array<int, 3> rows_by_granularity{};

  int tRFCab(int granularity) const;
  int rows_per_refresh(int granularity) const;
  int rows_per_refresh_pb() const { return rows_by_granularity[0]; }
};

EngineConfig make_engine_config(const DramGeometry& geometry, const TimingParams& timing,
                                bool sarp, double retention_ms, int channel = 0);

/// Phase of a bank as seen from the command interface.
enum class BankPhase { kPrecharged, kRowOpen, kRefreshing };

/// Per-channel DRAM state tracker. Answers whether a command is legal at a
/// cycle and applies issued commands. Owned by a single controller.
class CommandEngine {
 public:
  explicit CommandEngine(EngineConfig config);

  /// Throws StructuralError when the command addresses outside the geometry.
  IssueCheck is_issuable(const DramCommand& cmd, Cycle now) const;

  /// Throws SimulationError if the command is not issuable at `now`.
  void issue(const DramCommand& cmd, Cycle now);

  const EngineConfig& config() const { return config_; }
  const TimingParams& timing() const { return config_.timing; }

  BankPhase phase(int rank, int bank, Cycle now) const;
  bool bank_open(int rank, int bank) const { return bank_at(rank, bank).open_row >= 0; }
  int open_row(int rank, int bank) const { return bank_at(rank, bank).open_row; }
  int open_subarray(int rank, int bank) const { return bank_at(rank, bank).open_subarray; }
  bool bank_refreshing(int rank, int bank, Cycle now) const {
    return bank_at(rank, bank).refresh_end > now;
  }
  /// Subarray under refresh, or -1 when the bank is not refreshing.
  int refreshing_subarray(int rank, int bank, Cycle now) const;
  Cycle refresh_end(int rank, int bank) const { return bank_at(rank, bank).refresh_end; }
  bool rank_refreshing(int rank, Cycle now) const { return ranks_[rank].refresh_end > now; }
  /// Any bank open or refreshing; drives background energy.
  bool rank_active(int rank, Cycle now) const {
    return ranks_[rank].open_banks > 0 || ranks_[rank].refresh_end > now;
  }

  /// Device-side refresh position of a bank (the subarray the next refresh
  /// command will target, and the row within it).
  int refresh_subarray_counter(int rank, int bank) const { return bank_at(rank, bank).ref_subarray; }
  int local_row_counter(int rank, int bank) const { return bank_at(rank, bank).ref_local_row; }

  Cycle read_data_cycle(Cycle issue) const {
    return issue + config_.timing.tCL + config_.timing.tBURST;
  }

  void set_record_history(bool on) { record_history_ = on; }
  const std::vector<IssuedCommand>& history() const { return history_; }

 private:
  struct Bank {
    int open_row = -1;
    int open_subarray = -1;
    Cycle last_act = -kNever;
    Cycle last_pre = -kNever;
    Cycle last_rd = -kNever;
    Cycle last_wr = -kNever;
    Cycle refresh_end = 0;
    int refreshing_subarray = -1;
    int ref_subarray = 0;
    int ref_local_row = 0;
  };
  struct Rank {
    Cycle last_act = -kNever;  // ACT or REFpb, for tRRD
    std::array<Cycle, 4> act_window{-kNever, -kNever, -kNever, -kNever};
    int window_head = 0;  // index of the oldest entry
    Cycle refresh_end = 0;
    int open_banks = 0;
  };

  const Bank& bank_at(int rank, int bank) const {
    return banks_[static_cast<std::size_t>(rank * config_.geometry.banks_per_rank + bank)];
  }
  Bank& bank_at(int rank, int bank) {
    return banks_[static_cast<std::size_t>(rank * config_.geometry.banks_per_rank + bank)];
  }
  void check_structure(const DramCommand& cmd) const;
  Constraint check_refresh_target(const Bank& b, Cycle now) const;
  void start_refresh(Bank& b, Cycle now, int duration, int rows);

  EngineConfig config_;
  std::vector<Bank> banks_;
  std::vector<Rank> ranks_;
  Cycle last_rd_ = -kNever;
  Cycle last_wr_ = -kNever;
  bool record_history_ = false;
  std::vector<IssuedCommand> history_;
};

}  // namespace refsim
