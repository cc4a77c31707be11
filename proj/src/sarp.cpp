#include "refsim/sarp.hpp"

namespace refsim {

int subarray_of_row(int row, const DramGeometry& geometry) {
  if (row < 0 || row >= geometry.rows_per_bank) throw StructuralError("row out of range");
  return row / geometry.rows_per_subarray();
}

SubarrayRefreshCounter sarp_refresh_advance(SubarrayRefreshCounter counter, int rows,
                                            const DramGeometry& geometry) {
  const int per_subarray = geometry.rows_per_subarray();
  const int total = counter.local_row + rows;
  counter.local_row = total % per_subarray;
  counter.refresh_subarray =
      (counter.refresh_subarray + total / per_subarray) % geometry.subarrays_per_bank;
  return counter;
}

ShadowRefreshCounters::ShadowRefreshCounters(const DramGeometry& geometry,
                                             const EngineConfig& engine_config)
    : geometry_(geometry),
      engine_config_(engine_config),
      banks_per_rank_(geometry.banks_per_rank),
      counters_(static_cast<std::size_t>(geometry.banks_per_channel())) {}

void ShadowRefreshCounters::on_refresh(const DramCommand& cmd) {
  if (cmd.kind == CommandKind::kRefPb) {
    auto& c = counters_[static_cast<std::size_t>(cmd.rank * banks_per_rank_ + cmd.bank)];
    c = sarp_refresh_advance(c, engine_config_.rows_per_refresh_pb(), geometry_);
  } else if (cmd.kind == CommandKind::kRefAb) {
    const int rows = engine_config_.rows_per_refresh(cmd.granularity);
    for (int bank = 0; bank < banks_per_rank_; ++bank) {
      auto& c = counters_[static_cast<std::size_t>(cmd.rank * banks_per_rank_ + bank)];
      c = sarp_refresh_advance(c, rows, geometry_);
    }
  }
}

std::vector<SubarrayPhase> subarray_phases(const CommandEngine& engine, int rank, int bank,
                                           Cycle now) {
  std::vector<SubarrayPhase> phases(
      static_cast<std::size_t>(engine.config().geometry.subarrays_per_bank), SubarrayPhase::kIdle);
  const int refreshing = engine.refreshing_subarray(rank, bank, now);
  if (refreshing >= 0) phases[static_cast<std::size_t>(refreshing)] = SubarrayPhase::kActivatedForRefresh;
  const int open = engine.open_subarray(rank, bank);
  if (open >= 0) phases[static_cast<std::size_t>(open)] = SubarrayPhase::kActivatedForAccess;
  return phases;
}

bool access_allowed(int target_subarray, const SarpBankView& bank) {
  if (target_subarray == bank.refreshing_subarray) return false;
  return bank.open_subarray < 0 || bank.open_subarray == target_subarray;
}

std::vector<int> sarp_mode_banks(PolicyKind policy, const CommandEngine& engine, int rank,
                                 Cycle now) {
  std::vector<int> banks;
  if (!uses_sarp(policy)) return banks;
  for (int bank = 0; bank < engine.config().geometry.banks_per_rank; ++bank) {
    if (engine.bank_refreshing(rank, bank, now)) banks.push_back(bank);
  }
  return banks;
}

}  // namespace refsim
