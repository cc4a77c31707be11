#pragma once

#include <vector>

#include "refsim/engine.hpp"
#include "refsim/policy_kind.hpp"

namespace refsim {

/// Throws StructuralError when row is outside the bank.
int subarray_of_row(int row, const DramGeometry& geometry);

/// Refresh position of one bank: the subarray the next refresh targets and
/// the row within it.
struct SubarrayRefreshCounter {
  int refresh_subarray = 0;
  int local_row = 0;
  bool operator==(const SubarrayRefreshCounter&) const = default;
};

/// Advance by `rows` refreshed rows, carrying into the subarray index modulo
/// the subarray count.
SubarrayRefreshCounter sarp_refresh_advance(SubarrayRefreshCounter counter, int rows,
                                            const DramGeometry& geometry);

/// Controller-side copies of every bank's device refresh counters in one
/// channel. Kept in lock step by applying each issued refresh command.
class ShadowRefreshCounters {
 public:
  ShadowRefreshCounters(const DramGeometry& geometry, const EngineConfig& engine_config);

  void on_refresh(const DramCommand& cmd);
  const SubarrayRefreshCounter& at(int rank, int bank) const {
    return counters_[static_cast<std::size_t>(rank * banks_per_rank_ + bank)];
  }

 private:
  DramGeometry geometry_;
  EngineConfig engine_config_;
  int banks_per_rank_;
  std::vector<SubarrayRefreshCounter> counters_;
};

enum class SubarrayPhase { kIdle, kActivatedForAccess, kActivatedForRefresh };

/// Per-subarray phase of a bank, reconstructed from engine state.
std::vector<SubarrayPhase> subarray_phases(const CommandEngine& engine, int rank, int bank,
                                           Cycle now);

/// What the access check needs to know about the target bank.
struct SarpBankView {
  int refreshing_subarray = -1;  // -1: not refreshing
  int open_subarray = -1;        // subarray whose row drives the global bitlines
};

/// Whether a demand access to `target_subarray` may proceed on a refreshing
/// bank: it must avoid the refreshing subarray, and only one subarray can be
/// connected to the global bitlines at a time.
bool access_allowed(int target_subarray, const SarpBankView& bank);

/// Banks of `rank` that currently admit subarray-parallel access.
std::vector<int> sarp_mode_banks(PolicyKind policy, const CommandEngine& engine, int rank,
                                 Cycle now);

}  // namespace refsim
