#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "refsim/geometry.hpp"
#include "refsim/refresh_policy.hpp"

namespace refsim {

/// Nominal refresh schedule used as the audit reference. The k-th block of
/// `rows_per_period` rows in bank b is due by
/// first_boundary[b] + (k + 1) * period, and may be late by at most `slack`.
struct RetentionSchedule {
  Cycle period = 0;
  std::vector<Cycle> first_boundary;  // per bank within a rank
  int rows_per_period = 8;
  Cycle slack = 0;
};

/// Reference schedule for a policy: tREFIab slots for all-bank families,
/// banks_per_rank x tREFIpb staggered slots for per-bank families. Slack is
/// eight all-bank intervals.
RetentionSchedule nominal_schedule(PolicyKind kind, const DramGeometry& geometry,
                                   const TimingParams& timing, int rows_per_refresh_1x);

struct StaleRows {
  int channel = 0;
  int rank = 0;
  int bank = 0;
  int first_row = 0;
  int row_count = 0;
  Cycle deadline = 0;
  Cycle refreshed_at = -1;  // -1: never refreshed before the end of the run
};

struct AuditReport {
  bool pass = true;
  Cycle max_lateness = 0;  // largest (issue cycle - deadline) seen; negative when always early
  std::size_t refreshes_checked = 0;
  std::vector<StaleRows> stale;
};

/// Checks that every row of every bank was refreshed within its deadline
/// plus slack. Rows are refreshed in counter order, so the n-th row refreshed
/// in a bank is physical row n mod rows_per_bank.
AuditReport retention_audit(std::span<const RefreshLogEntry> log, const DramGeometry& geometry,
                            const RetentionSchedule& schedule, Cycle end_cycle);

/// CSV with header `cycle,kind,rank,bank,credit_after,tag`. rank is the global
/// rank id (channel * ranks_per_channel + rank); bank is -1 for REFab.
void write_refresh_log(std::ostream& out, std::span<const RefreshLogEntry> log,
                       const DramGeometry& geometry);

/// Reads the CSV written by write_refresh_log. Row counts are recovered from
/// `rows_by_granularity`. Throws TraceParseError on malformed lines.
std::vector<RefreshLogEntry> read_refresh_log(std::istream& in, const DramGeometry& geometry,
                                              std::array<int, 3> rows_by_granularity);

}  // namespace refsim
