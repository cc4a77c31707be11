#include "refsim/retention_audit.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace refsim {

RetentionSchedule nominal_schedule(PolicyKind kind, const DramGeometry& geometry,
                                   const TimingParams& timing, int rows_per_refresh_1x) {
  RetentionSchedule s;
  s.rows_per_period = rows_per_refresh_1x;
  s.slack = 8LL * timing.tREFIab;
  s.first_boundary.resize(static_cast<std::size_t>(geometry.banks_per_rank));
  if (is_per_bank(kind)) {
    s.period = static_cast<Cycle>(geometry.banks_per_rank) * timing.tREFIpb;
    for (int b = 0; b < geometry.banks_per_rank; ++b)
      s.first_boundary[static_cast<std::size_t>(b)] = static_cast<Cycle>(b + 1) * timing.tREFIpb;
  } else {
    s.period = timing.tREFIab;
    std::fill(s.first_boundary.begin(), s.first_boundary.end(), static_cast<Cycle>(timing.tREFIab));
  }
  return s;
}

AuditReport retention_audit(std::span<const RefreshLogEntry> log, const DramGeometry& geometry,
                            const RetentionSchedule& schedule, Cycle end_cycle) {
  const int banks = geometry.banks_per_rank;
  const int ranks = geometry.ranks_per_channel;
  const std::size_t total_banks = static_cast<std::size_t>(geometry.channels * ranks * banks);
  std::vector<long long> rows_done(total_banks, 0);

  std::vector<RefreshLogEntry> sorted(log.begin(), log.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RefreshLogEntry& a, const RefreshLogEntry& b) { return a.cycle < b.cycle; });

  auto deadline_of = [&](int bank, long long row_index) {
    const long long block = row_index / schedule.rows_per_period;
    return schedule.first_boundary[static_cast<std::size_t>(bank)] + (block + 1) * schedule.period;
  };

  AuditReport report;
  report.max_lateness = std::numeric_limits<Cycle>::min();
  for (const RefreshLogEntry& e : sorted) {
    if (e.channel < 0 || e.channel >= geometry.channels || e.rank < 0 || e.rank >= ranks ||
        e.bank >= banks)
      throw StructuralError("refresh log entry outside geometry");
    const int first = e.bank < 0 ? 0 : e.bank;
    const int last = e.bank < 0 ? banks - 1 : e.bank;
    for (int bank = first; bank <= last; ++bank) {
      const std::size_t idx = static_cast<std::size_t>((e.channel * ranks + e.rank) * banks + bank);
      const long long n = rows_done[idx];
      const Cycle deadline = deadline_of(bank, n);
      const Cycle lateness = e.cycle - deadline;
      report.max_lateness = std::max(report.max_lateness, lateness);
      ++report.refreshes_checked;
      if (lateness > schedule.slack) {
        report.pass = false;
        report.stale.push_back({e.channel, e.rank, bank,
                                static_cast<int>(n % geometry.rows_per_bank), e.rows, deadline,
                                e.cycle});
      }
      rows_done[idx] = n + e.rows;
    }
  }
  if (report.refreshes_checked == 0) report.max_lateness = 0;

  // Rows whose deadline (plus slack) passed before the end without a refresh.
  for (int ch = 0; ch < geometry.channels; ++ch) {
    for (int rank = 0; rank < ranks; ++rank) {
      for (int bank = 0; bank < banks; ++bank) {
        const std::size_t idx = static_cast<std::size_t>((ch * ranks + rank) * banks + bank);
        const long long n = rows_done[idx];
        const Cycle deadline = deadline_of(bank, n);
        if (deadline + schedule.slack >= end_cycle) continue;
        const long long blocks_due =
            (end_cycle - schedule.slack - schedule.first_boundary[static_cast<std::size_t>(bank)]) /
            schedule.period;
        const long long overdue = std::min<long long>(
            blocks_due * schedule.rows_per_period - n, geometry.rows_per_bank);
        report.pass = false;
        report.stale.push_back({ch, rank, bank, static_cast<int>(n % geometry.rows_per_bank),
                                static_cast<int>(std::max<long long>(overdue, 1)), deadline, -1});
      }
    }
  }
  return report;
}

namespace {

std::string kind_name(const RefreshLogEntry& e) {
  if (e.bank >= 0) return "REFpb";
  return e.granularity == 1 ? "REFab" : "REFab" + std::to_string(e.granularity) + "x";
}

}  // namespace

void write_refresh_log(std::ostream& out, std::span<const RefreshLogEntry> log,
                       const DramGeometry& geometry) {
  out << "cycle,kind,rank,bank,credit_after,tag\n";
  for (const RefreshLogEntry& e : log) {
    out << e.cycle << ',' << kind_name(e) << ',' << e.channel * geometry.ranks_per_channel + e.rank
        << ',' << e.bank << ',' << e.credit_after << ',' << to_string(e.tag) << '\n';
  }
}

std::vector<RefreshLogEntry> read_refresh_log(std::istream& in, const DramGeometry& geometry,
                                              std::array<int, 3> rows_by_granularity) {
  std::vector<RefreshLogEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("cycle,", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    RefreshLogEntry e;
    std::string kind, tag;
    int global_rank = 0;
    if (!(ls >> e.cycle >> kind >> global_rank >> e.bank >> e.credit_after >> tag))
      throw TraceParseError(line_no, "expected 6 fields");
    e.channel = global_rank / geometry.ranks_per_channel;
    e.rank = global_rank % geometry.ranks_per_channel;
    if (kind == "REFpb") e.granularity = 1;
    else if (kind == "REFab") e.granularity = 1;
    else if (kind == "REFab2x") e.granularity = 2;
    else if (kind == "REFab4x") e.granularity = 4;
    else throw TraceParseError(line_no, "unknown refresh kind '" + kind + "'");
    e.rows = rows_by_granularity[e.granularity == 1 ? 0 : (e.granularity == 2 ? 1 : 2)];
    if (tag == "nominal") e.tag = RefreshTag::kNominal;
    else if (tag == "postponed") e.tag = RefreshTag::kPostponed;
    else if (tag == "pulled") e.tag = RefreshTag::kPulled;
    else if (tag == "forced") e.tag = RefreshTag::kForced;
    else throw TraceParseError(line_no, "unknown refresh tag '" + tag + "'");
    out.push_back(e);
  }
  return out;
}

}  // namespace refsim
