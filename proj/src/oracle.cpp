#include "refsim/oracle.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace refsim {
namespace {

struct Checker {
  std::span<const IssuedCommand> h;
  const EngineConfig& cfg;
  const TimingParams& t;
  // Subarray each bank's refresh targets at command i (valid for REF entries).
  std::vector<std::vector<int>> ref_subarray;
  Cycle horizon = 0;

  Checker(std::span<const IssuedCommand> history, const EngineConfig& config)
      : h(history), cfg(config), t(config.timing) {
    horizon = std::max({cfg.tRFCab(1), cfg.tRFCab(2), cfg.tRFCab(4), t.tRFCpb, t.tFAW_ref,
                        t.tRRD_ref, t.tRC, t.tCWL + t.tBURST + t.tWR + t.tWTR, t.tRTW, t.tRAS}) +
              1;
    replay_refresh_positions();
  }

  bool same_bank(const DramCommand& a, const DramCommand& b) const {
    return a.rank == b.rank && a.bank == b.bank;
  }

  int refresh_duration(const DramCommand& c) const {
    return c.kind == CommandKind::kRefAb ? cfg.tRFCab(c.granularity) : t.tRFCpb;
  }

  bool covers(const DramCommand& ref, int rank, int bank) const {
    if (ref.rank != rank) return false;
    return ref.kind == CommandKind::kRefAb || ref.bank == bank;
  }

  // Independent replay of the device row counters: count rows refreshed per
  // bank from the start of the history.
  void replay_refresh_positions() {
    const DramGeometry& g = cfg.geometry;
    std::vector<long long> rows_done(static_cast<std::size_t>(g.banks_per_channel()), 0);
    ref_subarray.resize(h.size());
    const long long period = static_cast<long long>(g.rows_per_bank);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const DramCommand& c = h[i].cmd;
      if (!c.is_refresh()) continue;
      auto& pos = ref_subarray[i];
      pos.assign(static_cast<std::size_t>(g.banks_per_rank), -1);
      const int rows = c.kind == CommandKind::kRefAb ? cfg.rows_per_refresh(c.granularity)
                                                    : cfg.rows_per_refresh_pb();
      for (int bank = 0; bank < g.banks_per_rank; ++bank) {
        if (!covers(c, c.rank, bank)) continue;
        long long& done = rows_done[static_cast<std::size_t>(c.rank * g.banks_per_rank + bank)];
        pos[static_cast<std::size_t>(bank)] =
            static_cast<int>((done % period) / g.rows_per_subarray());
        done += rows;
      }
    }
  }

  // Row open in (rank, bank) just before command i, or -1.
  int open_row_before(std::size_t i, int rank, int bank) const {
    for (std::size_t j = i; j-- > 0;) {
      const DramCommand& c = h[j].cmd;
      if (c.rank != rank || c.bank != bank) continue;
      if (c.kind == CommandKind::kAct) return c.row;
      if (c.kind == CommandKind::kPre) return -1;
    }
    return -1;
  }

  bool rank_refreshing_at(std::size_t i, int rank) const {
    const Cycle now = h[i].cycle;
    for (std::size_t j = i; j-- > 0;) {
      if (now - h[j].cycle > horizon) break;
      const DramCommand& c = h[j].cmd;
      if (c.is_refresh() && c.rank == rank && h[j].cycle + refresh_duration(c) > now) return true;
    }
    return false;
  }

  void check_refresh_target(std::size_t i, int bank, std::set<Constraint>& out) const {
    const DramCommand& c = h[i].cmd;
    const int row = open_row_before(i, c.rank, bank);
    if (row >= 0) {
      const int open_sa = row / cfg.geometry.rows_per_subarray();
      if (!cfg.sarp || open_sa == ref_subarray[i][static_cast<std::size_t>(bank)])
        out.insert(Constraint::kBankState);
    }
    const Cycle now = h[i].cycle;
    for (std::size_t j = i; j-- > 0;) {
      const Cycle gap = now - h[j].cycle;
      if (gap > horizon) break;
      const DramCommand& p = h[j].cmd;
      if (p.rank != c.rank || p.bank != bank) continue;
      if (p.kind == CommandKind::kPre && gap < t.tRP) out.insert(Constraint::kTRP);
      if (p.kind == CommandKind::kAct && row < 0 && gap < t.tRC) out.insert(Constraint::kTRC);
    }
  }

  std::set<Constraint> check(std::size_t i) const {
    std::set<Constraint> out;
    const DramCommand& c = h[i].cmd;
    const Cycle now = h[i].cycle;
    const int rows_per_sa = cfg.geometry.rows_per_subarray();

    switch (c.kind) {
      case CommandKind::kAct:
        if (open_row_before(i, c.rank, c.bank) >= 0) out.insert(Constraint::kBankState);
        break;
      case CommandKind::kPre:
        if (open_row_before(i, c.rank, c.bank) < 0) out.insert(Constraint::kBankState);
        break;
      case CommandKind::kRd:
      case CommandKind::kWr:
        if (open_row_before(i, c.rank, c.bank) != c.row) out.insert(Constraint::kBankState);
        break;
      case CommandKind::kRefAb:
        for (int bank = 0; bank < cfg.geometry.banks_per_rank; ++bank)
          check_refresh_target(i, bank, out);
        break;
      case CommandKind::kRefPb:
        check_refresh_target(i, c.bank, out);
        break;
    }

    const bool scaled = cfg.sarp && rank_refreshing_at(i, c.rank);
    const int rrd = scaled ? t.tRRD_ref : t.tRRD;
    const int faw = scaled ? t.tFAW_ref : t.tFAW;
    int acts_in_window = 0;

    for (std::size_t j = i; j-- > 0;) {
      const Cycle gap = now - h[j].cycle;
      if (gap > horizon) break;
      const DramCommand& p = h[j].cmd;
      const bool bank_match = same_bank(p, c);
      const bool rank_match = p.rank == c.rank;

      if (p.is_refresh() && rank_match && gap < refresh_duration(p)) {
        if (c.is_refresh()) out.insert(Constraint::kRefreshOverlap);
        if (c.kind == CommandKind::kAct && covers(p, c.rank, c.bank)) {
          const int refreshing = ref_subarray[j][static_cast<std::size_t>(c.bank)];
          if (!cfg.sarp || c.row / rows_per_sa == refreshing) out.insert(Constraint::kRefreshBusy);
        }
      }

      switch (c.kind) {
        case CommandKind::kAct:
          if (bank_match && p.kind == CommandKind::kAct && gap < t.tRC) out.insert(Constraint::kTRC);
          if (bank_match && p.kind == CommandKind::kPre && gap < t.tRP) out.insert(Constraint::kTRP);
          if (rank_match && (p.kind == CommandKind::kAct || p.kind == CommandKind::kRefPb) &&
              gap < rrd)
            out.insert(Constraint::kTRRD);
          if (rank_match && p.kind == CommandKind::kAct && gap < faw) ++acts_in_window;
          break;
        case CommandKind::kPre:
          if (bank_match && p.kind == CommandKind::kAct && gap < t.tRAS) out.insert(Constraint::kTRAS);
          if (bank_match && p.kind == CommandKind::kRd && gap < t.tRTP) out.insert(Constraint::kTRTP);
          if (bank_match && p.kind == CommandKind::kWr && gap < t.tCWL + t.tBURST + t.tWR)
            out.insert(Constraint::kTWR);
          break;
        case CommandKind::kRd:
          if (bank_match && p.kind == CommandKind::kAct && gap < t.tRCD) out.insert(Constraint::kTRCD);
          if (p.kind == CommandKind::kRd && gap < t.tBURST) out.insert(Constraint::kTCCD);
          if (p.kind == CommandKind::kWr && gap < t.tCWL + t.tBURST + t.tWTR)
            out.insert(Constraint::kTWTR);
          break;
        case CommandKind::kWr:
          if (bank_match && p.kind == CommandKind::kAct && gap < t.tRCD) out.insert(Constraint::kTRCD);
          if (p.kind == CommandKind::kWr && gap < t.tBURST) out.insert(Constraint::kTCCD);
          if (p.kind == CommandKind::kRd && gap < t.tRTW) out.insert(Constraint::kTRTW);
          break;
        case CommandKind::kRefPb:
          if (rank_match && (p.kind == CommandKind::kAct || p.kind == CommandKind::kRefPb) &&
              gap < t.tRRD)
            out.insert(Constraint::kTRRD);
          break;
        case CommandKind::kRefAb:
          break;
      }
    }
    if (acts_in_window >= 4) out.insert(Constraint::kTFAW);
    return out;
  }
};

std::string describe(const IssuedCommand& ic) {
  std::ostringstream os;
  os << to_string(ic.cmd.kind) << " r" << ic.cmd.rank << " b" << ic.cmd.bank << " @" << ic.cycle;
  return os.str();
}

std::string kind_token(const DramCommand& c) {
  std::string k(to_string(c.kind));
  if (c.kind == CommandKind::kRefAb && c.granularity != 1) k += std::to_string(c.granularity) + "x";
  return k;
}

}  // namespace

std::vector<Violation> oracle_check(std::span<const IssuedCommand> history,
                                    const EngineConfig& config) {
  std::vector<Violation> violations;
  if (history.empty()) return violations;
  Checker checker(history, config);
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0 && history[i].cycle < history[i - 1].cycle) {
      violations.push_back({i, Constraint::kNone, "history not sorted by cycle"});
      continue;
    }
    for (Constraint rule : checker.check(i)) {
      violations.push_back({i, rule, describe(history[i]) + " violates " + std::string(to_string(rule))});
    }
  }
  return violations;
}

void write_command_trace(std::ostream& out, std::span<const IssuedCommand> history) {
  for (const IssuedCommand& ic : history) {
    const DramCommand& c = ic.cmd;
    out << ic.cycle << '\t' << kind_token(c) << '\t' << c.channel << '\t' << c.rank << '\t'
        << c.bank << '\t' << c.subarray << '\t' << c.row << '\t' << c.column << '\n';
  }
}

std::vector<IssuedCommand> read_command_trace(std::istream& in) {
  std::vector<IssuedCommand> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    IssuedCommand ic;
    std::string kind;
    DramCommand& c = ic.cmd;
    if (!(ls >> ic.cycle >> kind >> c.channel >> c.rank >> c.bank >> c.subarray >> c.row >> c.column))
      throw TraceParseError(line_no, "expected 8 fields");
    if (kind == "ACT") c.kind = CommandKind::kAct;
    else if (kind == "PRE") c.kind = CommandKind::kPre;
    else if (kind == "RD") c.kind = CommandKind::kRd;
    else if (kind == "WR") c.kind = CommandKind::kWr;
    else if (kind == "REFpb") c.kind = CommandKind::kRefPb;
    else if (kind == "REFab") c.kind = CommandKind::kRefAb;
    else if (kind == "REFab2x") { c.kind = CommandKind::kRefAb; c.granularity = 2; }
    else if (kind == "REFab4x") { c.kind = CommandKind::kRefAb; c.granularity = 4; }
    else throw TraceParseError(line_no, "unknown command kind '" + kind + "'");
    out.push_back(ic);
  }
  return out;
}

}  // namespace refsim
