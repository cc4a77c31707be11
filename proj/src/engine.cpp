#include "refsim/engine.hpp"

#include <algorithm>
#include <string>

namespace refsim {

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::kAct: return "ACT";
    case CommandKind::kPre: return "PRE";
    case CommandKind::kRd: return "RD";
    case CommandKind::kWr: return "WR";
    case CommandKind::kRefAb: return "REFab";
    case CommandKind::kRefPb: return "REFpb";
  }
  return "?";
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::kNone: return "ok";
    case Constraint::kBankState: return "bank_state";
    case Constraint::kRefreshBusy: return "refresh_busy";
    case Constraint::kRefreshOverlap: return "refresh_overlap";
    case Constraint::kTRCD: return "tRCD";
    case Constraint::kTRAS: return "tRAS";
    case Constraint::kTRC: return "tRC";
    case Constraint::kTRP: return "tRP";
    case Constraint::kTRTP: return "tRTP";
    case Constraint::kTWR: return "tWR";
    case Constraint::kTRRD: return "tRRD";
    case Constraint::kTFAW: return "tFAW";
    case Constraint::kTCCD: return "tCCD";
    case Constraint::kTWTR: return "tWTR";
    case Constraint::kTRTW: return "tRTW";
  }
  return "?";
}

namespace {

int granularity_index(int granularity) {
  switch (granularity) {
    case 1: return 0;
    case 2: return 1;
    case 4: return 2;
    default: throw StructuralError("refresh granularity must be 1, 2 or 4");
  }
}

}  // namespace

int EngineConfig::tRFCab(int granularity) const {
  return tRFCab_by_granularity[static_cast<std::size_t>(granularity_index(granularity))];
}

int EngineConfig::rows_per_refresh(int granularity) const {
  return rows_by_granularity[static_cast<std::size_t>(granularity_index(granularity))];
}

EngineConfig make_engine_config(const DramGeometry& geometry, const TimingParams& timing,
                                bool sarp, double retention_ms, int channel) {
  EngineConfig cfg;
  cfg.geometry = geometry;
  cfg.timing = timing;
  cfg.sarp = sarp;
  cfg.channel = channel;
  const FgrMode modes[] = {FgrMode::k1x, FgrMode::k2x, FgrMode::k4x};
  for (std::size_t i = 0; i < 3; ++i) {
    const TimingParams t = fgr_timing(timing, modes[i]);
    cfg.tRFCab_by_granularity[i] = t.tRFCab;
    cfg.rows_by_granularity[i] = refsim::rows_per_refresh(geometry, retention_ms, t.tREFIab, t.tCK_ns);
  }
  return cfg;
}

CommandEngine::CommandEngine(EngineConfig config)
    : config_(std::move(config)),
      banks_(static_cast<std::size_t>(config_.geometry.banks_per_channel())),
      ranks_(static_cast<std::size_t>(config_.geometry.ranks_per_channel)) {
  config_.geometry.validate();
  config_.timing.validate();
}

void CommandEngine::check_structure(const DramCommand& cmd) const {
  const DramGeometry& g = config_.geometry;
  auto in = [](int v, int n) { return v >= 0 && v < n; };
  if (cmd.channel != config_.channel) throw StructuralError("command for another channel");
  if (!in(cmd.rank, g.ranks_per_channel)) throw StructuralError("rank out of range");
  switch (cmd.kind) {
    case CommandKind::kRefAb:
      granularity_index(cmd.granularity);
      return;
    case CommandKind::kRefPb:
    case CommandKind::kPre:
      if (!in(cmd.bank, g.banks_per_rank)) throw StructuralError("bank out of range");
      return;
    case CommandKind::kAct:
    case CommandKind::kRd:
    case CommandKind::kWr:
      if (!in(cmd.bank, g.banks_per_rank)) throw StructuralError("bank out of range");
      if (!in(cmd.row, g.rows_per_bank)) throw StructuralError("row out of range");
      if (!in(cmd.column, g.columns_per_row)) throw StructuralError("column out of range");
      if (cmd.subarray != cmd.row / g.rows_per_subarray())
        throw StructuralError("subarray does not match row");
      return;
  }
}

int CommandEngine::refreshing_subarray(int rank, int bank, Cycle now) const {
  const Bank& b = bank_at(rank, bank);
  return b.refresh_end > now ? b.refreshing_subarray : -1;
}

BankPhase CommandEngine::phase(int rank, int bank, Cycle now) const {
  const Bank& b = bank_at(rank, bank);
  if (b.refresh_end > now) return BankPhase::kRefreshing;
  return b.open_row >= 0 ? BankPhase::kRowOpen : BankPhase::kPrecharged;
}

// A bank may start a refresh once precharged; under SARP an open row is
// tolerated if it lies outside the subarray about to be refreshed.
Constraint CommandEngine::check_refresh_target(const Bank& b, Cycle now) const {
  if (b.open_row >= 0 && (!config_.sarp || b.open_subarray == b.ref_subarray))
    return Constraint::kBankState;
  if (now < b.last_pre + config_.timing.tRP) return Constraint::kTRP;
  if (b.open_row < 0 && now < b.last_act + config_.timing.tRC) return Constraint::kTRC;
  return Constraint::kNone;
}

IssueCheck CommandEngine::is_issuable(const DramCommand& cmd, Cycle now) const {
  check_structure(cmd);
  const TimingParams& t = config_.timing;
  const Rank& rk = ranks_[static_cast<std::size_t>(cmd.rank)];
  const bool scaled = config_.sarp && rk.refresh_end > now;

  switch (cmd.kind) {
    case CommandKind::kAct: {
      const Bank& b = bank_at(cmd.rank, cmd.bank);
      if (b.open_row >= 0) return {Constraint::kBankState};
      if (b.refresh_end > now && (!config_.sarp || cmd.subarray == b.refreshing_subarray))
        return {Constraint::kRefreshBusy};
      if (now < b.last_pre + t.tRP) return {Constraint::kTRP};
      if (now < b.last_act + t.tRC) return {Constraint::kTRC};
      if (now < rk.last_act + (scaled ? t.tRRD_ref : t.tRRD)) return {Constraint::kTRRD};
      if (now < rk.act_window[static_cast<std::size_t>(rk.window_head)] +
                    (scaled ? t.tFAW_ref : t.tFAW))
        return {Constraint::kTFAW};
      return {};
    }
    case CommandKind::kPre: {
      const Bank& b = bank_at(cmd.rank, cmd.bank);
      if (b.open_row < 0) return {Constraint::kBankState};
      if (now < b.last_act + t.tRAS) return {Constraint::kTRAS};
      if (now < b.last_rd + t.tRTP) return {Constraint::kTRTP};
      if (now < b.last_wr + t.tCWL + t.tBURST + t.tWR) return {Constraint::kTWR};
      return {};
    }
    case CommandKind::kRd:
    case CommandKind::kWr: {
      const Bank& b = bank_at(cmd.rank, cmd.bank);
      if (b.open_row != cmd.row) return {Constraint::kBankState};
      if (now < b.last_act + t.tRCD) return {Constraint::kTRCD};
      if (cmd.kind == CommandKind::kRd) {
        if (now < last_rd_ + t.tBURST) return {Constraint::kTCCD};
        if (now < last_wr_ + t.tCWL + t.tBURST + t.tWTR) return {Constraint::kTWTR};
      } else {
        if (now < last_wr_ + t.tBURST) return {Constraint::kTCCD};
        if (now < last_rd_ + t.tRTW) return {Constraint::kTRTW};
      }
      return {};
    }
    case CommandKind::kRefAb: {
      if (rk.refresh_end > now) return {Constraint::kRefreshOverlap};
      for (int bank = 0; bank < config_.geometry.banks_per_rank; ++bank) {
        const Constraint c = check_refresh_target(bank_at(cmd.rank, bank), now);
        if (c != Constraint::kNone) return {c};
      }
      return {};
    }
    case CommandKind::kRefPb: {
      if (rk.refresh_end > now) return {Constraint::kRefreshOverlap};
      const Constraint c = check_refresh_target(bank_at(cmd.rank, cmd.bank), now);
      if (c != Constraint::kNone) return {c};
      if (now < rk.last_act + t.tRRD) return {Constraint::kTRRD};
      return {};
    }
  }
  return {};
}

void CommandEngine::start_refresh(Bank& b, Cycle now, int duration, int rows) {
  b.refresh_end = now + duration;
  b.refreshing_subarray = b.ref_subarray;
  const int per_subarray = config_.geometry.rows_per_subarray();
  const int total = b.ref_local_row + rows;
  b.ref_local_row = total % per_subarray;
  b.ref_subarray = (b.ref_subarray + total / per_subarray) % config_.geometry.subarrays_per_bank;
}

void CommandEngine::issue(const DramCommand& cmd, Cycle now) {
  const IssueCheck check = is_issuable(cmd, now);
  if (!check) {
    throw SimulationError("illegal " + std::string(to_string(cmd.kind)) + " at cycle " +
                          std::to_string(now) + " violates " + std::string(check.reason()));
  }
  Rank& rk = ranks_[static_cast<std::size_t>(cmd.rank)];
  switch (cmd.kind) {
    case CommandKind::kAct: {
      Bank& b = bank_at(cmd.rank, cmd.bank);
      b.open_row = cmd.row;
      b.open_subarray = cmd.subarray;
      b.last_act = now;
      rk.last_act = now;
      rk.act_window[static_cast<std::size_t>(rk.window_head)] = now;
      rk.window_head = (rk.window_head + 1) % 4;
      ++rk.open_banks;
      break;
    }
    case CommandKind::kPre: {
      Bank& b = bank_at(cmd.rank, cmd.bank);
      b.open_row = -1;
      b.open_subarray = -1;
      b.last_pre = now;
      --rk.open_banks;
      break;
    }
    case CommandKind::kRd:
      bank_at(cmd.rank, cmd.bank).last_rd = now;
      last_rd_ = now;
      break;
    case CommandKind::kWr:
      bank_at(cmd.rank, cmd.bank).last_wr = now;
      last_wr_ = now;
      break;
    case CommandKind::kRefAb: {
      const int duration = config_.tRFCab(cmd.granularity);
      const int rows = config_.rows_per_refresh(cmd.granularity);
      for (int bank = 0; bank < config_.geometry.banks_per_rank; ++bank)
        start_refresh(bank_at(cmd.rank, bank), now, duration, rows);
      rk.refresh_end = now + duration;
      break;
    }
    case CommandKind::kRefPb: {
      start_refresh(bank_at(cmd.rank, cmd.bank), now, config_.timing.tRFCpb,
                    config_.rows_per_refresh_pb());
      rk.refresh_end = std::max(rk.refresh_end, now + config_.timing.tRFCpb);
      rk.last_act = now;
      break;
    }
  }
  if (record_history_) history_.push_back({cmd, now});
}

}  // namespace refsim
