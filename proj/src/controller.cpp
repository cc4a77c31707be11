#include "refsim/controller.hpp"

#include <algorithm>
#include <string>

namespace refsim {

MemoryController::MemoryController(const ControllerConfig& config,
                                   const EngineConfig& engine_config,
                                   std::unique_ptr<RefreshPolicy> policy)
    : config_(config),
      engine_(engine_config),
      policy_(std::move(policy)),
      shadow_(engine_config.geometry, engine_config),
      banks_per_rank_(engine_config.geometry.banks_per_rank),
      ranks_(engine_config.geometry.ranks_per_channel) {
  if (!policy_) throw ConfigError("controller needs a refresh policy");
  if (config_.read_queue_capacity <= 0 || config_.write_queue_capacity <= 0)
    throw ConfigError("queue capacities must be positive");
  if (config_.low_watermark < 0 || config_.low_watermark >= config_.high_watermark ||
      config_.high_watermark > config_.write_queue_capacity)
    throw ConfigError("write watermarks must satisfy 0 <= low < high <= capacity");
  const auto banks = static_cast<std::size_t>(ranks_ * banks_per_rank_);
  pending_.assign(banks, 0);
  pending_rank_.assign(static_cast<std::size_t>(ranks_), 0);
  blocked_subarray_.assign(banks, -2);
  has_hit_.assign(banks, 0);
  wanted_.assign(banks, 0);
  reads_.reserve(static_cast<std::size_t>(config_.read_queue_capacity));
  writes_.reserve(static_cast<std::size_t>(config_.write_queue_capacity));
  reset_stats();
}

void MemoryController::reset_stats() {
  stats_ = ControllerStats{};
  stats_.rank_active_cycles.assign(static_cast<std::size_t>(ranks_), 0);
  stats_.rank_precharged_cycles.assign(static_cast<std::size_t>(ranks_), 0);
}

EnqueueResult MemoryController::enqueue(const MemRequest& req) {
  const DecodedAddress& a = req.addr;
  if (a.channel != engine_.config().channel || a.rank < 0 || a.rank >= ranks_ || a.bank < 0 ||
      a.bank >= banks_per_rank_)
    throw StructuralError("request outside this channel's geometry");
  auto& queue = req.kind == RequestKind::kRead ? reads_ : writes_;
  const int cap = req.kind == RequestKind::kRead ? config_.read_queue_capacity
                                                 : config_.write_queue_capacity;
  if (static_cast<int>(queue.size()) >= cap) return EnqueueResult::kBackpressure;
  queue.push_back(req);
  queue.back().activated = false;
  queue.back().saw_refresh_conflict = false;
  ++pending_[static_cast<std::size_t>(flat(a.rank, a.bank))];
  ++pending_rank_[static_cast<std::size_t>(a.rank)];
  if (req.kind == RequestKind::kWrite) writeback_tick();
  return EnqueueResult::kAccepted;
}

void MemoryController::writeback_tick() {
  const int occupancy = static_cast<int>(writes_.size());
  if (!writeback_ && occupancy >= config_.high_watermark) {
    writeback_ = true;
    ++stats_.writeback_episodes;
    stats_.min_occupancy_at_entry = std::min(stats_.min_occupancy_at_entry, occupancy);
  } else if (writeback_ && occupancy <= config_.low_watermark) {
    writeback_ = false;
    stats_.max_occupancy_at_exit = std::max(stats_.max_occupancy_at_exit, occupancy);
  }
}

int MemoryController::pending_demands(int rank, int bank) const {
  return pending_[static_cast<std::size_t>(flat(rank, bank))];
}

int MemoryController::pending_demands_rank(int rank) const {
  return pending_rank_[static_cast<std::size_t>(rank)];
}

DramCommand MemoryController::refresh_command(const RefreshTarget& target) const {
  DramCommand cmd;
  cmd.kind = target.all_bank() ? CommandKind::kRefAb : CommandKind::kRefPb;
  cmd.channel = engine_.config().channel;
  cmd.rank = target.rank;
  cmd.bank = target.all_bank() ? 0 : target.bank;
  cmd.granularity = target.granularity;
  return cmd;
}

DramCommand MemoryController::demand_command(CommandKind kind, const MemRequest& req) const {
  DramCommand cmd;
  cmd.kind = kind;
  cmd.channel = req.addr.channel;
  cmd.rank = req.addr.rank;
  cmd.bank = req.addr.bank;
  if (kind != CommandKind::kPre) {
    cmd.subarray = req.addr.subarray;
    cmd.row = req.addr.row;
    cmd.column = req.addr.column;
  }
  return cmd;
}

bool MemoryController::can_issue_refresh(const RefreshTarget& target, Cycle now) const {
  return static_cast<bool>(engine_.is_issuable(refresh_command(target), now));
}

void MemoryController::issue(const DramCommand& cmd, Cycle now) {
  engine_.issue(cmd, now);
  ++stats_.commands[static_cast<std::size_t>(cmd.kind)];
  if (cmd.is_refresh()) {
    shadow_.on_refresh(cmd);
    if (writeback_) ++stats_.refresh_during_writeback;
    if (cmd.kind == CommandKind::kRefAb)
      stats_.refresh_energy_units_ab +=
          static_cast<std::uint64_t>(engine_.config().tRFCab(cmd.granularity));
    else
      stats_.refresh_energy_units_pb += static_cast<std::uint64_t>(engine_.timing().tRFCpb);
  }
}

void MemoryController::mark_blocked(const RefreshTarget& target) {
  const bool sarp = engine_.config().sarp;
  const int first = target.all_bank() ? 0 : target.bank;
  const int last = target.all_bank() ? banks_per_rank_ - 1 : target.bank;
  for (int bank = first; bank <= last; ++bank) {
    const int fb = flat(target.rank, bank);
    blocked_subarray_[static_cast<std::size_t>(fb)] =
        sarp ? shadow_.at(target.rank, bank).refresh_subarray : -1;
  }
  any_blocked_ = true;
}

bool MemoryController::act_blocked(const MemRequest& req) const {
  if (!any_blocked_) return false;
  const int blocked = blocked_subarray_[static_cast<std::size_t>(flat(req.addr.rank, req.addr.bank))];
  return blocked == -1 || blocked == req.addr.subarray;
}

void MemoryController::erase_request(std::vector<MemRequest>& queue, std::size_t index) {
  const DecodedAddress& a = queue[index].addr;
  --pending_[static_cast<std::size_t>(flat(a.rank, a.bank))];
  --pending_rank_[static_cast<std::size_t>(a.rank)];
  queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(index));
}

// Required refreshes first: issue the command if legal, otherwise precharge
// the open banks standing in its way.
bool MemoryController::issue_refresh_work(Cycle now) {
  const auto& required = policy_->required();
  if (required.empty()) return false;
  for (const RefreshTarget& target : required) mark_blocked(target);

  const bool sarp = engine_.config().sarp;
  for (const RefreshTarget& target : required) {
    const DramCommand cmd = refresh_command(target);
    if (engine_.is_issuable(cmd, now)) {
      issue(cmd, now);
      policy_->on_issued(target, now);
      const RefreshTag tag = policy_->log().back().tag;
      switch (tag) {
        case RefreshTag::kNominal: ++stats_.refresh_nominal; break;
        case RefreshTag::kPostponed: ++stats_.refresh_postponed; break;
        case RefreshTag::kPulled: ++stats_.refresh_pulled; break;
        case RefreshTag::kForced: ++stats_.refresh_forced; break;
      }
      return true;
    }
    const int first = target.all_bank() ? 0 : target.bank;
    const int last = target.all_bank() ? banks_per_rank_ - 1 : target.bank;
    for (int bank = first; bank <= last; ++bank) {
      if (!engine_.bank_open(target.rank, bank)) continue;
      if (sarp && engine_.open_subarray(target.rank, bank) !=
                      shadow_.at(target.rank, bank).refresh_subarray)
        continue;
      DramCommand pre;
      pre.kind = CommandKind::kPre;
      pre.channel = engine_.config().channel;
      pre.rank = target.rank;
      pre.bank = bank;
      if (engine_.is_issuable(pre, now)) {
        issue(pre, now);
        return true;
      }
    }
  }
  return false;
}

bool MemoryController::finish_opened_writes(Cycle now) {
  for (std::size_t i = 0; i < writes_.size(); ++i) {
    const MemRequest& req = writes_[i];
    if (!req.activated || engine_.open_row(req.addr.rank, req.addr.bank) != req.addr.row) continue;
    has_hit_[static_cast<std::size_t>(flat(req.addr.rank, req.addr.bank))] = 1;
    const DramCommand cmd = demand_command(CommandKind::kWr, req);
    if (!engine_.is_issuable(cmd, now)) continue;
    issue(cmd, now);
    ++stats_.row_misses;
    ++stats_.writes_served;
    erase_request(writes_, i);
    writeback_tick();
    return true;
  }
  return false;
}

// FR-FCFS over the active queue: oldest row hit, else oldest request whose
// bank is closed and can be activated.
bool MemoryController::issue_demand(Cycle now) {
  std::fill(has_hit_.begin(), has_hit_.end(), 0);
  std::fill(wanted_.begin(), wanted_.end(), 0);
  std::vector<MemRequest>* queue = nullptr;
  if (writeback_) queue = &writes_;
  else if (!reads_.empty()) queue = &reads_;
  else if (config_.drain_writes_when_idle && !writes_.empty()) queue = &writes_;
  if (queue == nullptr) return false;

  // Idle write drain can be cut short by a new read; finish the writes whose
  // rows were already opened instead of throwing the activation away.
  if (queue == &reads_ && !writes_.empty() && finish_opened_writes(now)) return true;

  const bool is_read = queue == &reads_;
  const CommandKind cas = is_read ? CommandKind::kRd : CommandKind::kWr;
  // Per-bank ACT verdict that holds for every subarray: 0 unknown, 1 ok, 2 no.
  std::array<std::uint8_t, 256> act_cache{};
  std::array<std::uint8_t, 256> cas_cache{};  // 1: a CAS to this bank already failed
  const bool small = has_hit_.size() <= act_cache.size();
  std::size_t act_index = queue->size();
  bool cas_tried_fail = false;

  for (std::size_t i = 0; i < queue->size(); ++i) {
    MemRequest& req = (*queue)[i];
    const int rank = req.addr.rank;
    const int bank = req.addr.bank;
    const int fb = flat(rank, bank);
    wanted_[static_cast<std::size_t>(fb)] = 1;
    const int open_row = engine_.open_row(rank, bank);
    if (open_row >= 0) {
      if (open_row != req.addr.row) continue;
      has_hit_[static_cast<std::size_t>(fb)] = 1;
      if (cas_tried_fail) continue;  // bus constraints are channel-wide
      if (small && cas_cache[static_cast<std::size_t>(fb)]) continue;
      const DramCommand cmd = demand_command(cas, req);
      const IssueCheck check = engine_.is_issuable(cmd, now);
      if (!check) {
        if (check.violated == Constraint::kTCCD || check.violated == Constraint::kTWTR ||
            check.violated == Constraint::kTRTW)
          cas_tried_fail = true;
        else if (small)
          cas_cache[static_cast<std::size_t>(fb)] = 1;
        continue;
      }
      issue(cmd, now);
      if (req.activated) ++stats_.row_misses;
      else ++stats_.row_hits;
      if (is_read) {
        MemRequest done = req;
        done.completion = engine_.read_data_cycle(now);
        in_flight_.push_back(done);
        ++stats_.reads_served;
      } else {
        ++stats_.writes_served;
      }
      erase_request(*queue, i);
      if (!is_read) writeback_tick();
      return true;
    }
    if (act_index != queue->size()) continue;
    if (act_blocked(req)) {
      if (!req.saw_refresh_conflict) {
        req.saw_refresh_conflict = true;
        ++stats_.subarray_conflicts;
      }
      continue;
    }
    std::uint8_t& cached = act_cache[small ? static_cast<std::size_t>(fb) : 0];
    if (small && cached == 2) continue;
    const IssueCheck check = engine_.is_issuable(demand_command(CommandKind::kAct, req), now);
    if (check) {
      act_index = i;
    } else if (check.violated == Constraint::kRefreshBusy) {
      if (!req.saw_refresh_conflict) {
        req.saw_refresh_conflict = true;
        ++stats_.subarray_conflicts;
      }
    } else if (small) {
      cached = 2;
    }
  }
  if (act_index == queue->size()) return false;
  MemRequest& req = (*queue)[act_index];
  if (engine_.bank_refreshing(req.addr.rank, req.addr.bank, now)) ++stats_.parallel_accesses;
  issue(demand_command(CommandKind::kAct, req), now);
  req.activated = true;
  has_hit_[static_cast<std::size_t>(flat(req.addr.rank, req.addr.bank))] = 1;
  return true;
}

// Closed-row policy: close a bank once no queued request hits its open row.
// A bank the active direction does not want is left open while the other
// queue still has hits for it.
bool MemoryController::issue_closed_row_precharge(Cycle now) {
  const bool reads_active = !writeback_ && !reads_.empty();
  const std::vector<MemRequest>& other = reads_active ? writes_ : reads_;
  for (int rank = 0; rank < ranks_; ++rank) {
    for (int bank = 0; bank < banks_per_rank_; ++bank) {
      const auto fb = static_cast<std::size_t>(flat(rank, bank));
      if (!engine_.bank_open(rank, bank) || has_hit_[fb]) continue;
      DramCommand pre;
      pre.kind = CommandKind::kPre;
      pre.channel = engine_.config().channel;
      pre.rank = rank;
      pre.bank = bank;
      if (!engine_.is_issuable(pre, now)) continue;
      if (!wanted_[fb] && (!any_blocked_ || blocked_subarray_[fb] == -2)) {
        const int row = engine_.open_row(rank, bank);
        bool other_hit = false;
        for (const MemRequest& r : other)
          if (r.addr.rank == rank && r.addr.bank == bank && r.addr.row == row) {
            other_hit = true;
            break;
          }
        if (other_hit) continue;
      }
      issue(pre, now);
      return true;
    }
  }
  return false;
}

bool MemoryController::issue_opportunistic_refresh(Cycle now) {
  const std::optional<RefreshTarget> target = policy_->opportunistic(now, *this);
  if (!target) return false;
  const DramCommand cmd = refresh_command(*target);
  issue(cmd, now);
  policy_->on_issued(*target, now);
  if (policy_->log().back().tag == RefreshTag::kPostponed) ++stats_.refresh_postponed;
  else ++stats_.refresh_pulled;
  return true;
}

void MemoryController::tick(Cycle now) {
  while (!in_flight_.empty() && in_flight_.front().completion <= now) {
    MemRequest& done = in_flight_.front();
    const Cycle latency = done.completion - done.arrival;
    stats_.read_latency_sum += static_cast<std::uint64_t>(latency);
    ++stats_.read_latency_histogram[latency];
    completed_.push_back(done);
    in_flight_.pop_front();
  }

  ++stats_.cycles;
  for (int rank = 0; rank < ranks_; ++rank) {
    if (engine_.rank_active(rank, now)) ++stats_.rank_active_cycles[static_cast<std::size_t>(rank)];
    else ++stats_.rank_precharged_cycles[static_cast<std::size_t>(rank)];
  }

  policy_->tick(now, *this);
  writeback_tick();

  if (any_blocked_) {
    std::fill(blocked_subarray_.begin(), blocked_subarray_.end(), -2);
    any_blocked_ = false;
  }
  if (issue_refresh_work(now)) return;
  if (issue_demand(now)) return;
  if (issue_closed_row_precharge(now)) return;
  issue_opportunistic_refresh(now);
}

}  // namespace refsim
