#include "refsim/refresh_policy.hpp"

#include <algorithm>

namespace refsim {

std::string_view to_string(RefreshTag tag) {
  switch (tag) {
    case RefreshTag::kNominal: return "nominal";
    case RefreshTag::kPostponed: return "postponed";
    case RefreshTag::kPulled: return "pulled";
    case RefreshTag::kForced: return "forced";
  }
  return "?";
}

RefreshPolicy::RefreshPolicy(const RefreshPolicyParams& params) : params_(params) {}

std::optional<RefreshTarget> RefreshPolicy::opportunistic(Cycle, const RefreshContext&) {
  return std::nullopt;
}

int RefreshPolicy::rows_for(const RefreshTarget& target) const {
  switch (target.granularity) {
    case 2: return params_.rows_by_granularity[1];
    case 4: return params_.rows_by_granularity[2];
    default: return params_.rows_by_granularity[0];
  }
}

void RefreshPolicy::record(const RefreshTarget& target, Cycle now, int credit_after) {
  log_.push_back({now, params_.channel, target.rank, target.bank, target.granularity,
                  rows_for(target), credit_after, target.tag});
}

// ---------------------------------------------------------------------------
// All-bank

AllBankPolicy::AllBankPolicy(const RefreshPolicyParams& params, int granularity)
    : RefreshPolicy(params),
      granularity_(granularity),
      interval_(fgr_timing(params.timing, static_cast<FgrMode>(granularity)).tREFIab),
      next_due_(interval_),
      owed_(static_cast<std::size_t>(params.geometry.ranks_per_channel), 0) {}

void AllBankPolicy::rebuild() {
  required_.clear();
  for (std::size_t r = 0; r < owed_.size(); ++r) {
    if (owed_[r] > 0) required_.push_back({static_cast<int>(r), -1, granularity_, RefreshTag::kNominal});
  }
}

void AllBankPolicy::tick(Cycle now, const RefreshContext&) {
  if (now < next_due_) return;
  while (now >= next_due_) {
    for (int& owed : owed_) ++owed;
    next_due_ += interval_;
  }
  rebuild();
}

void AllBankPolicy::on_issued(const RefreshTarget& target, Cycle now) {
  int& owed = owed_[static_cast<std::size_t>(target.rank)];
  if (owed <= 0) throw SimulationError("REFab issued with nothing owed");
  --owed;
  record(target, now, -owed);
  rebuild();
}

// ---------------------------------------------------------------------------
// Per-bank round robin

RoundRobinPerBankPolicy::RoundRobinPerBankPolicy(const RefreshPolicyParams& params)
    : RefreshPolicy(params),
      next_due_(params.timing.tREFIpb),
      owed_(static_cast<std::size_t>(params.geometry.ranks_per_channel)) {}

void RoundRobinPerBankPolicy::rebuild() {
  required_.clear();
  for (std::size_t r = 0; r < owed_.size(); ++r) {
    if (!owed_[r].empty())
      required_.push_back({static_cast<int>(r), owed_[r].front(), 1, RefreshTag::kNominal});
  }
}

void RoundRobinPerBankPolicy::tick(Cycle now, const RefreshContext&) {
  if (now < next_due_) return;
  while (now >= next_due_) {
    for (auto& q : owed_) q.push_back(pointer_);
    pointer_ = (pointer_ + 1) % params_.geometry.banks_per_rank;
    next_due_ += params_.timing.tREFIpb;
  }
  rebuild();
}

void RoundRobinPerBankPolicy::on_issued(const RefreshTarget& target, Cycle now) {
  auto& q = owed_[static_cast<std::size_t>(target.rank)];
  if (q.empty() || q.front() != target.bank)
    throw SimulationError("REFpb issued out of round-robin order");
  q.pop_front();
  record(target, now, -static_cast<int>(q.size()));
  rebuild();
}

// ---------------------------------------------------------------------------
// Elastic

ElasticPolicy::ElasticPolicy(const RefreshPolicyParams& params)
    : RefreshPolicy(params),
      next_due_(params.timing.tREFIab),
      ranks_(static_cast<std::size_t>(params.geometry.ranks_per_channel)) {}

Cycle ElasticPolicy::issue_delay(int rank, int backlog) const {
  const RankState& rs = ranks_[static_cast<std::size_t>(rank)];
  const int rfc = params_.timing.tRFCab;
  if (rs.ema_idle >= rfc) return 0;
  const int cap = params_.max_credit;
  return static_cast<Cycle>(rfc) * std::max(0, cap - backlog) / cap;
}

void ElasticPolicy::rebuild() {
  required_.clear();
  for (const RankState& rs : ranks_) {
    if (rs.committed) required_.push_back(*rs.committed);
  }
}

void ElasticPolicy::tick(Cycle now, const RefreshContext& ctx) {
  bool changed = false;
  while (now >= next_due_) {
    for (RankState& rs : ranks_) {
      ++rs.backlog;
      rs.last_boundary = next_due_;
    }
    next_due_ += params_.timing.tREFIab;
  }
  for (std::size_t r = 0; r < ranks_.size(); ++r) {
    RankState& rs = ranks_[r];
    const bool busy = ctx.pending_demands_rank(static_cast<int>(r)) > 0;
    if (busy) {
      if (rs.idle_run > 0) {
        rs.ema_idle += (static_cast<double>(rs.idle_run) - rs.ema_idle) / 8.0;
        rs.idle_run = 0;
      }
    } else {
      ++rs.idle_run;
    }
    if (rs.backlog == 0 || rs.committed) continue;
    const int rank = static_cast<int>(r);
    if (rs.backlog >= params_.max_credit) {
      rs.committed = RefreshTarget{rank, -1, 1, RefreshTag::kForced};
      changed = true;
    } else if (!busy && rs.idle_run >= issue_delay(rank, rs.backlog)) {
      const bool on_time = rs.backlog == 1 && now == rs.last_boundary;
      rs.committed = RefreshTarget{rank, -1, 1, on_time ? RefreshTag::kNominal : RefreshTag::kPostponed};
      changed = true;
    }
  }
  if (changed) rebuild();
}

void ElasticPolicy::on_issued(const RefreshTarget& target, Cycle now) {
  RankState& rs = ranks_[static_cast<std::size_t>(target.rank)];
  if (rs.backlog <= 0) throw SimulationError("elastic REFab issued with nothing owed");
  --rs.backlog;
  rs.committed.reset();
  record(target, now, -rs.backlog);
  rebuild();
}

// ---------------------------------------------------------------------------
// Adaptive (1x / 4x)

AdaptivePolicy::AdaptivePolicy(const RefreshPolicyParams& params)
    : RefreshPolicy(params),
      quarter_(fgr_timing(params.timing, FgrMode::k4x).tREFIab),
      next_due_(quarter_),
      owed_(static_cast<std::size_t>(params.geometry.ranks_per_channel)) {}

void AdaptivePolicy::rebuild() {
  required_.clear();
  for (std::size_t r = 0; r < owed_.size(); ++r) {
    if (!owed_[r].empty())
      required_.push_back({static_cast<int>(r), -1, owed_[r].front(), RefreshTag::kNominal});
  }
}

void AdaptivePolicy::tick(Cycle now, const RefreshContext& ctx) {
  if (now < next_due_) return;
  while (now >= next_due_) {
    if (quarter_index_ % 4 == 0) {
      const FgrMode next = ctx.read_queue_empty() ? FgrMode::k4x : FgrMode::k1x;
      if (next != mode_) ++switches_;
      mode_ = next;
      for (auto& q : owed_) q.push_back(static_cast<int>(mode_));
    } else if (mode_ == FgrMode::k4x) {
      for (auto& q : owed_) q.push_back(4);
    }
    ++quarter_index_;
    next_due_ += quarter_;
  }
  rebuild();
}

void AdaptivePolicy::on_issued(const RefreshTarget& target, Cycle now) {
  auto& q = owed_[static_cast<std::size_t>(target.rank)];
  if (q.empty() || q.front() != target.granularity)
    throw SimulationError("adaptive refresh issued with unexpected granularity");
  q.pop_front();
  record(target, now, -static_cast<int>(q.size()));
  rebuild();
}

// ---------------------------------------------------------------------------
// DARP

std::optional<int> warp_select_bank(std::span<const int> demand_counts,
                                    std::span<const int> credits, int max_credit) {
  std::optional<int> best;
  for (std::size_t b = 0; b < demand_counts.size(); ++b) {
    if (credits[b] >= max_credit) continue;
    if (!best || demand_counts[b] < demand_counts[static_cast<std::size_t>(*best)])
      best = static_cast<int>(b);
  }
  return best;
}

DarpPolicy::DarpPolicy(const RefreshPolicyParams& params)
    : RefreshPolicy(params),
      next_due_(params.timing.tREFIpb),
      tables_(static_cast<std::size_t>(params.geometry.ranks_per_channel),
              RefreshCreditTable(static_cast<std::size_t>(params.geometry.banks_per_rank))),
      boundaries_(static_cast<std::size_t>(params.geometry.ranks_per_channel),
                  std::vector<long long>(static_cast<std::size_t>(params.geometry.banks_per_rank), 0)),
      mandatory_(static_cast<std::size_t>(params.geometry.ranks_per_channel)),
      warp_(static_cast<std::size_t>(params.geometry.ranks_per_channel)),
      rng_(params.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(params.channel) + 1) {}

long long DarpPolicy::boundaries_seen(int rank, int bank) const {
  return boundaries_[static_cast<std::size_t>(rank)][static_cast<std::size_t>(bank)];
}

void DarpPolicy::rebuild() {
  required_.clear();
  for (std::size_t r = 0; r < mandatory_.size(); ++r) {
    const int rank = static_cast<int>(r);
    if (!mandatory_[r].empty()) {
      required_.push_back(mandatory_[r].front());
    } else if (warp_[r]) {
      const int bank = *warp_[r];
      const int credit = tables_[r].credit[static_cast<std::size_t>(bank)];
      required_.push_back({rank, bank, 1, credit < 0 ? RefreshTag::kPostponed : RefreshTag::kPulled});
    }
  }
}

// Step 1: at a nominal slot for `bank`, postpone if it has pending demands
// and fewer than max postponements, otherwise the refresh becomes mandatory.
void DarpPolicy::on_boundary(int rank, int bank, const RefreshContext& ctx) {
  const auto r = static_cast<std::size_t>(rank);
  const auto b = static_cast<std::size_t>(bank);
  RefreshCreditTable& table = tables_[r];
  ++boundaries_[r][b];
  int& credit = table.credit[b];
  if (credit > 0) {
    // An earlier pulled-in refresh already covers this slot.
    --credit;
    ++table.scheduled[b];
    return;
  }
  const bool busy = ctx.pending_demands(rank, bank) > 0;
  if (busy && credit > -params_.max_credit) {
    --credit;
    ++table.scheduled[b];
    return;
  }
  mandatory_[r].push_back({rank, bank, 1, busy ? RefreshTag::kForced : RefreshTag::kNominal});
  warp_[r].reset();
}

void DarpPolicy::tick(Cycle now, const RefreshContext& ctx) {
  bool changed = false;
  while (now >= next_due_) {
    for (int rank = 0; rank < params_.geometry.ranks_per_channel; ++rank)
      on_boundary(rank, pointer_, ctx);
    pointer_ = (pointer_ + 1) % params_.geometry.banks_per_rank;
    next_due_ += params_.timing.tREFIpb;
    changed = true;
  }

  // Write-refresh parallelization: while draining writes, keep one refresh
  // candidate per rank that has no refresh pending or in flight.
  const bool draining = ctx.writeback_active();
  const int banks = params_.geometry.banks_per_rank;
  std::vector<int>& counts = scratch_counts_;
  counts.resize(static_cast<std::size_t>(banks));
  for (std::size_t r = 0; r < warp_.size(); ++r) {
    const int rank = static_cast<int>(r);
    if (!draining) {
      if (warp_[r]) {
        warp_[r].reset();
        changed = true;
      }
      continue;
    }
    if (warp_[r] || !mandatory_[r].empty() || ctx.refresh_in_progress(rank, now)) continue;
    for (int b = 0; b < banks; ++b) counts[static_cast<std::size_t>(b)] = ctx.pending_demands(rank, b);
    warp_[r] = warp_select_bank(counts, tables_[r].credit, params_.max_credit);
    if (warp_[r]) changed = true;
  }
  if (changed) rebuild();
}

// Step 3: no demand command could go out this cycle; refresh a random idle
// bank that still has pull-in headroom.
std::optional<RefreshTarget> DarpPolicy::opportunistic(Cycle now, const RefreshContext& ctx) {
  std::vector<RefreshTarget>& candidates = scratch_targets_;
  candidates.clear();
  for (std::size_t r = 0; r < tables_.size(); ++r) {
    const int rank = static_cast<int>(r);
    if (!mandatory_[r].empty() || warp_[r] || ctx.refresh_in_progress(rank, now)) continue;
    for (int bank = 0; bank < params_.geometry.banks_per_rank; ++bank) {
      const int credit = tables_[r].credit[static_cast<std::size_t>(bank)];
      if (credit >= params_.max_credit || ctx.pending_demands(rank, bank) > 0) continue;
      const RefreshTarget target{rank, bank, 1,
                                 credit < 0 ? RefreshTag::kPostponed : RefreshTag::kPulled};
      if (ctx.can_issue_refresh(target, now)) candidates.push_back(target);
    }
  }
  if (candidates.empty()) return std::nullopt;
  return candidates[static_cast<std::size_t>(rng_() % candidates.size())];
}

void DarpPolicy::on_issued(const RefreshTarget& target, Cycle now) {
  const auto r = static_cast<std::size_t>(target.rank);
  const auto b = static_cast<std::size_t>(target.bank);
  RefreshCreditTable& table = tables_[r];
  auto& mq = mandatory_[r];
  RefreshTarget logged = target;
  if (!mq.empty() && mq.front().bank == target.bank &&
      (target.tag == RefreshTag::kNominal || target.tag == RefreshTag::kForced)) {
    logged.tag = mq.front().tag;
    mq.pop_front();
    ++table.issued[b];
    ++table.scheduled[b];
  } else {
    int& credit = table.credit[b];
    if (credit >= params_.max_credit) throw SimulationError("refresh credit above bound");
    logged.tag = credit < 0 ? RefreshTag::kPostponed : RefreshTag::kPulled;
    ++credit;
    ++table.issued[b];
    if (warp_[r] && *warp_[r] == target.bank) warp_[r].reset();
  }
  record(logged, now, table.credit[b]);
  rebuild();
}

// ---------------------------------------------------------------------------

std::unique_ptr<RefreshPolicy> make_refresh_policy(const RefreshPolicyParams& params) {
  switch (params.kind) {
    case PolicyKind::kAllBank:
    case PolicyKind::kSarpAb: return std::make_unique<AllBankPolicy>(params, 1);
    case PolicyKind::kFgr2x: return std::make_unique<AllBankPolicy>(params, 2);
    case PolicyKind::kFgr4x: return std::make_unique<AllBankPolicy>(params, 4);
    case PolicyKind::kPerBank:
    case PolicyKind::kSarpPb: return std::make_unique<RoundRobinPerBankPolicy>(params);
    case PolicyKind::kElastic: return std::make_unique<ElasticPolicy>(params);
    case PolicyKind::kDarp:
    case PolicyKind::kDsarp: return std::make_unique<DarpPolicy>(params);
    case PolicyKind::kAdaptive: return std::make_unique<AdaptivePolicy>(params);
    case PolicyKind::kNoRefresh: return std::make_unique<NoRefreshPolicy>(params);
  }
  throw ConfigError("unhandled policy");
}

}  // namespace refsim
