#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "refsim/geometry.hpp"
#include "refsim/policy_kind.hpp"

namespace refsim {

/// How a refresh relates to its nominal slot.
enum class RefreshTag : std::uint8_t { kNominal, kPostponed, kPulled, kForced };

std::string_view to_string(RefreshTag tag);

/// A refresh the policy wants issued. bank < 0 means all-bank (REFab).
struct RefreshTarget {
  int rank = 0;
  int bank = -1;
  int granularity = 1;
  RefreshTag tag = RefreshTag::kNominal;

  bool all_bank() const { return bank < 0; }
  bool operator==(const RefreshTarget&) const = default;
};

struct RefreshLogEntry {
  Cycle cycle = 0;
  int channel = 0;
  int rank = 0;
  int bank = -1;  // -1 for REFab
  int granularity = 1;
  int rows = 0;
  int credit_after = 0;
  RefreshTag tag = RefreshTag::kNominal;
};

/// Controller state a refresh policy may observe.
class RefreshContext {
 public:
  virtual ~RefreshContext() = default;
  virtual int pending_demands(int rank, int bank) const = 0;
  virtual int pending_demands_rank(int rank) const = 0;
  virtual bool read_queue_empty() const = 0;
  virtual bool writeback_active() const = 0;
  virtual bool refresh_in_progress(int rank, Cycle now) const = 0;
  /// Whether the refresh command could be issued at `now` without first
  /// precharging anything.
  virtual bool can_issue_refresh(const RefreshTarget& target, Cycle now) const = 0;
};

struct RefreshPolicyParams {
  PolicyKind kind = PolicyKind::kAllBank;
  DramGeometry geometry;
  TimingParams timing;  // all-bank 1x timing set
  int channel = 0;
  std::uint64_t seed = 1;
  /// Rows per command at granularity 1x/2x/4x (per-bank commands use 1x).
  std::array<int, 3> rows_by_granularity{8, 4, 2};
  int max_credit = 8;
};

/// Strategy object consulted by a channel controller every cycle.
///
/// tick() advances the nominal schedule; required() lists refreshes the
/// controller must work toward (precharging banks and holding off new
/// activations in their scope); opportunistic() is asked only on cycles where
/// no demand command could be issued and must return a target issuable now.
class RefreshPolicy {
 public:
  explicit RefreshPolicy(const RefreshPolicyParams& params);
  virtual ~RefreshPolicy() = default;

  virtual void tick(Cycle now, const RefreshContext& ctx) = 0;
  const std::vector<RefreshTarget>& required() const { return required_; }
  virtual std::optional<RefreshTarget> opportunistic(Cycle now, const RefreshContext& ctx);
  virtual void on_issued(const RefreshTarget& target, Cycle now) = 0;

  const std::vector<RefreshLogEntry>& log() const { return log_; }
  PolicyKind kind() const { return params_.kind; }

 protected:
  void record(const RefreshTarget& target, Cycle now, int credit_after);
  int rows_for(const RefreshTarget& target) const;

  RefreshPolicyParams params_;
  std::vector<RefreshTarget> required_;
  std::vector<RefreshLogEntry> log_;
};

/// Never refreshes; the ideal upper bound.
class NoRefreshPolicy final : public RefreshPolicy {
 public:
  using RefreshPolicy::RefreshPolicy;
  void tick(Cycle, const RefreshContext&) override {}
  void on_issued(const RefreshTarget&, Cycle) override {}
};

/// REFab every tREFIab (divided by the FGR rate when granularity > 1).
class AllBankPolicy final : public RefreshPolicy {
 public:
  AllBankPolicy(const RefreshPolicyParams& params, int granularity);
  void tick(Cycle now, const RefreshContext& ctx) override;
  void on_issued(const RefreshTarget& target, Cycle now) override;
  Cycle interval() const { return interval_; }

 private:
  void rebuild();
  int granularity_;
  Cycle interval_;
  Cycle next_due_;
  std::vector<int> owed_;
};

/// REFpb every tREFIpb, banks in strict round-robin order.
class RoundRobinPerBankPolicy final : public RefreshPolicy {
 public:
  explicit RoundRobinPerBankPolicy(const RefreshPolicyParams& params);
  void tick(Cycle now, const RefreshContext& ctx) override;
  void on_issued(const RefreshTarget& target, Cycle now) override;

 private:
  void rebuild();
  Cycle next_due_;
  int pointer_ = 0;
  std::vector<std::deque<int>> owed_;  // per rank, in nominal order
};

/// Simplified elastic refresh: postpone REFab while the rank is busy, up to
/// eight commands, issuing into idle periods predicted by a moving average
/// of past idle-gap lengths.
class ElasticPolicy final : public RefreshPolicy {
 public:
  explicit ElasticPolicy(const RefreshPolicyParams& params);
  void tick(Cycle now, const RefreshContext& ctx) override;
  void on_issued(const RefreshTarget& target, Cycle now) override;

  double predicted_idle(int rank) const { return ranks_[static_cast<std::size_t>(rank)].ema_idle; }
  int backlog(int rank) const { return ranks_[static_cast<std::size_t>(rank)].backlog; }
  /// Idle cycles required before issuing at the given backlog.
  Cycle issue_delay(int rank, int backlog) const;

 private:
  struct RankState {
    int backlog = 0;
    Cycle idle_run = 0;
    double ema_idle = 0.0;
    Cycle last_boundary = -1;
    std::optional<RefreshTarget> committed;
  };
  void rebuild();
  Cycle next_due_;
  std::vector<RankState> ranks_;
};

/// Adaptive refresh: at every tREFIab boundary choose 4x fine-granularity
/// refresh if the read queue is empty, else one 1x REFab.
class AdaptivePolicy final : public RefreshPolicy {
 public:
  explicit AdaptivePolicy(const RefreshPolicyParams& params);
  void tick(Cycle now, const RefreshContext& ctx) override;
  void on_issued(const RefreshTarget& target, Cycle now) override;
  FgrMode mode() const { return mode_; }
  int switches() const { return switches_; }

 private:
  void rebuild();
  Cycle quarter_;
  Cycle next_due_;
  int quarter_index_ = 0;
  FgrMode mode_ = FgrMode::k1x;
  int switches_ = 0;
  std::vector<std::deque<int>> owed_;  // per rank, granularities owed
};

/// Per-bank credit bookkeeping: credit = issued - scheduled, bounded to
/// [-max, +max]. A slot is counted as scheduled when it is postponed, when
/// an earlier pull-in absorbs it, or when its refresh is issued.
struct RefreshCreditTable {
  std::vector<int> credit;
  std::vector<long long> issued;
  std::vector<long long> scheduled;

  explicit RefreshCreditTable(std::size_t banks = 0)
      : credit(banks, 0), issued(banks, 0), scheduled(banks, 0) {}
};

/// Out-of-order per-bank refresh with write-refresh parallelization.
class DarpPolicy final : public RefreshPolicy {
 public:
  explicit DarpPolicy(const RefreshPolicyParams& params);
  void tick(Cycle now, const RefreshContext& ctx) override;
  std::optional<RefreshTarget> opportunistic(Cycle now, const RefreshContext& ctx) override;
  void on_issued(const RefreshTarget& target, Cycle now) override;

  const RefreshCreditTable& credits(int rank) const {
    return tables_[static_cast<std::size_t>(rank)];
  }
  /// Mandatory refreshes not yet issued in a rank.
  std::size_t owed_mandatory(int rank) const {
    return mandatory_[static_cast<std::size_t>(rank)].size();
  }
  long long boundaries_seen(int rank, int bank) const;
  std::optional<int> warp_target(int rank) const { return warp_[static_cast<std::size_t>(rank)]; }

 private:
  void on_boundary(int rank, int bank, const RefreshContext& ctx);
  void rebuild();
  Cycle next_due_;
  int pointer_ = 0;
  std::vector<RefreshCreditTable> tables_;
  std::vector<std::vector<long long>> boundaries_;
  std::vector<std::deque<RefreshTarget>> mandatory_;
  std::vector<std::optional<int>> warp_;
  std::mt19937_64 rng_;
  std::vector<int> scratch_counts_;
  std::vector<RefreshTarget> scratch_targets_;
};

/// Bank to refresh while the channel drains writes: the fewest pending
/// demands among banks whose credit is below the pull-in cap, lowest index
/// on ties. Empty when every bank is capped.
std::optional<int> warp_select_bank(std::span<const int> demand_counts,
                                    std::span<const int> credits, int max_credit = 8);

std::unique_ptr<RefreshPolicy> make_refresh_policy(const RefreshPolicyParams& params);

}  // namespace refsim
