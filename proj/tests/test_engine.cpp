#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "refsim/engine.hpp"
#include "refsim/oracle.hpp"
#include "stimulus.hpp"

using namespace refsim;
using refsim::testing::engine_config_for;
using refsim::testing::random_history;
using namespace refsim::testing::cmd;

namespace {

std::vector<Constraint> rules(const std::vector<Violation>& v) {
  std::vector<Constraint> out;
  for (const Violation& x : v) out.push_back(x.rule);
  return out;
}

bool has_rule(const std::vector<Violation>& v, Constraint c) {
  const auto r = rules(v);
  return std::find(r.begin(), r.end(), c) != r.end();
}

}  // namespace

TEST_CASE("tRRD between activations in a rank") {
  CommandEngine e(engine_config_for(8, PolicyKind::kAllBank));
  e.issue(act(0, 0, 100), 0);
  const IssueCheck c = e.is_issuable(act(0, 1, 100), 2);
  CHECK_FALSE(c);
  CHECK(c.violated == Constraint::kTRRD);
  CHECK(c.reason() == "tRRD");
  CHECK(e.is_issuable(act(1, 1, 100), 2));  // other rank
  CHECK(e.is_issuable(act(0, 1, 100), 4));
}

TEST_CASE("four-activate window") {
  CommandEngine e(engine_config_for(8, PolicyKind::kAllBank));
  for (int b = 0; b < 4; ++b) e.issue(act(0, b, 7), b * 4);
  CHECK(e.is_issuable(act(0, 4, 7), 16).violated == Constraint::kTFAW);
  CHECK(e.is_issuable(act(0, 4, 7), 19).violated == Constraint::kTFAW);
  CHECK(e.is_issuable(act(0, 4, 7), 20));
}

TEST_CASE("read timing") {
  CommandEngine e(engine_config_for(8, PolicyKind::kAllBank));
  const TimingParams& t = e.timing();
  e.issue(act(0, 0, 5), 0);
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 0, 5), t.tRCD - 1).violated == Constraint::kTRCD);
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 0, 6), t.tRCD).violated == Constraint::kBankState);
  e.issue(cas(CommandKind::kRd, 0, 0, 5), t.tRCD);
  CHECK(e.read_data_cycle(t.tRCD) == t.tRCD + t.tCL + t.tBURST);
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 0, 5), t.tRCD + 1).violated == Constraint::kTCCD);
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 0, 5), t.tRCD + t.tBURST));
  CHECK(e.is_issuable(cas(CommandKind::kWr, 0, 0, 5), t.tRCD + 1).violated == Constraint::kTRTW);
  CHECK(e.is_issuable(pre(0, 0), t.tRCD + 1).violated == Constraint::kTRAS);
  CHECK(e.is_issuable(pre(0, 0), t.tRAS));
}

TEST_CASE("write to read turnaround and write recovery") {
  CommandEngine e(engine_config_for(8, PolicyKind::kAllBank));
  const TimingParams& t = e.timing();
  e.issue(act(0, 0, 5), 0);
  e.issue(cas(CommandKind::kWr, 0, 0, 5), 20);
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 0, 5), 21).violated == Constraint::kTWTR);
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 0, 5), 20 + t.tCWL + t.tBURST + t.tWTR));
  CHECK(e.is_issuable(pre(0, 0), 30).violated == Constraint::kTWR);
  CHECK(e.is_issuable(pre(0, 0), 20 + t.tCWL + t.tBURST + t.tWR));
}

TEST_CASE("REFab blocks every bank of the rank for tRFCab") {
  CommandEngine e(engine_config_for(32, PolicyKind::kAllBank));
  const int rfc = e.timing().tRFCab;
  e.issue(ref_ab(0), 100);
  for (int b = 0; b < 8; ++b) {
    CHECK(e.phase(0, b, 100) == BankPhase::kRefreshing);
    CHECK(e.refresh_end(0, b) == 100 + rfc);
    CHECK(e.is_issuable(act(0, b, 3), 100 + rfc - 1).violated == Constraint::kRefreshBusy);
    CHECK(e.is_issuable(act(0, b, 3), 100 + rfc));
  }
  CHECK(e.is_issuable(act(1, 0, 3), 101));
  CHECK(e.is_issuable(ref_ab(0), 200).violated == Constraint::kRefreshOverlap);
}

TEST_CASE("REFab needs every bank precharged") {
  CommandEngine e(engine_config_for(8, PolicyKind::kAllBank));
  e.issue(act(0, 6, 3), 0);
  CHECK(e.is_issuable(ref_ab(0), 50).violated == Constraint::kBankState);
  e.issue(pre(0, 6), 50);
  CHECK(e.is_issuable(ref_ab(0), 51).violated == Constraint::kTRP);
  CHECK(e.is_issuable(ref_ab(0), 59));
}

TEST_CASE("REFpb touches one bank and refreshes serialize in a rank") {
  CommandEngine e(engine_config_for(8, PolicyKind::kPerBank));
  const int rfc = e.timing().tRFCpb;
  e.issue(ref_pb(0, 5), 10);
  CHECK(e.phase(0, 5, 10) == BankPhase::kRefreshing);
  CHECK(e.is_issuable(act(0, 5, 1), 20).violated == Constraint::kRefreshBusy);
  for (int b = 0; b < 8; ++b)
    if (b != 5) CHECK(e.phase(0, b, 20) == BankPhase::kPrecharged);
  CHECK(e.is_issuable(act(0, 3, 1), 20));
  CHECK(e.is_issuable(ref_pb(0, 3), 20).violated == Constraint::kRefreshOverlap);
  CHECK(e.is_issuable(ref_pb(1, 3), 20));
  CHECK(e.is_issuable(ref_pb(0, 3), 10 + rfc));
}

TEST_CASE("REFpb counts toward tRRD") {
  CommandEngine e(engine_config_for(8, PolicyKind::kPerBank));
  e.issue(act(0, 0, 1), 0);
  CHECK(e.is_issuable(ref_pb(0, 1), 2).violated == Constraint::kTRRD);
  CHECK(e.is_issuable(ref_pb(0, 1), 4));
}

TEST_CASE("SARP: access another subarray of a refreshing bank") {
  const EngineConfig cfg = engine_config_for(8, PolicyKind::kSarpPb);
  CommandEngine e(cfg);
  const TimingParams& t = e.timing();
  REQUIRE(e.refresh_subarray_counter(0, 2) == 0);
  e.issue(ref_pb(0, 2), 0);
  CHECK(e.refreshing_subarray(0, 2, 1) == 0);
  CHECK(e.is_issuable(act(0, 2, 100), 10).violated == Constraint::kRefreshBusy);
  CHECK(e.is_issuable(act(0, 2, 8192 + 100), 10));
  e.issue(act(0, 2, 8192 + 100), 10);
  // Scaled tRRD applies while the refresh runs.
  CHECK(e.is_issuable(act(0, 3, 1), 10 + t.tRRD).violated == Constraint::kTRRD);
  CHECK(e.is_issuable(act(0, 3, 1), 10 + t.tRRD_ref));
  CHECK(e.is_issuable(cas(CommandKind::kRd, 0, 2, 8192 + 100), 10 + t.tRCD));
}

TEST_CASE("SARP: refresh may start with a row open in another subarray") {
  CommandEngine e(engine_config_for(8, PolicyKind::kSarpPb));
  e.issue(act(0, 1, 8192 * 3), 0);
  CHECK(e.is_issuable(ref_pb(0, 1), 40));
  CommandEngine plain(engine_config_for(8, PolicyKind::kPerBank));
  plain.issue(act(0, 1, 8192 * 3), 0);
  CHECK(plain.is_issuable(ref_pb(0, 1), 40).violated == Constraint::kBankState);
}

TEST_CASE("refresh counters advance through subarrays") {
  const EngineConfig cfg = engine_config_for(8, PolicyKind::kPerBank);
  CommandEngine e(cfg);
  Cycle now = 0;
  const int per_sa = 8192 / cfg.rows_per_refresh_pb();
  for (int i = 0; i < per_sa; ++i) {
    e.issue(ref_pb(0, 0), now);
    now += cfg.timing.tRFCpb;
  }
  CHECK(e.refresh_subarray_counter(0, 0) == 1);
  CHECK(e.local_row_counter(0, 0) == 0);
  CHECK(e.refresh_subarray_counter(0, 1) == 0);
}

TEST_CASE("structural errors are distinct from timing rejections") {
  CommandEngine e(engine_config_for(8, PolicyKind::kAllBank));
  CHECK_THROWS_AS((void)e.is_issuable(act(0, 8, 1), 0), StructuralError);
  CHECK_THROWS_AS((void)e.is_issuable(act(2, 0, 1), 0), StructuralError);
  CHECK_THROWS_AS((void)e.is_issuable(act(0, 0, 70000), 0), StructuralError);
  DramCommand bad = act(0, 0, 1);
  bad.subarray = 3;
  CHECK_THROWS_AS((void)e.is_issuable(bad, 0), StructuralError);
  e.issue(act(0, 0, 1), 0);
  CHECK_THROWS_AS(e.issue(act(0, 0, 2), 50), SimulationError);
}

TEST_CASE("oracle: empty history") {
  CHECK(oracle_check({}, engine_config_for(8, PolicyKind::kAllBank)).empty());
}

TEST_CASE("oracle agrees with the engine on random stimulus") {
  for (PolicyKind kind : kAllPolicies) {
    CAPTURE(to_string(kind));
    const EngineConfig cfg = engine_config_for(32, kind);
    const auto history = random_history(cfg, kind, 4000, 7);
    const auto v = oracle_check(history, cfg);
    CHECK(v.empty());
    if (!v.empty()) MESSAGE(v.front().detail);
  }
}

TEST_CASE("refresh exclusivity under per-bank stimulus") {
  const EngineConfig cfg = engine_config_for(32, PolicyKind::kPerBank);
  const auto history = random_history(cfg, PolicyKind::kPerBank, 20000, 3);
  std::vector<Cycle> busy_until(2, 0);
  int refreshes = 0;
  for (const IssuedCommand& ic : history) {
    if (ic.cmd.kind != CommandKind::kRefPb) continue;
    ++refreshes;
    CHECK(ic.cycle >= busy_until[static_cast<std::size_t>(ic.cmd.rank)]);
    busy_until[static_cast<std::size_t>(ic.cmd.rank)] = ic.cycle + cfg.timing.tRFCpb;
  }
  CHECK(refreshes > 10);
}

TEST_CASE("activation-rate bound holds on random stimulus") {
  const EngineConfig cfg = engine_config_for(8, PolicyKind::kSarpAb);
  const auto history = random_history(cfg, PolicyKind::kSarpAb, 20000, 11);
  const int faw = cfg.timing.tFAW;  // the scaled window is wider, so this bound is weaker
  for (int rank = 0; rank < 2; ++rank) {
    std::vector<Cycle> acts;
    for (const IssuedCommand& ic : history)
      if (ic.cmd.kind == CommandKind::kAct && ic.cmd.rank == rank) acts.push_back(ic.cycle);
    for (std::size_t i = 4; i < acts.size(); ++i) CHECK(acts[i] - acts[i - 4] >= faw);
  }
}

TEST_CASE("oracle: overlapping REFpb is reported once, at the second command") {
  const EngineConfig pb = engine_config_for(8, PolicyKind::kPerBank);
  const std::vector<IssuedCommand> h{{ref_pb(0, 3), 0}, {ref_pb(0, 5), 50}};
  const auto v = oracle_check(h, pb);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == Constraint::kRefreshOverlap);
  CHECK(v[0].index == 1);
}

TEST_CASE("oracle: planted faults") {
  for (const auto& f : refsim::testing::planted_faults()) {
    CAPTURE(f.name);
    CHECK(has_rule(oracle_check(f.history, f.config), f.rule));
  }
}

TEST_CASE("command trace round trip") {
  const EngineConfig cfg = engine_config_for(16, PolicyKind::kFgr2x);
  const auto history = random_history(cfg, PolicyKind::kFgr2x, 500, 5);
  std::stringstream ss;
  write_command_trace(ss, history);
  const auto back = read_command_trace(ss);
  REQUIRE(back.size() == history.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].cycle == history[i].cycle);
    CHECK(back[i].cmd.kind == history[i].cmd.kind);
    CHECK(back[i].cmd.rank == history[i].cmd.rank);
    CHECK(back[i].cmd.granularity == history[i].cmd.granularity);
  }
  CHECK(oracle_check(back, cfg).empty());
  std::stringstream bad("12\tACT\t0\n");
  CHECK_THROWS_AS(read_command_trace(bad), TraceParseError);
}
