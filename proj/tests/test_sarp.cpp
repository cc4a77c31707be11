#include <doctest.h>

#include "refsim/sarp.hpp"
#include "stimulus.hpp"

using namespace refsim;
using refsim::testing::engine_config_for;

TEST_CASE("subarray_of_row") {
  const DramGeometry g;
  CHECK(subarray_of_row(0, g) == 0);
  CHECK(subarray_of_row(8191, g) == 0);
  CHECK(subarray_of_row(8192, g) == 1);
  CHECK(subarray_of_row(65535, g) == 7);
  CHECK_THROWS_AS(subarray_of_row(65536, g), StructuralError);
  CHECK_THROWS_AS(subarray_of_row(-1, g), StructuralError);
}

TEST_CASE("sarp_refresh_advance") {
  const DramGeometry g;
  CHECK(sarp_refresh_advance({0, 8184}, 8, g) == SubarrayRefreshCounter{1, 0});
  CHECK(sarp_refresh_advance({7, 8184}, 8, g) == SubarrayRefreshCounter{0, 0});
  CHECK(sarp_refresh_advance({3, 17}, 0, g) == SubarrayRefreshCounter{3, 17});
  CHECK(sarp_refresh_advance({0, 0}, 8, g) == SubarrayRefreshCounter{0, 8});
}

TEST_CASE("a full retention window of refreshes returns the counter to its start") {
  const DramGeometry g;
  SubarrayRefreshCounter c;
  for (int i = 0; i < 8192; ++i) c = sarp_refresh_advance(c, 8, g);
  CHECK(c == SubarrayRefreshCounter{0, 0});
}

TEST_CASE("access_allowed") {
  CHECK(access_allowed(1, {0, -1}));
  CHECK_FALSE(access_allowed(0, {0, -1}));
  CHECK_FALSE(access_allowed(2, {0, 1}));  // one access subarray at a time
  CHECK(access_allowed(1, {0, 1}));
  CHECK(access_allowed(5, {-1, -1}));
}

TEST_CASE("shadow counters track the device") {
  const EngineConfig cfg = engine_config_for(32, PolicyKind::kSarpAb);
  CommandEngine engine(cfg);
  ShadowRefreshCounters shadow(cfg.geometry, cfg);
  Cycle now = 0;
  for (int i = 0; i < 3000; ++i) {
    DramCommand ref;
    ref.kind = CommandKind::kRefAb;
    ref.rank = i % 2;
    ref.granularity = i % 3 == 0 ? 4 : 1;
    if (!engine.is_issuable(ref, now)) now += cfg.tRFCab(1);
    engine.issue(ref, now);
    shadow.on_refresh(ref);
  }
  for (int rank = 0; rank < 2; ++rank)
    for (int bank = 0; bank < 8; ++bank) {
      CHECK(shadow.at(rank, bank).refresh_subarray == engine.refresh_subarray_counter(rank, bank));
      CHECK(shadow.at(rank, bank).local_row == engine.local_row_counter(rank, bank));
    }
}

TEST_CASE("subarray phases") {
  CommandEngine engine(engine_config_for(8, PolicyKind::kSarpPb));
  DramCommand ref;
  ref.kind = CommandKind::kRefPb;
  ref.bank = 3;
  engine.issue(ref, 0);
  DramCommand act;
  act.kind = CommandKind::kAct;
  act.bank = 3;
  act.row = 8192 * 5;
  act.subarray = 5;
  engine.issue(act, 10);
  const auto phases = subarray_phases(engine, 0, 3, 20);
  CHECK(phases[0] == SubarrayPhase::kActivatedForRefresh);
  CHECK(phases[5] == SubarrayPhase::kActivatedForAccess);
  CHECK(phases[1] == SubarrayPhase::kIdle);
}

TEST_CASE("sarp_mode_banks") {
  SUBCASE("all-bank refresh puts every bank in SARP mode") {
    CommandEngine engine(engine_config_for(8, PolicyKind::kSarpAb));
    DramCommand ref;
    ref.kind = CommandKind::kRefAb;
    engine.issue(ref, 0);
    CHECK(sarp_mode_banks(PolicyKind::kSarpAb, engine, 0, 5) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(sarp_mode_banks(PolicyKind::kSarpAb, engine, 1, 5).empty());
    CHECK(sarp_mode_banks(PolicyKind::kAllBank, engine, 0, 5).empty());
  }
  SUBCASE("per-bank refresh restricts only the refreshing bank") {
    CommandEngine engine(engine_config_for(8, PolicyKind::kSarpPb));
    DramCommand ref;
    ref.kind = CommandKind::kRefPb;
    ref.bank = 3;
    engine.issue(ref, 0);
    CHECK(sarp_mode_banks(PolicyKind::kSarpPb, engine, 0, 5) == std::vector<int>{3});
    CHECK(sarp_mode_banks(PolicyKind::kSarpPb, engine, 0, 5000).empty());
  }
}
