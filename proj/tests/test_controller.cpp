#include <doctest.h>

#include "refsim/controller.hpp"
#include "refsim/oracle.hpp"
#include "stimulus.hpp"

using namespace refsim;
using refsim::testing::engine_config_for;

namespace {

MemoryController make_controller(PolicyKind kind, int density = 8, ControllerConfig cc = {}) {
  const EngineConfig ec = engine_config_for(density, kind);
  RefreshPolicyParams pp;
  pp.kind = kind;
  pp.timing = ec.timing;
  pp.rows_by_granularity = ec.rows_by_granularity;
  MemoryController mc(cc, ec, make_refresh_policy(pp));
  mc.engine().set_record_history(true);
  return mc;
}

std::uint64_t next_id = 1;

MemRequest request(RequestKind kind, int rank, int bank, int row, Cycle arrival = 0, int column = 0) {
  MemRequest r;
  r.id = next_id++;
  r.kind = kind;
  r.addr.rank = rank;
  r.addr.bank = bank;
  r.addr.row = row;
  r.addr.subarray = row / 8192;
  r.addr.column = column;
  r.arrival = arrival;
  return r;
}

// Index of the first command in the history matching the predicate, or -1.
template <typename P>
long find_cmd(const MemoryController& mc, P pred) {
  const auto& h = mc.engine().history();
  for (std::size_t i = 0; i < h.size(); ++i)
    if (pred(h[i])) return static_cast<long>(i);
  return -1;
}

}  // namespace

TEST_CASE("queue capacity and backpressure") {
  MemoryController mc = make_controller(PolicyKind::kNoRefresh);
  CHECK(mc.enqueue(request(RequestKind::kRead, 0, 0, 1)) == EnqueueResult::kAccepted);
  for (int i = 0; i < 64; ++i)
    REQUIRE(mc.enqueue(request(RequestKind::kWrite, 0, i % 8, i)) == EnqueueResult::kAccepted);
  CHECK(mc.enqueue(request(RequestKind::kWrite, 0, 0, 1)) == EnqueueResult::kBackpressure);
  for (int i = 1; i < 64; ++i) mc.enqueue(request(RequestKind::kRead, 0, 0, 1));
  CHECK(mc.enqueue(request(RequestKind::kRead, 0, 0, 1)) == EnqueueResult::kBackpressure);
  CHECK(mc.pending_demands_rank(0) == 128);
  DecodedAddress bad;
  bad.bank = 9;
  MemRequest r;
  r.addr = bad;
  CHECK_THROWS_AS(mc.enqueue(r), StructuralError);
}

TEST_CASE("writeback watermarks") {
  MemoryController mc = make_controller(PolicyKind::kNoRefresh);
  for (int i = 0; i < 47; ++i) mc.enqueue(request(RequestKind::kWrite, i % 2, i % 8, i));
  CHECK_FALSE(mc.writeback_active());
  mc.enqueue(request(RequestKind::kWrite, 0, 0, 99));
  CHECK(mc.writeback_active());
  CHECK(mc.stats().writeback_episodes == 1);
  mc.enqueue(request(RequestKind::kRead, 1, 7, 5));
  Cycle now = 0;
  bool saw_33 = false;
  while (mc.writeback_active()) {
    if (mc.write_queue_size() == 33) saw_33 = true;
    mc.tick(now++);
    REQUIRE(now < 100000);
  }
  CHECK(saw_33);
  CHECK(mc.write_queue_size() == 32);
  // No read was served while writes drained.
  CHECK(find_cmd(mc, [](const IssuedCommand& c) { return c.cmd.kind == CommandKind::kRd; }) == -1);
  CHECK(mc.stats().max_occupancy_at_exit == 32);
  CHECK(mc.stats().min_occupancy_at_entry == 48);
  // Reads go first once writeback ends.
  const std::size_t before = mc.engine().history().size();
  for (int i = 0; i < 200; ++i) mc.tick(now++);
  const auto& h = mc.engine().history();
  bool rd_seen = false;
  for (std::size_t i = before; i < h.size() && !rd_seen; ++i) rd_seen = h[i].cmd.kind == CommandKind::kRd;
  CHECK(rd_seen);
}

TEST_CASE("hysteresis: writeback state flips only at the watermarks") {
  MemoryController mc = make_controller(PolicyKind::kNoRefresh);
  Cycle now = 0;
  bool prev = false;
  for (int step = 0; step < 20000; ++step) {
    if (step % 3 != 2) mc.enqueue(request(RequestKind::kWrite, step % 2, step % 8, step % 4096));
    mc.tick(now++);
    const bool cur = mc.writeback_active();
    if (cur && !prev) CHECK(mc.write_queue_size() >= 47);  // one write may drain in the same tick
    if (!cur && prev) CHECK(mc.write_queue_size() <= 32);
    prev = cur;
  }
  CHECK(mc.stats().writeback_episodes > 0);
}

TEST_CASE("FR-FCFS serves the row hit before an older row miss") {
  MemoryController mc = make_controller(PolicyKind::kNoRefresh);
  mc.enqueue(request(RequestKind::kRead, 0, 0, 5, 0, 1));
  Cycle now = 0;
  while (find_cmd(mc, [](const IssuedCommand& c) { return c.cmd.kind == CommandKind::kAct; }) < 0)
    mc.tick(now++);
  const MemRequest miss = request(RequestKind::kRead, 0, 0, 7, now, 2);
  const MemRequest hit = request(RequestKind::kRead, 0, 0, 5, now, 3);
  mc.enqueue(miss);
  mc.enqueue(hit);
  for (int i = 0; i < 300; ++i) mc.tick(now++);
  const auto& h = mc.engine().history();
  std::vector<int> rd_columns;
  for (const auto& c : h)
    if (c.cmd.kind == CommandKind::kRd) rd_columns.push_back(c.cmd.column);
  CHECK(rd_columns == std::vector<int>{1, 3, 2});
  REQUIRE(mc.completed().size() == 3);
  for (const MemRequest& r : mc.completed()) {
    CHECK(r.completion - r.arrival >= mc.engine().timing().tCL + mc.engine().timing().tBURST);
  }
  CHECK(mc.stats().row_hits == 1);
  CHECK(oracle_check(h, mc.engine().config()).empty());
}

TEST_CASE("closed-row policy precharges once no hits remain") {
  MemoryController mc = make_controller(PolicyKind::kNoRefresh);
  mc.enqueue(request(RequestKind::kRead, 1, 4, 5));
  for (Cycle now = 0; now < 100; ++now) mc.tick(now);
  const auto& h = mc.engine().history();
  REQUIRE(h.size() == 3);
  CHECK(h[0].cmd.kind == CommandKind::kAct);
  CHECK(h[1].cmd.kind == CommandKind::kRd);
  CHECK(h[2].cmd.kind == CommandKind::kPre);
  CHECK(h[2].cycle == std::max<Cycle>(h[0].cycle + mc.engine().timing().tRAS,
                                      h[1].cycle + mc.engine().timing().tRTP));
  CHECK_FALSE(mc.engine().bank_open(1, 4));
}

TEST_CASE("all-bank refresh precharges the rank and stalls it for tRFCab") {
  MemoryController mc = make_controller(PolicyKind::kAllBank, 32);
  const TimingParams& t = mc.engine().timing();
  Cycle now = 0;
  for (; now < t.tREFIab - 30; ++now) mc.tick(now);
  mc.enqueue(request(RequestKind::kRead, 0, 2, 11, now));
  for (; now < t.tREFIab + 200; ++now) mc.tick(now);
  const long ref = find_cmd(mc, [](const IssuedCommand& c) { return c.cmd.kind == CommandKind::kRefAb; });
  REQUIRE(ref >= 0);
  const Cycle ref_cycle = mc.engine().history()[static_cast<std::size_t>(ref)].cycle;
  CHECK(ref_cycle >= t.tREFIab);
  CHECK(mc.engine().bank_refreshing(0, 2, ref_cycle + t.tRFCab - 1));
  mc.enqueue(request(RequestKind::kRead, 0, 3, 11, now));
  for (; now < ref_cycle + t.tRFCab + 100; ++now) mc.tick(now);
  const auto& h = mc.engine().history();
  for (const auto& c : h)
    if (c.cmd.kind == CommandKind::kAct && c.cmd.rank == 0 && c.cycle > ref_cycle)
      CHECK(c.cycle >= ref_cycle + t.tRFCab);
  CHECK(mc.completed().size() == 2);
  CHECK(mc.stats().refresh_energy_units_ab == 2u * static_cast<unsigned>(t.tRFCab));
  CHECK(oracle_check(h, mc.engine().config()).empty());
}

TEST_CASE("round-robin REFpb forces a busy bank") {
  MemoryController mc = make_controller(PolicyKind::kPerBank, 32);
  const TimingParams& t = mc.engine().timing();
  Cycle now = 0;
  // Keep bank 0 of rank 0 busy with a long run of row hits.
  for (; now < 2 * t.tREFIpb; ++now) {
    if (mc.read_queue_size() < 8) mc.enqueue(request(RequestKind::kRead, 0, 0, 3, now));
    mc.tick(now);
  }
  const long ref = find_cmd(mc, [](const IssuedCommand& c) {
    return c.cmd.kind == CommandKind::kRefPb && c.cmd.rank == 0 && c.cmd.bank == 0;
  });
  REQUIRE(ref >= 0);
  CHECK(mc.engine().history()[static_cast<std::size_t>(ref)].cycle < t.tREFIpb + 40);
  CHECK(mc.stats().refresh_nominal >= 2);
  CHECK(oracle_check(mc.engine().history(), mc.engine().config()).empty());
}

TEST_CASE("DARP refreshes while writes drain") {
  MemoryController mc = make_controller(PolicyKind::kDarp, 32);
  Cycle now = 0;
  for (int i = 0; i < 48; ++i) mc.enqueue(request(RequestKind::kWrite, 0, i % 4, i));
  REQUIRE(mc.writeback_active());
  while (mc.writeback_active() && now < 5000) mc.tick(now++);
  CHECK(mc.stats().refresh_during_writeback > 0);
  CHECK(mc.stats().refresh_pulled > 0);
  CHECK(oracle_check(mc.engine().history(), mc.engine().config()).empty());
}

TEST_CASE("SARP lets a refreshing bank serve other subarrays") {
  MemoryController mc = make_controller(PolicyKind::kSarpPb, 32);
  const TimingParams& t = mc.engine().timing();
  Cycle now = 0;
  for (; now < t.tREFIpb; ++now) mc.tick(now);
  // Bank 0 refreshes subarray 0 now; ask for a row in subarray 4.
  mc.enqueue(request(RequestKind::kRead, 0, 0, 4 * 8192 + 1, now));
  mc.enqueue(request(RequestKind::kRead, 0, 0, 2, now));
  for (; now < t.tREFIpb + 60; ++now) mc.tick(now);
  CHECK(mc.completed().size() == 1);
  CHECK(mc.completed()[0].addr.subarray == 4);
  CHECK(mc.stats().parallel_accesses == 1);
  CHECK(mc.stats().subarray_conflicts >= 1);
  for (; now < t.tREFIpb + t.tRFCpb + 100; ++now) mc.tick(now);
  CHECK(mc.completed().size() == 2);
  CHECK(oracle_check(mc.engine().history(), mc.engine().config()).empty());
}
