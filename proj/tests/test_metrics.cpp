#include <doctest.h>

#include <vector>

#include "refsim/metrics.hpp"

using namespace refsim;

TEST_CASE("weighted and harmonic speedup") {
  const std::vector<double> ones(8, 1.0);
  CHECK(weighted_speedup(ones, ones) == doctest::Approx(8.0));
  const std::vector<double> half(8, 0.5);
  CHECK(weighted_speedup(half, ones) == doctest::Approx(4.0));

  CHECK(harmonic_speedup(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 1.0}) ==
        doctest::Approx(1.0));
  // 2 / (1/1 + 2/1): one core unaffected, one at half speed.
  CHECK(harmonic_speedup(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}) ==
        doctest::Approx(0.6667).epsilon(1e-3));
  CHECK(max_slowdown(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("speedup errors") {
  const std::vector<double> a{1.0, 1.0};
  CHECK_THROWS_AS(weighted_speedup(a, std::vector<double>{1.0, 0.0}), MetricError);
  CHECK_THROWS_AS(weighted_speedup(a, std::vector<double>{1.0}), MetricError);
  CHECK_THROWS_AS(harmonic_speedup(std::vector<double>{0.0, 1.0}, a), MetricError);
  CHECK_THROWS_AS(weighted_speedup(std::vector<double>{}, std::vector<double>{}), MetricError);
}

TEST_CASE("weighted speedup is bounded by the core count when nothing speeds up") {
  std::vector<double> alone{0.3, 1.2, 2.0, 0.9};
  std::vector<double> shared{0.1, 1.2, 1.0, 0.45};
  const double ws = weighted_speedup(shared, alone);
  CHECK(ws <= 4.0);
  CHECK(harmonic_speedup(shared, alone) <= ws / 4.0 + 1e-12);  // HM <= AM
}

namespace {

SimStats background_only(std::uint64_t cycles) {
  SimStats s;
  s.channel_commands.push_back({});
  s.rank_precharged_cycles = cycles;
  s.dram_cycles = static_cast<Cycle>(cycles);
  return s;
}

}  // namespace

TEST_CASE("energy") {
  const CurrentParams cur;
  TimingParams t;
  t.tCK_ns = 1.5;
  t.tRC = 33;
  t.tBURST = 4;

  SUBCASE("background only") {
    const EnergyBreakdown e = energy_accumulate(background_only(1000), cur, t);
    CHECK(e.background == doctest::Approx(35.0 * 1.5 * 1.5 * 1000));
    CHECK(e.refresh == 0.0);
    CHECK(e.total == doctest::Approx(e.background));
    CHECK(e.per_access == 0.0);
  }
  SUBCASE("refresh energy is linear in refresh work") {
    SimStats s = background_only(1000);
    s.refresh_units_ab = 234;
    const double one = energy_accumulate(s, cur, t).refresh;
    s.refresh_units_ab = 468;
    CHECK(energy_accumulate(s, cur, t).refresh == doctest::Approx(2 * one));
    s.refresh_units_pb = 102;
    CHECK(energy_accumulate(s, cur, t).refresh ==
          doctest::Approx(2 * one + 55.0 * 1.5 * 1.5 * 102));
  }
  SUBCASE("per access") {
    SimStats s = background_only(0);
    s.channel_commands[0][static_cast<std::size_t>(CommandKind::kAct)] = 1;
    s.channel_commands[0][static_cast<std::size_t>(CommandKind::kRd)] = 2;
    s.reads_completed = 2;
    const EnergyBreakdown e = energy_accumulate(s, cur, t);
    CHECK(e.activate_precharge == doctest::Approx(100.0 * 1.5 * 1.5 * 33));
    CHECK(e.read_write == doctest::Approx(2 * 150.0 * 1.5 * 1.5 * 4));
    CHECK(e.per_access == doctest::Approx(e.total / 2));
  }
}

TEST_CASE("add_channel folds counters") {
  ControllerStats a;
  a.commands[static_cast<std::size_t>(CommandKind::kRefPb)] = 3;
  a.read_latency_histogram[40] = 2;
  a.read_latency_sum = 80;
  a.rank_active_cycles = {10, 20};
  a.cycles = 100;
  SimStats s;
  s.add_channel(a);
  s.add_channel(a);
  CHECK(s.refresh_count() == 6);
  CHECK(s.reads_completed == 4);
  CHECK(s.avg_read_latency() == doctest::Approx(40.0));
  CHECK(s.rank_active_cycles == 60);
  CHECK(s.dram_cycles == 100);
}
