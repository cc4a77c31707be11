#include "refsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace refsim {
namespace {

// Absorbs binary representation error, e.g. 13.5 / 1.5 landing a hair above 9.
constexpr double kRoundingSlack = 1e-9;

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

}  // namespace

void DramGeometry::validate() const {
  require(channels >= 1 && ranks_per_channel >= 1 && columns_per_row >= 1 && cacheline_bytes >= 1,
          "geometry counts must be >= 1");
  require(is_pow2(banks_per_rank), "banks_per_rank must be a power of two");
  require(is_pow2(subarrays_per_bank), "subarrays_per_bank must be a power of two");
  require(is_pow2(rows_per_bank), "rows_per_bank must be a power of two");
  require(rows_per_bank % subarrays_per_bank == 0,
          "rows_per_bank must be divisible by subarrays_per_bank");
}

void TimingParams::validate() const {
  for (int v : {tRCD, tRP, tCL, tCWL, tRAS, tRC, tRRD, tFAW, tWTR, tRTW, tRTP, tWR, tBURST, tRFCab,
                tRFCpb, tREFIab, tREFIpb, tFAW_ref, tRRD_ref}) {
    require(v >= 1, "all timing values must be >= 1 cycle");
  }
  require(tFAW >= tRRD, "tFAW must be >= tRRD");
  require(tFAW_ref >= tFAW && tRRD_ref >= tRRD, "refresh-scaled tFAW/tRRD below base values");
  require(tRFCpb < tRFCab, "tRFCpb must be < tRFCab");
  require(tREFIpb <= tREFIab, "tREFIpb must be <= tREFIab");
}

void CurrentParams::validate() const {
  for (double v : {i_act, i_ref_ab, i_ref_pb, i_bg_active, i_bg_precharged, i_rd, i_wr, vdd}) {
    require(v > 0.0, "currents and vdd must be > 0");
  }
  require(i_ref_pb <= i_ref_ab, "i_ref_pb must be <= i_ref_ab");
}

DensityProfile density_profile(int density_gbit, double retention_ms) {
  require(retention_ms > 0.0, "retention_ms must be > 0");
  switch (density_gbit) {
    case 8: return {8, 350.0, retention_ms};
    case 16: return {16, 530.0, retention_ms};
    case 32: return {32, 890.0, retention_ms};
    default: throw ConfigError("unknown density " + std::to_string(density_gbit) + " Gb");
  }
}

Cycle ns_to_cycles(double duration_ns, double tCK_ns) {
  if (!(tCK_ns > 0.0)) throw ConfigError("tCK must be > 0");
  if (duration_ns < 0.0) throw ConfigError("duration must be >= 0");
  return static_cast<Cycle>(std::ceil(duration_ns / tCK_ns - kRoundingSlack));
}

Cycle ns_to_cycles_floor(double duration_ns, double tCK_ns) {
  if (!(tCK_ns > 0.0)) throw ConfigError("tCK must be > 0");
  if (duration_ns < 0.0) throw ConfigError("duration must be >= 0");
  return static_cast<Cycle>(std::floor(duration_ns / tCK_ns + kRoundingSlack));
}

double power_overhead_faw(double i_act, double i_ref) {
  if (!(i_act > 0.0)) throw ConfigError("I_ACT must be > 0");
  if (i_ref < 0.0) throw ConfigError("I_REF must be >= 0");
  return (4.0 * i_act + i_ref) / (4.0 * i_act);
}

TimingParams derive_timing(const DensityProfile& profile, const DramGeometry& geometry,
                           const RawTimings& base, const CurrentParams& currents,
                           PolicyKind refresh_mode) {
  const DensityProfile checked = density_profile(profile.density_gbit, profile.retention_ms);
  (void)checked;
  geometry.validate();
  require(base.rfc_ab_to_pb > 1.0, "tRFCab/tRFCpb ratio must be > 1");
  require(base.refresh_slots >= 1, "refresh_slots must be >= 1");

  const double ck = base.tCK;
  auto cyc = [ck](double ns) { return static_cast<int>(ns_to_cycles(ns, ck)); };

  TimingParams t;
  t.tCK_ns = ck;
  t.tRCD = cyc(base.tRCD);
  t.tRP = cyc(base.tRP);
  t.tCL = cyc(base.tCL);
  t.tCWL = cyc(base.tCWL);
  t.tRAS = cyc(base.tRAS);
  t.tRC = t.tRAS + t.tRP;
  t.tRRD = cyc(base.tRRD);
  t.tFAW = cyc(base.tFAW);
  t.tWTR = cyc(base.tWTR);
  t.tRTP = cyc(base.tRTP);
  t.tWR = cyc(base.tWR);
  t.tBURST = base.tBURST_cycles;
  t.tRTW = base.tRTW > 0.0 ? cyc(base.tRTW) : std::max(1, t.tCL + t.tBURST + 2 - t.tCWL);

  t.tRFCab_ns = profile.tRFCab_ns;
  t.tRFCpb_ns = profile.tRFCab_ns / base.rfc_ab_to_pb;
  t.tRFCab = cyc(t.tRFCab_ns);
  t.tRFCpb = cyc(t.tRFCpb_ns);

  t.tREFIab_ns = profile.retention_ms * 1e6 / base.refresh_slots;
  t.tREFIab = static_cast<int>(ns_to_cycles_floor(t.tREFIab_ns, ck));
  t.tREFIpb = t.tREFIab / geometry.banks_per_rank;

  const double i_ref = is_per_bank(refresh_mode) ? currents.i_ref_pb : currents.i_ref_ab;
  const double overhead = power_overhead_faw(currents.i_act, i_ref);
  t.tFAW_ref = std::max(t.tFAW, cyc(base.tFAW * overhead));
  t.tRRD_ref = std::max(t.tRRD, cyc(base.tRRD * overhead));

  t.validate();
  return t;
}

TimingParams fgr_timing(const TimingParams& base, FgrMode mode) {
  if (mode == FgrMode::k1x) return base;
  const int rate = static_cast<int>(mode);
  const double rfc_divisor = mode == FgrMode::k2x ? 1.35 : 1.63;
  TimingParams t = base;
  t.tREFIab_ns = base.tREFIab_ns / rate;
  t.tREFIab = static_cast<int>(ns_to_cycles_floor(t.tREFIab_ns, base.tCK_ns));
  t.tREFIpb = std::max(1, base.tREFIpb / rate);
  t.tRFCab_ns = base.tRFCab_ns / rfc_divisor;
  t.tRFCpb_ns = base.tRFCpb_ns / rfc_divisor;
  t.tRFCab = static_cast<int>(ns_to_cycles(t.tRFCab_ns, base.tCK_ns));
  t.tRFCpb = static_cast<int>(ns_to_cycles(t.tRFCpb_ns, base.tCK_ns));
  return t;
}

int rows_per_refresh(const DramGeometry& geometry, double retention_ms, Cycle tREFIab,
                     double tCK_ns) {
  require(retention_ms > 0.0 && tREFIab > 0 && tCK_ns > 0.0, "rows_per_refresh inputs must be > 0");
  const double interval_ns = static_cast<double>(tREFIab) * tCK_ns;
  const double rows = geometry.rows_per_bank * interval_ns / (retention_ms * 1e6);
  return std::max(1, static_cast<int>(std::ceil(rows - kRoundingSlack)));
}

}  // namespace refsim
