#pragma once

#include <cstdint>

#include "refsim/policy_kind.hpp"
#include "refsim/types.hpp"

namespace refsim {

/// DRAM organization. Counts are per parent level (banks per rank, etc).
struct DramGeometry {
  int channels = 2;
  int ranks_per_channel = 2;
  int banks_per_rank = 8;
  int subarrays_per_bank = 8;
  int rows_per_bank = 65536;
  int columns_per_row = 128;  // cachelines per 8KB row
  int cacheline_bytes = 64;

  int rows_per_subarray() const { return rows_per_bank / subarrays_per_bank; }
  int banks_per_channel() const { return ranks_per_channel * banks_per_rank; }
  std::uint64_t capacity_bytes() const {
    return std::uint64_t(channels) * ranks_per_channel * banks_per_rank * rows_per_bank *
           columns_per_row * cacheline_bytes;
  }

  /// Throws ConfigError if a count is not positive, a power-of-two field is
  /// not a power of two, or rows do not split evenly into subarrays.
  void validate() const;
};

/// Datasheet timings in nanoseconds, before conversion to controller cycles.
/// Defaults are DDR3-1333 class values.
struct RawTimings {
  double tCK = 1.5;
  double tRCD = 13.5;
  double tRP = 13.5;
  double tCL = 13.5;
  double tCWL = 10.5;
  double tRAS = 36.0;
  double tRRD = 6.0;
  double tFAW = 30.0;
  double tWTR = 7.5;
  double tRTP = 7.5;
  double tWR = 15.0;
  int tBURST_cycles = 4;
  /// Read-to-write turnaround; derived from tCL/tBURST/tCWL when <= 0.
  double tRTW = 0.0;
  /// tRFCab-to-tRFCpb ratio.
  double rfc_ab_to_pb = 2.3;
  /// Refresh commands per retention window (per bank, all-bank granularity).
  int refresh_slots = 8192;
};

/// Timing constraints in controller cycles.
struct TimingParams {
  double tCK_ns = 1.5;
  int tRCD = 0, tRP = 0, tCL = 0, tCWL = 0, tRAS = 0, tRC = 0;
  int tRRD = 0, tFAW = 0, tWTR = 0, tRTW = 0, tRTP = 0, tWR = 0, tBURST = 0;
  int tRFCab = 0, tRFCpb = 0;
  int tREFIab = 0, tREFIpb = 0;
  /// tFAW/tRRD enforced while a refresh overlaps the rank (SARP).
  int tFAW_ref = 0, tRRD_ref = 0;

  // Nanosecond views of the refresh fields, kept for FGR arithmetic.
  double tRFCab_ns = 0.0, tRFCpb_ns = 0.0, tREFIab_ns = 0.0;

  void validate() const;
  bool operator==(const TimingParams&) const = default;
};

/// Supply currents (milliamp) and voltage used for power integrity and energy.
struct CurrentParams {
  double i_act = 100.0;
  double i_ref_ab = 440.0;
  double i_ref_pb = 55.0;
  double i_bg_active = 45.0;
  double i_bg_precharged = 35.0;
  double i_rd = 150.0;
  double i_wr = 160.0;
  double vdd = 1.5;

  void validate() const;
};

struct DensityProfile {
  int density_gbit = 8;
  double tRFCab_ns = 350.0;
  double retention_ms = 32.0;
};

enum class FgrMode { k1x = 1, k2x = 2, k4x = 4 };

/// Table-1 profile for 8/16/32 Gb chips. Throws ConfigError otherwise.
DensityProfile density_profile(int density_gbit, double retention_ms = 32.0);

/// ceil(duration / tCK); a constraint is never shortened by rounding.
Cycle ns_to_cycles(double duration_ns, double tCK_ns);

/// floor(duration / tCK); used for intervals that are deadlines (tREFI), so
/// rounding never stretches them.
Cycle ns_to_cycles_floor(double duration_ns, double tCK_ns);

double power_overhead_faw(double i_act, double i_ref);

TimingParams derive_timing(const DensityProfile& profile, const DramGeometry& geometry,
                           const RawTimings& base, const CurrentParams& currents,
                           PolicyKind refresh_mode);

/// DDR4 fine-granularity refresh: tREFIab divided by the rate, tRFCab divided
/// by 1.35 (2x) or 1.63 (4x).
TimingParams fgr_timing(const TimingParams& base, FgrMode mode);

/// Rows each refresh command covers in every targeted bank.
int rows_per_refresh(const DramGeometry& geometry, double retention_ms, Cycle tREFIab,
                     double tCK_ns);

}  // namespace refsim
