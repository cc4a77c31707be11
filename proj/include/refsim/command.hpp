#pragma once

#include <cstdint>
#include <string_view>

#include "refsim/types.hpp"

namespace refsim {

enum class CommandKind : std::uint8_t { kAct, kPre, kRd, kWr, kRefAb, kRefPb };

std::string_view to_string(CommandKind kind);

/// A DRAM command. Fields that do not apply to a kind are left at zero:
/// REFab addresses a rank, REFpb a bank chosen by the controller.
struct DramCommand {
  CommandKind kind = CommandKind::kAct;
  int channel = 0;
  int rank = 0;
  int bank = 0;
  int subarray = 0;
  int row = 0;
  int column = 0;
  /// Fine-granularity refresh rate for REFab (1, 2 or 4).
  int granularity = 1;

  bool is_refresh() const { return kind == CommandKind::kRefAb || kind == CommandKind::kRefPb; }
  bool operator==(const DramCommand&) const = default;
};

struct IssuedCommand {
  DramCommand cmd;
  Cycle cycle = 0;
};

/// Timing or state rule a command can violate.
enum class Constraint : std::uint8_t {
  kNone,
  kBankState,       // ACT to open bank, CAS to closed/wrong row, REF with open row
  kRefreshBusy,     // access to a refreshing bank (or refreshing subarray under SARP)
  kRefreshOverlap,  // a refresh is already in progress in the rank
  kTRCD,
  kTRAS,
  kTRC,
  kTRP,
  kTRTP,
  kTWR,
  kTRRD,
  kTFAW,
  kTCCD,
  kTWTR,
  kTRTW,
};

std::string_view to_string(Constraint c);

struct IssueCheck {
  Constraint violated = Constraint::kNone;
  explicit operator bool() const { return violated == Constraint::kNone; }
  std::string_view reason() const { return to_string(violated); }
};

}  // namespace refsim
