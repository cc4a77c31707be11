#pragma once

#include <array>
#include <string>
#include <string_view>

namespace refsim {

enum class PolicyKind {
  kAllBank,     // ab
  kPerBank,     // pb
  kElastic,     // elastic
  kDarp,        // darp
  kSarpAb,      // sarp-ab
  kSarpPb,      // sarp-pb
  kDsarp,       // dsarp
  kFgr2x,       // fgr2x
  kFgr4x,       // fgr4x
  kAdaptive,    // ar
  kNoRefresh,   // noref
};

inline constexpr std::array<PolicyKind, 11> kAllPolicies = {
    PolicyKind::kAllBank, PolicyKind::kPerBank, PolicyKind::kElastic, PolicyKind::kDarp,
    PolicyKind::kSarpAb,  PolicyKind::kSarpPb,  PolicyKind::kDsarp,   PolicyKind::kFgr2x,
    PolicyKind::kFgr4x,   PolicyKind::kAdaptive, PolicyKind::kNoRefresh};

std::string_view to_string(PolicyKind kind);

/// Throws ConfigError on an unknown name.
PolicyKind parse_policy(std::string_view name);

/// Per-bank refresh commands (REFpb) rather than rank-wide REFab.
bool is_per_bank(PolicyKind kind);

/// Subarray-level refresh/access parallelism enabled in the device model.
bool uses_sarp(PolicyKind kind);

/// Uses the out-of-order per-bank scheduler with refresh credits.
bool uses_darp(PolicyKind kind);

}  // namespace refsim
