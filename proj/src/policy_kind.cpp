#include "refsim/policy_kind.hpp"

#include "refsim/types.hpp"

namespace refsim {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kAllBank: return "ab";
    case PolicyKind::kPerBank: return "pb";
    case PolicyKind::kElastic: return "elastic";
    case PolicyKind::kDarp: return "darp";
    case PolicyKind::kSarpAb: return "sarp-ab";
    case PolicyKind::kSarpPb: return "sarp-pb";
    case PolicyKind::kDsarp: return "dsarp";
    case PolicyKind::kFgr2x: return "fgr2x";
    case PolicyKind::kFgr4x: return "fgr4x";
    case PolicyKind::kAdaptive: return "ar";
    case PolicyKind::kNoRefresh: return "noref";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind kind : kAllPolicies) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

bool is_per_bank(PolicyKind kind) {
  return kind == PolicyKind::kPerBank || kind == PolicyKind::kDarp ||
         kind == PolicyKind::kSarpPb || kind == PolicyKind::kDsarp;
}

bool uses_sarp(PolicyKind kind) {
  return kind == PolicyKind::kSarpAb || kind == PolicyKind::kSarpPb || kind == PolicyKind::kDsarp;
}

bool uses_darp(PolicyKind kind) {
  return kind == PolicyKind::kDarp || kind == PolicyKind::kDsarp;
}

}  // namespace refsim
