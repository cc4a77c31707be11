#pragma once

#include <span>
#include <string>
#include <vector>

#include "refsim/engine.hpp"

namespace refsim {

struct Violation {
  std::size_t index = 0;  // position in the history
  Constraint rule = Constraint::kNone;
  std::string detail;
};

/// Re-validates a channel's command history against the full constraint list
/// by scanning command pairs directly. Shares no code path with CommandEngine
/// and keeps no incremental state; the history must be sorted by cycle.
std::vector<Violation> oracle_check(std::span<const IssuedCommand> history,
                                    const EngineConfig& config);

/// Writes one line per command: `cycle kind ch rank bank subarray row col`,
/// tab-separated.
void write_command_trace(std::ostream& out, std::span<const IssuedCommand> history);

/// Inverse of write_command_trace. Throws TraceParseError on malformed lines.
std::vector<IssuedCommand> read_command_trace(std::istream& in);

}  // namespace refsim
